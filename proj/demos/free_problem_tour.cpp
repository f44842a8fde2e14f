// A short tour: spectra, the boundary data map, a Krein correction, and the
// spectral shift function on the free problem over (0,1).

#include <cstdio>

#include "slkrein/slkrein.hpp"

using namespace slkrein;

int main() {
    auto prob = preset("free-unit");

    auto sp = eigenvalues(prob, neumann_bc(), {-0.5, 100.0});
    std::printf("Neumann eigenvalues below 100:\n");
    for (const auto& e : sp.eigs) std::printf("  %.12f (x%d)\n", e.lambda, e.multiplicity);

    Mat2 dn = bdm_eval(prob, dirichlet_bc(), neumann_bc(), -1.0).M;
    std::printf("\nDirichlet-to-Neumann map at z = -1:\n");
    for (int i = 0; i < 2; ++i)
        std::printf("  [% .6f % .6f]\n", dn(i, 0).real(), dn(i, 1).real());

    auto corr = krein_correction(prob, neumann_bc(), dirichlet_bc(), -1.0);
    std::printf("\nKrein correction kind: %s\n",
                corr.kind == KreinCorrection::Kind::Matrix2 ? "rank two" : "other");

    auto xi = ssf_counting(prob, dirichlet_bc(), neumann_bc(), 50.0);
    std::printf("spectral shift on (0,50]: %d\n", xi.value_at(25.0));

    auto kvn = kvn_extension(prob);
    std::printf("Krein-von Neumann coupling F = [[%g, %g], [%g, %g]]\n", kvn.F(0, 0), kvn.F(0, 1),
                kvn.F(1, 0), kvn.F(1, 1));
    return 0;
}
