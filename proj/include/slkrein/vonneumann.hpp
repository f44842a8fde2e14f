#pragma once

#include <cmath>
#include <string>

#include "slkrein/bdm.hpp"
#include "slkrein/spectra.hpp"

namespace slkrein {

// Matrix of the deficiency-space isometry attached to a self-adjoint
// extension, together with the Gram matrices of the ordered bases it is
// expressed in. U maps coordinates at +i to coordinates at -i; because the
// bases are not orthonormal, its isometry reads U^* G_minus U = G_plus.
struct VnUnitary {
    Mat2 U;
    std::string basis_tag;  // "eq38" (two-point normalized pair) or "gamma:<ref>"
    Mat2 g_plus, g_minus;
};

inline double isometry_residual(const VnUnitary& v) {
    return max_abs(Mat2(v.U.adjoint() * v.g_minus * v.U - v.g_plus));
}

// Route through the boundary data map against an arbitrary reference
// condition: bases are normalized so the reference trace maps them to the
// coordinate vectors.
inline VnUnitary vn_unitary_general(const Problem& prob, const ABPair& bc, const ABPair& ref_bc,
                                    const std::string& ref_name = "ref", double tol = kDefaultTol) {
    Mat2 lam_plus = bdm_eval(prob, ref_bc, bc, Cplx(0, 1), tol).M;
    Mat2 lam_minus = bdm_eval(prob, ref_bc, bc, Cplx(0, -1), tol).M;
    VnUnitary out;
    out.basis_tag = "gamma:" + ref_name;
    out.U = -lam_minus.inverse() * lam_plus;

    auto grid = make_grid(prob, 1.0);
    auto ws_plus = detail::resolvent_workspace(prob, ref_bc, Cplx(0, 1), tol, grid);
    auto ws_minus = detail::resolvent_workspace(prob, ref_bc, Cplx(0, -1), tol, grid);
    auto bp = detail::ref_normalized_basis(ws_plus);
    auto bm = detail::ref_normalized_basis(ws_minus);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            out.g_plus(j, k) = l2_inner(bp[j], bp[k], prob);
            out.g_minus(j, k) = l2_inner(bm[j], bm[k], prob);
        }
    return out;
}

// Closed forms in the two-point normalized basis, separated conditions.
inline VnUnitary vn_unitary_separated(const Problem& prob, const SeparatedBC& sep,
                                      double tol = kDefaultTol) {
    auto basis = deficiency_basis(prob, tol);
    VnUnitary out;
    out.basis_tag = "eq38";
    out.g_plus = basis.g_plus;
    out.g_minus = basis.g_minus;

    const BoundaryFrame f1p = basis.plus.u1.frame(), f2p = basis.plus.u2.frame();
    const BoundaryFrame f1m = basis.minus.u1.frame(), f2m = basis.minus.u2.frame();
    bool za = sep.theta_a == 0.0, zb = sep.theta_b == 0.0;

    if (za && zb) {
        out.U = -Mat2::Identity();
        return out;
    }
    if (!za && !zb) {
        Cplx cot_a = 1.0 / std::tan(sep.theta_a), cot_b = 1.0 / std::tan(sep.theta_b);
        auto d_at = [&](const BoundaryFrame& u1, const BoundaryFrame& u2) {
            return mat2(cot_b - u1.pub, -u2.pub, u1.pua, cot_a + u2.pua);
        };
        out.U = -d_at(f1m, f2m).inverse() * d_at(f1p, f2p);
        return out;
    }
    if (!za && zb) {
        Cplx cot_a = 1.0 / std::tan(sep.theta_a);
        Cplx d_plus = cot_a + f2p.pua, d_minus = cot_a + f2m.pua;
        out.U = mat2(-1.0, 0.0, -(f2m.pub + f1p.pua) / d_minus, -d_plus / d_minus);
        return out;
    }
    Cplx cot_b = 1.0 / std::tan(sep.theta_b);
    Cplx d_plus = cot_b - f1p.pub, d_minus = cot_b - f1m.pub;
    out.U = mat2(-d_plus / d_minus, (f2p.pub + f1m.pua) / d_minus, 0.0, -1.0);
    return out;
}

// Closed forms in the two-point normalized basis, coupled conditions.
inline VnUnitary vn_unitary_coupled(const Problem& prob, const CoupledBC& c,
                                    double tol = kDefaultTol) {
    auto basis = deficiency_basis(prob, tol);
    VnUnitary out;
    out.basis_tag = "eq38";
    out.g_plus = basis.g_plus;
    out.g_minus = basis.g_minus;

    const BoundaryFrame f1p = basis.plus.u1.frame(), f2p = basis.plus.u2.frame();
    const BoundaryFrame f1m = basis.minus.u1.frame(), f2m = basis.minus.u2.frame();
    Cplx phase = std::exp(kImag * c.phi);

    if (std::abs(c.F(0, 1)) >= 1e-12) {
        double f12 = c.F(0, 1);
        auto q_at = [&](const BoundaryFrame& u1, const BoundaryFrame& u2) {
            return mat2(c.F(1, 1) / f12 - u1.pub, -phase / f12 - u2.pub,
                        -1.0 / (phase * f12) + u1.pua, c.F(0, 0) / f12 + u2.pua);
        };
        out.U = -q_at(f1m, f2m).inverse() * q_at(f1p, f2p);
        return out;
    }

    double f22 = c.F(1, 1);
    Cplx q_minus = c.F(1, 0) * f22 + f22 * f22 * f2m.pua + phase * f22 * f1m.pua -
                   f22 / phase * f2m.pub - f1m.pub;
    Cplx c11 = f1p.pub - f1m.pub - phase * f22 * (f2m.pub + f1p.pua);
    Cplx c12 = f22 * ((f1p.pub - f1m.pub) / phase - f22 * (f2m.pub + f1p.pua));
    Cplx c22 = f22 * (f22 * (f2m.pua - f2p.pua) + (f2p.pub + f1m.pua) / phase);
    Cplx c21 = phase * f22 * (f2m.pua - f2p.pua) + f2p.pub + f1m.pua;
    out.U = mat2(c11, c21, c12, c22) / q_minus - Mat2::Identity();
    return out;
}

// Change of basis for the Dirichlet reference: its trace-normalized basis is
// the two-point normalized pair with the columns swapped.
inline Mat2 dirichlet_ref_to_two_point(const Mat2& u_gamma_dirichlet) {
    return swap_matrix() * u_gamma_dirichlet * swap_matrix();
}

}  // namespace slkrein
