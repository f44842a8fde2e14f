#pragma once

#include <cmath>
#include <vector>

#include "slkrein/boundary.hpp"
#include "slkrein/propagate.hpp"
#include "slkrein/types.hpp"

namespace slkrein {

// The boundary data map Lambda_{from}^{to}(z): sends the from-trace of a
// kernel element of (tau - z) to its to-trace. Generalizes the
// Dirichlet-to-Neumann map.
struct BdmValue {
    Cplx z;
    Mat2 M;
};

namespace detail {

struct TraceColumns {
    Mat2 m;           // columns gamma(phi), gamma(psi)
    double col_scale; // generic column magnitude, for singularity tests
};

inline TraceColumns trace_columns(const ABPair& bc, const IvFrames& frames) {
    TraceColumns t;
    t.m.col(0) = apply_trace(bc, frames.phi);
    t.m.col(1) = apply_trace(bc, frames.psi);
    double bc_scale = std::max(max_abs(bc.A), max_abs(bc.B));
    t.col_scale = bc_scale * (frames.phi.norm() + frames.psi.norm());
    return t;
}

// z is an eigenvalue of H_bc iff the trace columns of a solution basis are
// rank deficient. The smallest singular value catches every failure mode:
// parallel columns, one vanishing column (simple eigenvalue hitting a basis
// solution), and the total collapse at a double eigenvalue.
inline bool is_spectral_point(const TraceColumns& t) {
    auto [smin, smax] = singular_range(t.m);
    return smin <= 1e-10 * std::max(smax, 1e-3 * t.col_scale);
}

}  // namespace detail

inline BdmValue bdm_eval(const Problem& prob, const ABPair& from_bc, const ABPair& to_bc,
                         Cplx z, double tol = kDefaultTol) {
    auto frames = iv_basis_frames(prob, z, tol);
    auto from_cols = detail::trace_columns(from_bc, frames);
    if (detail::is_spectral_point(from_cols))
        throw SpectralPoint("z is in the spectrum of the source boundary condition");
    auto to_cols = detail::trace_columns(to_bc, frames);
    return BdmValue{z, to_cols.m * from_cols.m.inverse()};
}

// Frames of the two-point normalized kernel basis (u1, u2).
struct FundamentalFrames {
    BoundaryFrame u1, u2;
};

inline FundamentalFrames fundamental_frames(const Problem& prob, Cplx z, double tol = kDefaultTol) {
    auto frames = iv_basis_frames(prob, z, tol);
    Mat2 endpoints = mat2(frames.phi.ua, frames.psi.ua, frames.phi.ub, frames.psi.ub);
    if (std::abs(endpoints.determinant()) < 1e-10 * std::max(max_abs(endpoints), 1e-300))
        throw DirichletEigenvalue("z is a Dirichlet eigenvalue");
    Mat2 coef = endpoints.inverse() * mat2(0, 1, 1, 0);
    auto mix = [&](int col) {
        Cplx c1 = coef(0, col), c2 = coef(1, col);
        return BoundaryFrame{c1 * frames.phi.ua + c2 * frames.psi.ua,
                             c1 * frames.phi.pua + c2 * frames.psi.pua,
                             c1 * frames.phi.ub + c2 * frames.psi.ub,
                             c1 * frames.phi.pub + c2 * frames.psi.pub};
    };
    return {mix(0), mix(1)};
}

// Dirichlet-to-Neumann matrix assembled from the normalized kernel frames.
// This is the independent route used to cross-check the general evaluation.
inline Mat2 dirichlet_to_neumann(const Problem& prob, Cplx z, double tol = kDefaultTol) {
    auto f = fundamental_frames(prob, z, tol);
    return mat2(f.u2.pua, f.u1.pua, -f.u2.pub, -f.u1.pub);
}

// Linear fractional route through the Dirichlet pivot:
//   Lambda = (D' + N' L)(D + N L)^{-1},  L the Dirichlet-to-Neumann matrix.
inline BdmValue bdm_via_fractional(const Problem& prob, const ABPair& from_bc,
                                   const ABPair& to_bc, Cplx z, double tol = kDefaultTol) {
    Mat2 dn = dirichlet_to_neumann(prob, z, tol);
    auto tf = trace_matrices(from_bc);
    auto tt = trace_matrices(to_bc);
    Mat2 denom = tf.D + tf.N * dn;
    auto [smin, smax] = singular_range(denom);
    if (smin < 1e-10 * std::max(smax, 1e-300))
        throw SpectralPoint("z is in the spectrum of the source boundary condition");
    return BdmValue{z, (tt.D + tt.N * dn) * denom.inverse()};
}

// Residual of the composition law Lambda_{2}^{3} Lambda_{1}^{2} = Lambda_{1}^{3}.
inline double bdm_compose_check(const Problem& prob, const ABPair& bc1, const ABPair& bc2,
                                const ABPair& bc3, Cplx z, double tol = kDefaultTol) {
    Mat2 l12 = bdm_eval(prob, bc1, bc2, z, tol).M;
    Mat2 l23 = bdm_eval(prob, bc2, bc3, z, tol).M;
    Mat2 l13 = bdm_eval(prob, bc1, bc3, z, tol).M;
    return max_abs(l23 * l12 - l13);
}

// Both eigenvalues of the Hermitian part of Lambda S^*; the Herglotz
// property demands they be positive in the open upper half plane.
inline std::pair<double, double> herglotz_probe(const Problem& prob, const ABPair& from_bc,
                                                const ABPair& to_bc, Cplx z,
                                                double tol = kDefaultTol) {
    if (!(z.imag() > 0.0)) throw BadInterval("herglotz probe needs Im z > 0");
    Mat2 s = connection_matrices(to_bc, from_bc).S;
    if (rank2x2(s) < 2)
        throw SingularS("connection matrix S is not invertible; use the rank-1 scalar instead");
    Mat2 m = bdm_eval(prob, from_bc, to_bc, z, tol).M * s.adjoint();
    return hermitian_imag_eigs(m);
}

// Large-|z| diagnostics of the diagonal entries of the map from a separated
// condition to its quarter-turn rotation, against the classical m-function
// limits: the (1,1) entry tends to cot(theta_a), or to i z^{1/2} (principal
// branch) when theta_a = 0; the (2,2) entry to cot(theta_b), or i z^{1/2}
// when theta_b = 0 (the right m-function tends to the negative of these).
// Defined for p = r = 1 problems only.
//
// Each diagonal entry depends on just one solution pinned at the opposite
// endpoint, so it is computed by shooting from that endpoint toward the
// probe; this stays well conditioned at heights where a two-solution basis
// degenerates.
struct MAsymptoticsRow {
    double height;  // y, probed at z = i y
    Cplx entry11, entry22;
    double dev11, dev22;  // distance to the predicted limit (relative in the sqrt regimes)
};

inline std::vector<MAsymptoticsRow> m_asymptotics(const Problem& prob, const SeparatedBC& sep,
                                                  const std::vector<double>& heights,
                                                  double tol = kDefaultTol) {
    for (int i = 0; i <= 16; ++i) {
        double x = prob.a + (prob.b - prob.a) * i / 16.0;
        if (std::abs(prob.p(x) - 1.0) > 1e-12 || std::abs(prob.r(x) - 1.0) > 1e-12)
            throw WrongCoefficients("m-function asymptotics assume p = r = 1");
    }
    const double half_pi = 0.5 * std::numbers::pi;
    auto rotate = [&](double t) {
        t += half_pi;
        if (t >= std::numbers::pi) t -= std::numbers::pi;
        return t;
    };
    double ta = sep.theta_a, tb = sep.theta_b;
    double ra = rotate(ta), rb = rotate(tb);

    std::vector<MAsymptoticsRow> rows;
    for (double y : heights) {
        Cplx z(0.0, y);
        // solution obeying the condition at b, evaluated at a
        auto v = iv_frame_from_b(prob, z, std::sin(tb), std::cos(tb), tol);
        // solution obeying the condition at a, evaluated at b
        auto w = iv_frame(prob, z, std::sin(ta), -std::cos(ta), tol);

        MAsymptoticsRow row;
        row.height = y;
        row.entry11 = (std::cos(ra) * v.ua + std::sin(ra) * v.pua) /
                      (std::cos(ta) * v.ua + std::sin(ta) * v.pua);
        row.entry22 = (std::cos(rb) * w.ub - std::sin(rb) * w.pub) /
                      (std::cos(tb) * w.ub - std::sin(tb) * w.pub);
        Cplx root = kImag * std::sqrt(z);
        row.dev11 = ta != 0.0 ? std::abs(row.entry11 - 1.0 / std::tan(ta))
                              : std::abs(row.entry11 / root - 1.0);
        row.dev22 = tb != 0.0 ? std::abs(row.entry22 - 1.0 / std::tan(tb))
                              : std::abs(row.entry22 / root - 1.0);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace slkrein
