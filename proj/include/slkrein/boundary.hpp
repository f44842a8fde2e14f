#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "slkrein/errors.hpp"
#include "slkrein/propagate.hpp"
#include "slkrein/types.hpp"

namespace slkrein {

// Self-adjoint boundary condition in matrix-pair form: the domain is cut out
// by A (u(a), u^{[1]}(a))^T = B (u(b), u^{[1]}(b))^T, subject to
// rank(A B) = 2 and A J A^* = B J B^* with J the standard symplectic form.
struct ABPair {
    Mat2 A, B;
};

struct SeparatedBC {
    double theta_a = 0.0;  // in [0, pi)
    double theta_b = 0.0;  // in [0, pi)
};

struct CoupledBC {
    double phi = 0.0;  // in [0, 2*pi)
    Mat2r F = Mat2r::Identity();  // det F = 1
};

// The same condition written against Dirichlet/Neumann traces:
// X_D gamma_D u + X_N gamma_N u = 0.
struct DNPair {
    Mat2 XD, XN;
};

struct UnitaryBC {
    Mat2 U;
};

// Coefficients expressing a trace map through the Dirichlet and Neumann
// traces, together with the complementary trace coefficients.
struct TraceMatrices {
    Mat2 D, N, Dperp, Nperp;
};

inline ABPair validate_ab(const Mat2& A, const Mat2& B) {
    if (rank2x4(A, B) != 2) throw RankDeficient("rank(A B) != 2");
    Mat2 J = mat2(0, -1, 1, 0);
    Mat2 lhs = A * J * A.adjoint(), rhs = B * J * B.adjoint();
    double scale = std::max({max_abs(lhs), max_abs(rhs), max_abs(A * A.adjoint()), max_abs(B * B.adjoint()), 1e-300});
    if (max_abs(lhs - rhs) > 1e-12 * scale) throw NotLagrangian("A J A* != B J B*");
    return ABPair{A, B};
}

inline ABPair dirichlet_bc() {
    return ABPair{mat2(1, 0, 0, 0), mat2(0, 0, -1, 0)};
}

inline ABPair neumann_bc() {
    return ABPair{mat2(0, 1, 0, 0), mat2(0, 0, 0, 1)};
}

inline ABPair separated_to_ab(const SeparatedBC& s) {
    Mat2 A = mat2(std::cos(s.theta_a), std::sin(s.theta_a), 0, 0);
    Mat2 B = mat2(0, 0, -std::cos(s.theta_b), std::sin(s.theta_b));
    return ABPair{A, B};
}

inline ABPair coupled_to_ab(const CoupledBC& c) {
    Cplx phase = std::exp(kImag * c.phi);
    return ABPair{phase * c.F.cast<Cplx>(), Mat2::Identity()};
}

inline ABPair kvn_like_from_coupled(const CoupledBC& c) { return coupled_to_ab(c); }

inline ABPair periodic_bc() { return coupled_to_ab({0.0, Mat2r::Identity()}); }
inline ABPair antiperiodic_bc() { return coupled_to_ab({std::numbers::pi, Mat2r::Identity()}); }

inline TraceMatrices trace_matrices(const ABPair& ab) {
    TraceMatrices t;
    t.D = mat2(ab.A(0, 0), -ab.B(0, 0), ab.A(1, 0), -ab.B(1, 0));
    t.N = mat2(ab.A(0, 1), ab.B(0, 1), ab.A(1, 1), ab.B(1, 1));
    Mat2 m = t.D * t.D.adjoint() + t.N * t.N.adjoint();
    // The rank condition makes DD* + NN* positive definite.
    auto [smin, smax] = singular_range(m);
    if (!(smin > 1e-14 * std::max(smax, 1e-300)))
        throw RankDeficient("trace normal matrix is singular");
    Mat2 minv = m.inverse();
    t.Dperp = -minv * t.N;
    t.Nperp = minv * t.D;
    return t;
}

inline DNPair ab_to_dn(const ABPair& ab) {
    auto t = trace_matrices(ab);
    return DNPair{t.D, t.N};
}

inline ABPair dn_to_ab(const DNPair& dn) {
    Mat2 A = mat2(dn.XD(0, 0), dn.XN(0, 0), dn.XD(1, 0), dn.XN(1, 0));
    Mat2 B = mat2(-dn.XD(0, 1), dn.XN(0, 1), -dn.XD(1, 1), dn.XN(1, 1));
    return validate_ab(A, B);
}

inline UnitaryBC dn_to_unitary(const DNPair& dn) {
    Mat2 m = dn.XD + kImag * dn.XN;  // invertible whenever (XD XN) has full rank
    UnitaryBC u{m.inverse() * (kImag * dn.XN - dn.XD)};
    if (max_abs(u.U * u.U.adjoint() - Mat2::Identity()) > 1e-10)
        throw NotLagrangian("produced matrix is not unitary; (XD, XN) invalid");
    return u;
}

inline DNPair unitary_to_dn(const UnitaryBC& u) {
    return DNPair{0.5 * kImag * (Mat2::Identity() - u.U), 0.5 * (u.U + Mat2::Identity())};
}

inline UnitaryBC ab_to_unitary(const ABPair& ab) { return dn_to_unitary(ab_to_dn(ab)); }

// Connection matrices between two trace maps:
//   gamma_to = T gamma_from + S gamma_from^perp.
struct ConnectionMatrices {
    Mat2 T, S;
};

inline ConnectionMatrices connection_matrices(const ABPair& to, const ABPair& from) {
    auto tf = trace_matrices(from);
    auto tt = trace_matrices(to);
    ConnectionMatrices c;
    c.T = tt.D * tf.Nperp.adjoint() - tt.N * tf.Dperp.adjoint();
    c.S = tt.N * tf.D.adjoint() - tt.D * tf.N.adjoint();
    return c;
}

// gamma_{A,B}(u) for a boundary frame.
inline Vec2 apply_trace(const ABPair& ab, const BoundaryFrame& f) {
    Vec2 va, vb;
    va << f.ua, f.pua;
    vb << f.ub, f.pub;
    return ab.A * va - ab.B * vb;
}

inline Vec2 dirichlet_trace(const BoundaryFrame& f) {
    Vec2 v;
    v << f.ua, f.ub;
    return v;
}

inline Vec2 neumann_trace(const BoundaryFrame& f) {
    Vec2 v;
    v << f.pua, -f.pub;
    return v;
}

namespace detail {

// Extract the real direction (cos t, sin t), t in [0, pi), from a complex
// 2-vector that is a unimodular multiple of a real one.
inline double rank1_angle(Cplx c1, Cplx c2) {
    Cplx phase = std::abs(c1) >= std::abs(c2) ? c1 / std::abs(c1) : c2 / std::abs(c2);
    double v1 = (c1 / phase).real(), v2 = (c2 / phase).real();
    double t = std::atan2(v2, v1);
    if (t < 0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    if (std::numbers::pi - t < 1e-12) t = 0.0;  // snap numerical pi to 0
    return t;
}

}  // namespace detail

// Unique canonical form: separated angles when rank(A) = 1, a phase and a
// real unimodular matrix when rank(A) = 2. The (phi, F) ~ (phi+pi, -F)
// ambiguity is resolved by making the first nonzero entry of F positive.
inline std::variant<SeparatedBC, CoupledBC> canonicalize(const ABPair& ab) {
    int ra = rank2x2(ab.A);
    if (ra == 0) throw RankDeficient("rank(A) = 0 is impossible for a valid pair");
    if (ra == 1) {
        Eigen::JacobiSVD<Mat2> sa(ab.A, Eigen::ComputeFullV);
        Vec2 rowa = sa.matrixV().col(0).conjugate();
        Eigen::JacobiSVD<Mat2> sb(ab.B, Eigen::ComputeFullV);
        Vec2 rowb = sb.matrixV().col(0).conjugate();
        SeparatedBC s;
        s.theta_a = detail::rank1_angle(rowa(0), rowa(1));
        // B row direction is (-cos theta_b, sin theta_b)
        s.theta_b = detail::rank1_angle(-rowb(0), rowb(1));
        return s;
    }
    Mat2 m = ab.B.inverse() * ab.A;
    Cplx det = m.determinant();
    double phi = 0.5 * std::arg(det);
    Mat2 f = std::exp(-kImag * phi) * m;
    double imag_part = f.imag().cwiseAbs().maxCoeff();
    if (imag_part > 1e-8 * std::max(1.0, max_abs(f)))
        throw NotLagrangian("coupled form is not a phase times a real matrix");
    Mat2r fr = f.real();
    // sign convention: first nonzero entry positive
    double lead = 0.0;
    for (int i = 0; i < 2 && lead == 0.0; ++i)
        for (int j = 0; j < 2 && lead == 0.0; ++j)
            if (std::abs(fr(i, j)) > 1e-12 * std::max(1.0, fr.cwiseAbs().maxCoeff())) lead = fr(i, j);
    if (lead < 0) {
        fr = -fr;
        phi += std::numbers::pi;
    }
    while (phi < 0) phi += 2 * std::numbers::pi;
    while (phi >= 2 * std::numbers::pi) phi -= 2 * std::numbers::pi;
    CoupledBC c{phi, fr};
    return c;
}

inline ABPair canonical_to_ab(const std::variant<SeparatedBC, CoupledBC>& c) {
    if (const auto* s = std::get_if<SeparatedBC>(&c)) return separated_to_ab(*s);
    return coupled_to_ab(std::get<CoupledBC>(c));
}

// Equality of the induced self-adjoint extensions, keyed by the unitary
// parametrization which labels extensions bijectively.
inline bool equivalent(const ABPair& x, const ABPair& y) {
    return max_abs(ab_to_unitary(x).U - ab_to_unitary(y).U) < 1e-10;
}

}  // namespace slkrein
