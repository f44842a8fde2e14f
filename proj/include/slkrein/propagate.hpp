#pragma once

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <memory>
#include <vector>

#include "slkrein/errors.hpp"
#include "slkrein/problem.hpp"
#include "slkrein/quadrature.hpp"
#include "slkrein/types.hpp"

namespace slkrein {

inline constexpr double kDefaultTol = 1e-10;

// Boundary values of a solution: (u(a), u^{[1]}(a), u(b), u^{[1]}(b)),
// where u^{[1]} = p u' is the quasi-derivative.
struct BoundaryFrame {
    Cplx ua, pua, ub, pub;

    BoundaryFrame conj() const {
        return {std::conj(ua), std::conj(pua), std::conj(ub), std::conj(pub)};
    }
    double norm() const {
        return std::sqrt(std::norm(ua) + std::norm(pua) + std::norm(ub) + std::norm(pub));
    }
};

namespace detail {

using IvState = std::array<Cplx, 2>;  // (u, pu)

struct QuasiDerivativeSystem {
    const Problem* prob;
    Cplx z;
    void operator()(const IvState& y, IvState& dy, double x) const {
        dy[0] = y[1] / prob->p(x);
        dy[1] = (prob->q(x) - z * prob->r(x)) * y[0];
    }
};

// Advance (u,pu) from x0 to x1 (either direction) with adaptive error
// control. Coefficient knots never lie strictly between x0 and x1 by
// construction of the calling grids.
inline void advance(const Problem& prob, Cplx z, IvState& y, double x0, double x1, double tol) {
    namespace od = boost::numeric::odeint;
    if (x1 == x0) return;
    QuasiDerivativeSystem sys{&prob, z};
    double scale = std::sqrt(std::max(1.0, std::abs(z)));
    double dir = x1 > x0 ? 1.0 : -1.0;
    double dt = dir * std::min(std::abs(x1 - x0), 0.1 / scale);
    try {
        auto stepper = od::make_controlled(tol, tol, od::runge_kutta_dopri5<IvState>());
        od::integrate_adaptive(stepper, sys, y, x0, x1, dt);
    } catch (const std::exception& e) {
        throw IntegratorFailure(e.what());
    }
    if (!(std::isfinite(y[0].real()) && std::isfinite(y[1].real())))
        throw IntegratorFailure("solution not finite");
}

}  // namespace detail

// One solution of (tau - z)u = 0 sampled on a shared grid, carrying both u
// and the quasi-derivative pu = p u'.
struct SolutionPath {
    Cplx z;
    GridPtr grid;
    std::vector<Cplx> u;
    std::vector<Cplx> pu;
    std::vector<Cplx> du;  // u' = pu/p, kept for interpolation
    double tol = kDefaultTol;

    size_t size() const { return grid->size(); }

    BoundaryFrame frame() const {
        return {u.front(), pu.front(), u.back(), pu.back()};
    }

    // Cubic Hermite evaluation between grid points.
    Cplx eval_u(double x) const {
        const auto& xs = grid->x;
        if (x <= xs.front()) return u.front();
        if (x >= xs.back()) return u.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        size_t i = static_cast<size_t>(it - xs.begin());
        double h = xs[i] - xs[i - 1];
        double t = (x - xs[i - 1]) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * u[i - 1] + h10 * h * du[i - 1] + h01 * u[i] + h11 * h * du[i];
    }
};

// Solve the initial value problem u(a)=u0, u^{[1]}(a)=pu0 on the shared grid.
inline SolutionPath solve_iv(const Problem& prob, Cplx z, Cplx u0, Cplx pu0,
                             double tol = kDefaultTol, GridPtr grid = nullptr) {
    if (!(tol > 0.0)) throw BadInterval("tol must be positive");
    if (!grid) grid = make_grid(prob, std::abs(z));
    SolutionPath path;
    path.z = z;
    path.grid = grid;
    path.tol = tol;
    path.u.resize(grid->size());
    path.pu.resize(grid->size());
    path.du.resize(grid->size());
    detail::IvState y{u0, pu0};
    path.u[0] = u0;
    path.pu[0] = pu0;
    for (size_t i = 1; i < grid->size(); ++i) {
        detail::advance(prob, z, y, grid->x[i - 1], grid->x[i], tol);
        path.u[i] = y[0];
        path.pu[i] = y[1];
    }
    for (size_t i = 0; i < grid->size(); ++i) path.du[i] = path.pu[i] / prob.p(grid->x[i]);
    return path;
}

// Endpoint frame of the initial value solution, skipping path storage.
inline BoundaryFrame iv_frame(const Problem& prob, Cplx z, Cplx u0, Cplx pu0,
                              double tol = kDefaultTol) {
    auto bounds = prob.segment_bounds();
    detail::IvState y{u0, pu0};
    for (size_t i = 1; i < bounds.size(); ++i)
        detail::advance(prob, z, y, bounds[i - 1], bounds[i], tol);
    return {u0, pu0, y[0], y[1]};
}

// Same, but shooting from b down to a; the stable direction for data tied
// to the right endpoint at large |z|.
inline BoundaryFrame iv_frame_from_b(const Problem& prob, Cplx z, Cplx ub, Cplx pub,
                                     double tol = kDefaultTol) {
    auto bounds = prob.segment_bounds();
    detail::IvState y{ub, pub};
    for (size_t i = bounds.size() - 1; i > 0; --i)
        detail::advance(prob, z, y, bounds[i], bounds[i - 1], tol);
    return {y[0], y[1], ub, pub};
}

// Frames of the natural initial value basis: phi with (u,pu)(a) = (1,0) and
// psi with (u,pu)(a) = (0,1).
struct IvFrames {
    BoundaryFrame phi, psi;
};

inline IvFrames iv_basis_frames(const Problem& prob, Cplx z, double tol = kDefaultTol) {
    return {iv_frame(prob, z, 1.0, 0.0, tol), iv_frame(prob, z, 0.0, 1.0, tol)};
}

inline SolutionPath combine(Cplx c1, const SolutionPath& f, Cplx c2, const SolutionPath& g) {
    if (!f.grid->same_as(*g.grid) || f.z != g.z) throw GridMismatch("paths not on a common grid");
    SolutionPath out;
    out.z = f.z;
    out.grid = f.grid;
    out.tol = std::max(f.tol, g.tol);
    out.u.resize(f.size());
    out.pu.resize(f.size());
    out.du.resize(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        out.u[i] = c1 * f.u[i] + c2 * g.u[i];
        out.pu[i] = c1 * f.pu[i] + c2 * g.pu[i];
        out.du[i] = c1 * f.du[i] + c2 * g.du[i];
    }
    return out;
}

// The two-point normalized kernel basis: u1 vanishing at a with u1(b)=1,
// u2 vanishing at b with u2(a)=1. Fails when z is a Dirichlet eigenvalue.
struct FundamentalPair {
    SolutionPath u1, u2;
    Cplx z;
};

struct IvBasis {
    SolutionPath phi, psi;
};

inline IvBasis solve_iv_basis(const Problem& prob, Cplx z, double tol = kDefaultTol,
                              GridPtr grid = nullptr) {
    if (!grid) grid = make_grid(prob, std::abs(z));
    return {solve_iv(prob, z, 1.0, 0.0, tol, grid), solve_iv(prob, z, 0.0, 1.0, tol, grid)};
}

inline FundamentalPair fundamental_pair_from_basis(const IvBasis& basis) {
    const auto fphi = basis.phi.frame(), fpsi = basis.psi.frame();
    Mat2 endpoints = mat2(fphi.ua, fpsi.ua, fphi.ub, fpsi.ub);
    double det = std::abs(endpoints.determinant());
    if (det < 1e-10 * std::max(max_abs(endpoints), 1e-300))
        throw DirichletEigenvalue("two-point normalization matrix is singular");
    Mat2 targets = mat2(0.0, 1.0, 1.0, 0.0);  // columns: wanted endpoint values of u1, u2
    Mat2 coef = endpoints.inverse() * targets;
    FundamentalPair pair;
    pair.z = basis.phi.z;
    pair.u1 = combine(coef(0, 0), basis.phi, coef(1, 0), basis.psi);
    pair.u2 = combine(coef(0, 1), basis.phi, coef(1, 1), basis.psi);
    return pair;
}

inline FundamentalPair fundamental_pair(const Problem& prob, Cplx z, double tol = kDefaultTol,
                                        GridPtr grid = nullptr) {
    return fundamental_pair_from_basis(solve_iv_basis(prob, z, tol, grid));
}

// Wronskian W(f,g) = f g^{[1]} - f^{[1]} g, evaluated at a; constancy along
// the grid is asserted as an integration sanity check.
inline Cplx wronskian(const SolutionPath& f, const SolutionPath& g) {
    if (!f.grid->same_as(*g.grid) || f.z != g.z) throw GridMismatch("wronskian needs a common grid and z");
    auto w_at = [&](size_t i) { return f.u[i] * g.pu[i] - f.pu[i] * g.u[i]; };
    Cplx w0 = w_at(0);
    double scale = 0.0, dev = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
        scale = std::max(scale, std::abs(f.u[i]) * std::abs(g.pu[i]) + std::abs(f.pu[i]) * std::abs(g.u[i]));
        dev = std::max(dev, std::abs(w_at(i) - w0));
    }
    double tol = std::max(f.tol, g.tol);
    if (dev > 100.0 * tol * std::max(1.0, scale))
        throw IntegratorFailure("wronskian drifts along the grid");
    return w0;
}

// L^2((a,b); r dx) inner product, conjugate linear in the first argument.
inline Cplx l2_inner(const SolutionPath& f, const SolutionPath& g, const Problem& prob) {
    if (!f.grid->same_as(*g.grid)) throw GridMismatch("inner product needs a common grid");
    return integrate_fn<Cplx>(*f.grid, [&](size_t i, double x) {
        return prob.r(x) * std::conj(f.u[i]) * g.u[i];
    });
}

// For solutions at distinct spectral parameters the weighted product is a
// total derivative of their Wronskian, so the integral reduces to frames.
inline Cplx product_integral_by_wronskian(const BoundaryFrame& f_z1, Cplx z1,
                                          const BoundaryFrame& g_z2, Cplx z2) {
    Cplx wb = f_z1.ub * g_z2.pub - f_z1.pub * g_z2.ub;
    Cplx wa = f_z1.ua * g_z2.pua - f_z1.pua * g_z2.ua;
    return (wb - wa) / (z1 - z2);
}

// Bases of the deficiency spaces ker(H_max -/+ i) with their Gram matrices,
// computed by quadrature and cross-checked against the frame formulas.
struct DeficiencyBasis {
    FundamentalPair plus;   // z = +i
    FundamentalPair minus;  // z = -i
    Mat2 g_plus, g_minus;   // G[j][k] = (u_{j+1}, u_{k+1}) in L^2(r dx)
};

inline Mat2 deficiency_gram_by_frames(const FundamentalPair& plus, const FundamentalPair& minus) {
    const BoundaryFrame p[2] = {plus.u1.frame(), plus.u2.frame()};
    const BoundaryFrame m[2] = {minus.u1.frame(), minus.u2.frame()};
    Mat2 g;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            g(j, k) = product_integral_by_wronskian(m[j], Cplx(0, -1), p[k], Cplx(0, 1));
    return g;
}

inline DeficiencyBasis deficiency_basis(const Problem& prob, double tol = kDefaultTol) {
    DeficiencyBasis out;
    auto grid = make_grid(prob, 1.0);
    out.plus = fundamental_pair(prob, Cplx(0, 1), tol, grid);
    out.minus = fundamental_pair(prob, Cplx(0, -1), tol, grid);

    const SolutionPath* up[2] = {&out.plus.u1, &out.plus.u2};
    const SolutionPath* um[2] = {&out.minus.u1, &out.minus.u2};
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            out.g_plus(j, k) = l2_inner(*up[j], *up[k], prob);
            out.g_minus(j, k) = l2_inner(*um[j], *um[k], prob);
        }

    Mat2 g_frames = deficiency_gram_by_frames(out.plus, out.minus);
    double mism = max_abs(out.g_plus - g_frames);
    mism = std::max(mism, max_abs(out.g_minus - g_frames.conjugate()));
    if (mism > 1e3 * tol)
        throw GramMismatch("quadrature and frame Gram matrices disagree by " + std::to_string(mism));
    return out;
}

}  // namespace slkrein
