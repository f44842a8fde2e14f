#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "slkrein/bdm.hpp"
#include "slkrein/spectra.hpp"

namespace slkrein {

// Integer-valued piecewise constant function on the line, left-closed:
// value_at(lambda) is `to` of the last jump with at <= lambda.
struct StepFunction {
    struct Jump {
        double at;
        int to;
    };
    int base = 0;
    std::vector<Jump> jumps;

    int value_at(double lam) const {
        int v = base;
        for (const auto& j : jumps) {
            if (lam >= j.at)
                v = j.to;
            else
                break;
        }
        return v;
    }
};

namespace detail {

// det Lambda_{from}^{to}(z) as a ratio of trace-column determinants; throws
// when the path runs into either spectrum.
struct DetLambda {
    const Problem* prob;
    ABPair from, to;
    double tol;

    Cplx operator()(Cplx z) const {
        auto frames = iv_basis_frames(*prob, z, tol);
        auto cf = trace_columns(from, frames);
        auto ct = trace_columns(to, frames);
        Cplx df = cf.m.determinant(), dt = ct.m.determinant();
        double scale_f = std::max(cf.col_scale * cf.col_scale, 1e-300);
        double scale_t = std::max(ct.col_scale * ct.col_scale, 1e-300);
        if (std::abs(df) < 1e-13 * scale_f || std::abs(dt) < 1e-13 * scale_t)
            throw PathThroughSpectrum("determinant collapses at z");
        return dt / df;
    }
};

inline double lower_spectral_bound(const Problem& prob, const ABPair& a, const ABPair& b,
                                   double tol) {
    double ga = lowest_eigenvalues(prob, a, 1, 1e-9, tol)[0];
    double gb = lowest_eigenvalues(prob, b, 1, 1e-9, tol)[0];
    return std::min(ga, gb);
}

}  // namespace detail

// Continuous branch of ln(eta det Lambda) along a path. The unimodular
// normalizer eta makes the determinant positive at the (real) starting
// point, which must sit below both spectra.
struct LogDetPath {
    struct Point {
        Cplx z;
        Cplx logdet;
    };
    std::vector<Point> points;
    Cplx eta{1.0, 0.0};
    double z_reference = 0.0;
};

inline LogDetPath logdet_track(const Problem& prob, const ABPair& from_bc, const ABPair& to_bc,
                               const std::vector<Cplx>& path, double tol = kDefaultTol) {
    if (path.empty()) throw BadInterval("empty path");
    if (std::abs(path.front().imag()) > 0.0)
        throw BadInterval("path must start at a real point below both spectra");
    detail::DetLambda det{&prob, from_bc, to_bc, tol};

    LogDetPath out;
    out.z_reference = path.front().real();
    Cplx d0 = det(path.front());
    out.eta = std::conj(d0 / std::abs(d0));
    Cplx logdet = std::log(std::abs(d0));
    out.points.push_back({path.front(), logdet});

    Cplx prev_z = path.front(), prev_d = d0;
    for (size_t i = 1; i < path.size(); ++i) {
        // adaptive bisection keeps each phase increment below pi/2
        std::vector<Cplx> pending{path[i]};
        while (!pending.empty()) {
            Cplx target = pending.back();
            Cplx d = det(target);
            double dphi = std::arg(d / prev_d);
            if (std::abs(dphi) >= std::numbers::pi / 2) {
                if (pending.size() > 60) throw PathThroughSpectrum("phase cannot be resolved");
                pending.push_back(0.5 * (prev_z + target));
                continue;
            }
            logdet += std::log(d / prev_d);
            prev_z = target;
            prev_d = d;
            pending.pop_back();
        }
        out.points.push_back({path[i], logdet});
    }
    return out;
}

struct TraceCheck {
    Cplx lhs, rhs;
    double residual;
    int used_from = 0, used_to = 0;  // eigenvalues retained below the cutoff
    double cutoff = 0.0;
};

// Trace of the resolvent difference: eigenvalue sums on the left against the
// logarithmic derivative of det Lambda on the right. Both spectra are
// truncated at a common cutoff placed in a shared spectral gap, so the tail
// contributions pair off and cancel.
inline TraceCheck trace_formula_check(const Problem& prob, const ABPair& from_bc,
                                      const ABPair& to_bc, Cplx z, int n_eigs,
                                      double guard_tol = 1e-6, double tol = kDefaultTol) {
    double lo = detail::lower_spectral_bound(prob, from_bc, to_bc, tol) - 1.0;
    double lio = prob.liouville_length();
    double k_top = (n_eigs + 2) * std::numbers::pi / lio;
    double top = k_top * k_top + std::abs(lo);

    std::vector<double> from_list, to_list;
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            from_list = eigenvalues(prob, from_bc, {lo, top}, 1e-9, tol).flatten();
            to_list = eigenvalues(prob, to_bc, {lo, top}, 1e-9, tol).flatten();
        } catch (const WindowEdgeEigenvalue&) {
            top += 0.57;
            continue;
        }
        if (static_cast<int>(from_list.size()) >= n_eigs &&
            static_cast<int>(to_list.size()) >= n_eigs)
            break;
        double k = std::sqrt(top);
        top = (k + 2 * std::numbers::pi / lio) * (k + 2 * std::numbers::pi / lio);
    }
    if (static_cast<int>(from_list.size()) < n_eigs || static_cast<int>(to_list.size()) < n_eigs)
        throw InsufficientEigs("could not collect the requested eigenvalue count");

    // cutoff at the widest merged gap among the top quarter of the window
    std::vector<double> merged = from_list;
    merged.insert(merged.end(), to_list.begin(), to_list.end());
    std::sort(merged.begin(), merged.end());
    double cut = merged.back() + 1.0;
    double best_gap = -1.0;
    double quarter = merged.back() - 0.25 * (merged.back() - merged.front());
    for (size_t i = 1; i < merged.size(); ++i) {
        if (merged[i - 1] < quarter) continue;
        double gap = merged[i] - merged[i - 1];
        if (gap > best_gap) {
            best_gap = gap;
            cut = 0.5 * (merged[i] + merged[i - 1]);
        }
    }

    TraceCheck out;
    out.cutoff = cut;
    out.lhs = 0.0;
    double from_top = lo, to_top = lo;
    for (double lam : to_list)
        if (lam <= cut) {
            out.lhs += 1.0 / (lam - z);
            ++out.used_to;
            to_top = lam;
        }
    for (double lam : from_list)
        if (lam <= cut) {
            out.lhs -= 1.0 / (lam - z);
            ++out.used_from;
            from_top = lam;
        }
    double tail = std::abs(1.0 / (to_top - z) - 1.0 / (from_top - z));
    if (tail > guard_tol / 10.0)
        throw InsufficientEigs("estimated truncation tail " + std::to_string(tail));

    detail::DetLambda det{&prob, from_bc, to_bc, tol};
    double h = 1e-5 * std::max(1.0, std::abs(z));
    out.rhs = -std::log(det(z + h) / det(z - h)) / (2.0 * h);
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

struct DetRatio {
    Cplx value;
    bool degenerate_from = false;  // det N of the source vanishes; value is then 0
};

// det(N_from)/det(N_to) times det Lambda: the two-by-two reduction of the
// symmetrized perturbation determinant of the pair.
inline DetRatio det_ratio(const Problem& prob, const ABPair& from_bc, const ABPair& to_bc, Cplx z,
                          double tol = kDefaultTol) {
    Mat2 n_from = trace_matrices(from_bc).N;
    Mat2 n_to = trace_matrices(to_bc).N;
    if (rank2x2(n_to) < 2) throw DegenerateN("det N of the target vanishes");
    DetRatio out;
    out.degenerate_from = rank2x2(n_from) < 2;
    detail::DetLambda det{&prob, from_bc, to_bc, tol};
    out.value = n_from.determinant() / n_to.determinant() * det(z);
    return out;
}

// Difference of eigenvalue counting functions, N_from - N_to, normalized to
// vanish below both spectra.
inline StepFunction ssf_counting(const Problem& prob, const ABPair& from_bc, const ABPair& to_bc,
                                 double lambda_max, double tol = kDefaultTol) {
    if (!std::isfinite(lambda_max)) throw BadInterval("lambda_max must be finite");
    double lo = detail::lower_spectral_bound(prob, from_bc, to_bc, tol) - 1.0;
    double top = lambda_max + 0.5 * detail::spacing_estimate(lambda_max, prob.liouville_length());

    Spectrum sp_from, sp_to;
    for (int attempt = 0;; ++attempt) {
        try {
            sp_from = eigenvalues(prob, from_bc, {lo, top}, 1e-9, tol);
            sp_to = eigenvalues(prob, to_bc, {lo, top}, 1e-9, tol);
            break;
        } catch (const WindowEdgeEigenvalue&) {
            if (attempt > 6) throw;
            top += 0.61;
        }
    }

    struct Event {
        double at;
        int delta;
    };
    std::vector<Event> events;
    for (const auto& e : sp_from.eigs)
        if (e.lambda <= lambda_max) events.push_back({e.lambda, e.multiplicity});
    for (const auto& e : sp_to.eigs)
        if (e.lambda <= lambda_max) events.push_back({e.lambda, -e.multiplicity});
    std::sort(events.begin(), events.end(), [](auto& a, auto& b) { return a.at < b.at; });

    StepFunction xi;
    int value = 0;
    size_t i = 0;
    while (i < events.size()) {
        double at = events[i].at;
        int delta = 0;
        // shared eigenvalues of the two operators merge into one net jump
        while (i < events.size() && events[i].at - at < 1e-6 * (1.0 + std::abs(at))) {
            delta += events[i].delta;
            ++i;
        }
        if (delta != 0) {
            value += delta;
            xi.jumps.push_back({at, value});
        }
    }
    return xi;
}

// Boundary values of the tracked phase: xi(lambda) from Im ln(eta det Lambda)
// just above the axis, branch carried from a real point below both spectra.
inline std::vector<double> ssf_boundary(const Problem& prob, const ABPair& from_bc,
                                        const ABPair& to_bc, const std::vector<double>& lambdas,
                                        double epsilon, double tol = kDefaultTol) {
    if (!(epsilon > 0)) throw BadInterval("epsilon must be positive");
    if (lambdas.empty()) return {};
    double e0 = detail::lower_spectral_bound(prob, from_bc, to_bc, tol);
    double z0 = e0 - 1.0 - std::abs(e0);

    std::vector<size_t> order(lambdas.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return lambdas[a] < lambdas[b]; });

    std::vector<Cplx> path{Cplx(z0, 0.0), Cplx(z0, epsilon)};
    for (size_t idx : order) path.emplace_back(lambdas[idx], epsilon);
    auto track = logdet_track(prob, from_bc, to_bc, path, tol);

    std::vector<double> out(lambdas.size());
    for (size_t k = 0; k < order.size(); ++k) {
        double xi = track.points[k + 2].logdet.imag() / std::numbers::pi;
        if (std::abs(xi - std::lround(xi)) > 0.2)
            throw NonIntegerValue("xi = " + std::to_string(xi) +
                                  "; epsilon too large or branch slipped");
        out[order[k]] = xi;
    }
    return out;
}

}  // namespace slkrein
