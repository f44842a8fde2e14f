#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "slkrein/errors.hpp"
#include "slkrein/problem.hpp"
#include "slkrein/types.hpp"

namespace slkrein {

// Output grid shared by all solutions of one (problem, |z|) evaluation.
// Piecewise uniform: uniform spacing inside every coefficient smoothness
// segment, so fixed-stencil cell quadrature stays fourth order.
struct Grid {
    std::vector<double> x;
    std::vector<size_t> seg_start;  // first point index of each uniform segment, plus x.size()-1

    size_t size() const { return x.size(); }
    double front() const { return x.front(); }
    double back() const { return x.back(); }

    bool same_as(const Grid& other) const {
        return this == &other || x == other.x;
    }
};

using GridPtr = std::shared_ptr<const Grid>;

// Cell density: at least 256 cells overall, at least 4 per segment, and
// enough to keep ~25 points per local oscillation wavelength at energy |z|.
inline GridPtr make_grid(const Problem& prob, double abs_z) {
    auto bounds = prob.segment_bounds();
    double len = prob.length();
    double lio = prob.liouville_length();
    double target = std::max(256.0, std::ceil(4.0 * lio * std::sqrt(std::max(1.0, abs_z))));

    auto grid = std::make_shared<Grid>();
    grid->x.push_back(bounds.front());
    for (size_t s = 0; s + 1 < bounds.size(); ++s) {
        double s0 = bounds[s], s1 = bounds[s + 1];
        auto cells = static_cast<size_t>(std::max(4.0, std::ceil(target * (s1 - s0) / len)));
        grid->seg_start.push_back(grid->x.size() - 1);
        for (size_t i = 1; i <= cells; ++i)
            grid->x.push_back(i == cells ? s1 : s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(cells));
    }
    grid->seg_start.push_back(grid->x.size() - 1);
    return grid;
}

// Integral over each grid cell of the cubic through the four nearest samples;
// fourth-order accurate for integrands smooth within a segment. The sampler
// is called as fn(index, x) where x is nudged one-sidedly into the segment at
// its boundary points, so integrands carrying piecewise coefficients are
// evaluated with the correct limit on either side of a jump.
template <class T, class Fn>
std::vector<T> cell_integrals_fn(const Grid& g, Fn&& fn) {
    std::vector<T> cells(g.size() - 1);
    std::vector<T> f;
    for (size_t s = 0; s + 1 < g.seg_start.size(); ++s) {
        size_t j0 = g.seg_start[s], j1 = g.seg_start[s + 1];
        size_t n = j1 - j0;
        double h = (g.x[j1] - g.x[j0]) / static_cast<double>(n);
        double nudge = 1e-12 * (g.x[j1] - g.x[j0]);
        f.assign(n + 1, T{});
        for (size_t j = j0; j <= j1; ++j) {
            double x = g.x[j];
            if (j == j0)
                x += nudge;
            else if (j == j1)
                x -= nudge;
            f[j - j0] = fn(j, x);
        }
        for (size_t k = 0; k < n; ++k) {
            T v;
            if (k == 0)
                v = (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
            else if (k + 1 == n)
                v = (9.0 * f[n] + 19.0 * f[n - 1] - 5.0 * f[n - 2] + f[n - 3]) / 24.0;
            else
                v = (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]) / 24.0;
            cells[j0 + k] = v * h;
        }
    }
    return cells;
}

template <class T>
std::vector<T> cell_integrals(const Grid& g, const std::vector<T>& f) {
    if (f.size() != g.size()) throw GridMismatch("integrand not sampled on this grid");
    return cell_integrals_fn<T>(g, [&](size_t i, double) { return f[i]; });
}

template <class T>
T integrate(const Grid& g, const std::vector<T>& f) {
    auto cells = cell_integrals(g, f);
    T acc{};
    for (const T& c : cells) acc += c;
    return acc;
}

// Integrate fn(index, x) over the whole grid with one-sided segment sampling.
template <class T, class Fn>
T integrate_fn(const Grid& g, Fn&& fn) {
    auto cells = cell_integrals_fn<T>(g, std::forward<Fn>(fn));
    T acc{};
    for (const T& c : cells) acc += c;
    return acc;
}

// Prefix sums: out[i] = integral from x[0] to x[i].
template <class T>
std::vector<T> cumulative_integral(const Grid& g, const std::vector<T>& f) {
    auto cells = cell_integrals(g, f);
    std::vector<T> acc(g.size());
    acc[0] = T{};
    for (size_t i = 1; i < g.size(); ++i) acc[i] = acc[i - 1] + cells[i - 1];
    return acc;
}

template <class T, class Fn>
std::vector<T> cumulative_integral_fn(const Grid& g, Fn&& fn) {
    auto cells = cell_integrals_fn<T>(g, std::forward<Fn>(fn));
    std::vector<T> acc(g.size());
    acc[0] = T{};
    for (size_t i = 1; i < g.size(); ++i) acc[i] = acc[i - 1] + cells[i - 1];
    return acc;
}

}  // namespace slkrein
