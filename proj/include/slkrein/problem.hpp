#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "slkrein/errors.hpp"

namespace slkrein {

// A coefficient function on [a,b]. Three representations are admitted:
// constants, piecewise constants on half-open cells [x_i, x_{i+1}), and
// linear interpolation of samples on a grid covering [a,b].
class Coefficient {
public:
    struct Constant {
        double value;
    };
    struct Piecewise {
        std::vector<double> breaks;  // strictly inside (a,b), sorted
        std::vector<double> values;  // one per cell, size = breaks.size()+1
    };
    struct Sampled {
        std::vector<double> x;  // strictly increasing, x.front()=a, x.back()=b
        std::vector<double> v;
    };

    Coefficient(double value) : rep_(Constant{value}) {}
    Coefficient(Constant c) : rep_(c) {}
    Coefficient(Piecewise p) : rep_(std::move(p)) {}
    Coefficient(Sampled s) : rep_(std::move(s)) {}

    static Coefficient constant(double v) { return Coefficient(Constant{v}); }
    static Coefficient piecewise(std::vector<double> breaks, std::vector<double> values) {
        return Coefficient(Piecewise{std::move(breaks), std::move(values)});
    }
    static Coefficient sampled(std::vector<double> x, std::vector<double> v) {
        return Coefficient(Sampled{std::move(x), std::move(v)});
    }

    double operator()(double x) const {
        if (const auto* c = std::get_if<Constant>(&rep_)) return c->value;
        if (const auto* p = std::get_if<Piecewise>(&rep_)) {
            // value on [x_i, x_{i+1}); cell index = count of breaks <= x
            auto it = std::upper_bound(p->breaks.begin(), p->breaks.end(), x);
            return p->values[static_cast<size_t>(it - p->breaks.begin())];
        }
        const auto& s = std::get<Sampled>(rep_);
        if (x <= s.x.front()) return s.v.front();
        if (x >= s.x.back()) return s.v.back();
        auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
        size_t i = static_cast<size_t>(it - s.x.begin());
        double t = (x - s.x[i - 1]) / (s.x[i] - s.x[i - 1]);
        return (1.0 - t) * s.v[i - 1] + t * s.v[i];
    }

    // Interior knots where smoothness may break; integration and quadrature
    // never step across these.
    std::vector<double> knots() const {
        if (const auto* p = std::get_if<Piecewise>(&rep_)) return p->breaks;
        if (const auto* s = std::get_if<Sampled>(&rep_))
            return std::vector<double>(s->x.begin() + 1, s->x.end() - 1);
        return {};
    }

    void validate(double a, double b) const {
        if (const auto* p = std::get_if<Piecewise>(&rep_)) {
            if (p->values.size() != p->breaks.size() + 1)
                throw BadGrid("piecewise coefficient needs breaks.size()+1 values");
            if (!std::is_sorted(p->breaks.begin(), p->breaks.end()))
                throw BadGrid("piecewise breakpoints must be sorted");
            for (double t : p->breaks)
                if (!(t > a && t < b)) throw BadGrid("breakpoint outside (a,b)");
        } else if (const auto* s = std::get_if<Sampled>(&rep_)) {
            if (s->x.size() < 2 || s->x.size() != s->v.size())
                throw BadGrid("sampled coefficient needs matching x/v with >= 2 points");
            for (size_t i = 1; i < s->x.size(); ++i)
                if (!(s->x[i] > s->x[i - 1])) throw BadGrid("sampled grid must be strictly increasing");
            if (s->x.front() != a || s->x.back() != b)
                throw BadGrid("sampled grid must cover [a,b] exactly");
        }
    }

    template <class Visitor>
    decltype(auto) visit(Visitor&& vis) const {
        return std::visit(std::forward<Visitor>(vis), rep_);
    }

private:
    std::variant<Constant, Piecewise, Sampled> rep_;
};

// The differential expression tau = r^{-1}( -(d/dx) p (d/dx) + q ) on (a,b),
// with p, r positive and q real. Immutable after construction.
struct Problem {
    double a;
    double b;
    Coefficient p;
    Coefficient q;
    Coefficient r;

    double length() const { return b - a; }

    // Union of endpoints and all coefficient knots; the smoothness cells.
    std::vector<double> segment_bounds() const {
        std::vector<double> k{a, b};
        for (const Coefficient* c : {&p, &q, &r}) {
            auto kn = c->knots();
            k.insert(k.end(), kn.begin(), kn.end());
        }
        std::sort(k.begin(), k.end());
        k.erase(std::unique(k.begin(), k.end()), k.end());
        return k;
    }

    // Liouville length  integral of sqrt(r/p); sets the oscillation scale.
    double liouville_length() const {
        const int n = 4096;
        double h = (b - a) / n, acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = a + (i + 0.5) * h;
            acc += std::sqrt(r(x) / p(x)) * h;
        }
        return acc;
    }
};

inline Problem build_problem(double a, double b, Coefficient p, Coefficient q, Coefficient r) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b))
        throw BadInterval("require finite a < b");
    p.validate(a, b);
    q.validate(a, b);
    r.validate(a, b);

    // Positivity is checked on a dense grid plus every knot, not symbolically.
    std::vector<double> pts;
    pts.reserve(1100);
    for (int i = 0; i <= 1024; ++i) pts.push_back(a + (b - a) * i / 1024.0);
    for (const Coefficient* c : {&p, &r}) {
        auto kn = c->knots();
        pts.insert(pts.end(), kn.begin(), kn.end());
    }
    for (double x : pts) {
        if (!(p(x) > 0.0)) throw NonPositiveCoefficient("p <= 0 near x=" + std::to_string(x));
        if (!(r(x) > 0.0)) throw NonPositiveCoefficient("r <= 0 near x=" + std::to_string(x));
        if (!std::isfinite(q(x))) throw NonPositiveCoefficient("q not finite near x=" + std::to_string(x));
    }
    return Problem{a, b, std::move(p), std::move(q), std::move(r)};
}

inline Problem preset(const std::string& name) {
    const double pi = std::numbers::pi;
    if (name == "free-unit") return build_problem(0.0, 1.0, 1.0, 0.0, 1.0);
    if (name == "free-pi") return build_problem(0.0, pi, 1.0, 0.0, 1.0);
    if (name == "step-q")
        return build_problem(0.0, 1.0, 1.0, Coefficient::piecewise({0.5}, {0.0, 10.0}), 1.0);
    if (name == "step-p")
        return build_problem(0.0, 1.0, Coefficient::piecewise({0.5}, {1.0, 2.0}), 0.0, 1.0);
    throw UnknownPreset(name);
}

}  // namespace slkrein
