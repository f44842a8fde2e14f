#pragma once

#include <cstdio>
#include <json.hpp>
#include <string>

#include "slkrein/boundary.hpp"
#include "slkrein/problem.hpp"
#include "slkrein/shift.hpp"
#include "slkrein/spectra.hpp"
#include "slkrein/vonneumann.hpp"

namespace slkrein {

using Json = nlohmann::json;  // object keys are stored sorted

// ---------------------------------------------------------------------------
// Deterministic serialization: 17 significant digits, sorted keys
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // bare integers stay valid JSON numbers but keep a float marker
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

inline void dump_json(const Json& j, std::string& out) {
    switch (j.type()) {
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += Json(it.key()).dump();
                out += ':';
                dump_json(it.value(), out);
            }
            out += '}';
            break;
        }
        case Json::value_t::array: {
            out += '[';
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_json(j[i], out);
            }
            out += ']';
            break;
        }
        case Json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        default:
            out += j.dump();
    }
}

}  // namespace detail

inline std::string to_json_string(const Json& j) {
    std::string out;
    detail::dump_json(j, out);
    out += '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Problem documents
// ---------------------------------------------------------------------------

inline Json coefficient_to_json(const Coefficient& c) {
    return c.visit([](const auto& rep) -> Json {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, Coefficient::Constant>) {
            return Json{{"const", rep.value}};
        } else if constexpr (std::is_same_v<T, Coefficient::Piecewise>) {
            return Json{{"pw", {{"breaks", rep.breaks}, {"vals", rep.values}}}};
        } else {
            return Json{{"sampled", {{"x", rep.x}, {"v", rep.v}}}};
        }
    });
}

inline Coefficient coefficient_from_json(const Json& j) {
    if (j.contains("const")) return Coefficient::constant(j.at("const").get<double>());
    if (j.contains("pw"))
        return Coefficient::piecewise(j.at("pw").at("breaks").get<std::vector<double>>(),
                                      j.at("pw").at("vals").get<std::vector<double>>());
    if (j.contains("sampled"))
        return Coefficient::sampled(j.at("sampled").at("x").get<std::vector<double>>(),
                                    j.at("sampled").at("v").get<std::vector<double>>());
    throw BadGrid("coefficient document needs one of const/pw/sampled");
}

inline Json problem_to_json(const Problem& p) {
    return Json{{"a", p.a},
                {"b", p.b},
                {"p", coefficient_to_json(p.p)},
                {"q", coefficient_to_json(p.q)},
                {"r", coefficient_to_json(p.r)}};
}

inline Problem problem_from_json(const Json& j) {
    return build_problem(j.at("a").get<double>(), j.at("b").get<double>(),
                         coefficient_from_json(j.at("p")), coefficient_from_json(j.at("q")),
                         coefficient_from_json(j.at("r")));
}

// ---------------------------------------------------------------------------
// Boundary condition documents
// ---------------------------------------------------------------------------

inline Json mat2_to_json(const Mat2& m) {
    Json rows = Json::array();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) rows.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    return rows;  // row-major [re,im] pairs
}

inline Mat2 mat2_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4) throw BadGrid("matrix document needs 4 [re,im] entries");
    Mat2 m;
    for (int k = 0; k < 4; ++k)
        m(k / 2, k % 2) = Cplx(j[k][0].get<double>(), j[k][1].get<double>());
    return m;
}

inline Json mat2r_to_json(const Mat2r& m) {
    return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

inline Mat2r mat2r_from_json(const Json& j) {
    Mat2r m;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) m(i, k) = j.at(i).at(k).get<double>();
    return m;
}

// A parsed boundary condition document; "kvn" stays symbolic until it is
// resolved against a problem.
struct BcDocument {
    std::optional<ABPair> ab;
    bool is_kvn = false;
    std::string source = "ab";
};

inline BcDocument bc_from_json(const Json& j) {
    BcDocument doc;
    std::string kind = j.at("kind").get<std::string>();
    doc.source = kind;
    if (kind == "ab") {
        doc.ab = validate_ab(mat2_from_json(j.at("A")), mat2_from_json(j.at("B")));
    } else if (kind == "separated") {
        doc.ab = separated_to_ab(
            {j.at("theta_a").get<double>(), j.at("theta_b").get<double>()});
    } else if (kind == "coupled") {
        doc.ab = coupled_to_ab({j.at("phi").get<double>(), mat2r_from_json(j.at("F"))});
    } else if (kind == "unitary") {
        UnitaryBC u{mat2_from_json(j.at("U"))};
        if (max_abs(u.U * u.U.adjoint() - Mat2::Identity()) > 1e-12)
            throw NotLagrangian("U is not unitary");
        doc.ab = dn_to_ab(unitary_to_dn(u));
    } else if (kind == "named") {
        std::string name = j.at("name").get<std::string>();
        if (name == "dirichlet") doc.ab = dirichlet_bc();
        else if (name == "neumann") doc.ab = neumann_bc();
        else if (name == "periodic") doc.ab = periodic_bc();
        else if (name == "antiperiodic") doc.ab = antiperiodic_bc();
        else if (name == "kvn") doc.is_kvn = true;
        else throw UnknownPreset("boundary condition name " + name);
    } else {
        throw UnknownPreset("boundary condition kind " + kind);
    }
    return doc;
}

inline ABPair resolve_bc(const BcDocument& doc, const Problem& prob, double tol = kDefaultTol) {
    if (doc.is_kvn) return coupled_to_ab(kvn_extension(prob, tol));
    return *doc.ab;
}

inline Json bc_to_json(const ABPair& ab) {
    return Json{{"kind", "ab"}, {"A", mat2_to_json(ab.A)}, {"B", mat2_to_json(ab.B)}};
}

inline Json canonical_to_json(const std::variant<SeparatedBC, CoupledBC>& c) {
    if (const auto* s = std::get_if<SeparatedBC>(&c))
        return Json{{"kind", "separated"}, {"theta_a", s->theta_a}, {"theta_b", s->theta_b}};
    const auto& cp = std::get<CoupledBC>(c);
    return Json{{"kind", "coupled"}, {"phi", cp.phi}, {"F", mat2r_to_json(cp.F)}};
}

// ---------------------------------------------------------------------------
// Result documents
// ---------------------------------------------------------------------------

inline Json spectrum_to_json(const Spectrum& sp) {
    Json eigs = Json::array();
    for (const auto& e : sp.eigs) eigs.push_back(Json{{"lambda", e.lambda}, {"mult", e.multiplicity}});
    return Json{{"bc", bc_to_json(sp.bc)},
                {"eigs", eigs},
                {"window", Json::array({sp.window_lo, sp.window_hi})},
                {"tol", sp.tol}};
}

inline std::string spectrum_to_csv(const Spectrum& sp) {
    std::string out = "lambda,mult\n";
    for (const auto& e : sp.eigs)
        out += detail::format_double(e.lambda) + "," + std::to_string(e.multiplicity) + "\n";
    return out;
}

inline Json stepfunction_to_json(const StepFunction& sf) {
    Json jumps = Json::array();
    for (const auto& j : sf.jumps) jumps.push_back(Json{{"at", j.at}, {"to", j.to}});
    return Json{{"base", sf.base}, {"jumps", jumps}};
}

inline std::string stepfunction_to_csv(const StepFunction& sf, double lambda_min, double lambda_max) {
    std::string out = "lambda,xi\n";
    auto emit = [&](double lam, int v) {
        out += detail::format_double(lam) + "," + std::to_string(v) + "\n";
    };
    emit(lambda_min, sf.base);
    for (const auto& j : sf.jumps)
        if (j.at >= lambda_min && j.at <= lambda_max) emit(j.at, j.to);
    emit(lambda_max, sf.value_at(lambda_max));
    return out;
}

inline Json vn_to_json(const VnUnitary& v) {
    return Json{{"basis", v.basis_tag},
                {"U", mat2_to_json(v.U)},
                {"G_plus", mat2_to_json(v.g_plus)},
                {"G_minus", mat2_to_json(v.g_minus)},
                {"isometry_residual", isometry_residual(v)}};
}

inline std::string solution_path_to_csv(const SolutionPath& path) {
    std::string out = "x,re_u,im_u,re_pu,im_pu\n";
    for (size_t i = 0; i < path.size(); ++i) {
        out += detail::format_double(path.grid->x[i]) + "," + detail::format_double(path.u[i].real()) +
               "," + detail::format_double(path.u[i].imag()) + "," +
               detail::format_double(path.pu[i].real()) + "," +
               detail::format_double(path.pu[i].imag()) + "\n";
    }
    return out;
}

inline std::string bdm_grid_to_csv(const std::vector<BdmValue>& values) {
    std::string out = "z_re,z_im,m11_re,m11_im,m12_re,m12_im,m21_re,m21_im,m22_re,m22_im\n";
    for (const auto& v : values) {
        out += detail::format_double(v.z.real()) + "," + detail::format_double(v.z.imag());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                out += "," + detail::format_double(v.M(i, j).real()) + "," +
                       detail::format_double(v.M(i, j).imag());
        out += "\n";
    }
    return out;
}

}  // namespace slkrein
