// sl-krein: command line frontend for the Sturm-Liouville boundary data map
// library. Subcommands mirror the library modules; all documents are JSON,
// grids may also be emitted as CSV.

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "slkrein/slkrein.hpp"
#include "slkrein/verify.hpp"

using namespace slkrein;

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Input: return 2;
        case ErrorKind::Numeric: return 3;
        case ErrorKind::Property: return 4;
    }
    return 3;
}

// "-1", "2+3i", "-5+0.1i", "1i", "2-2i"
Cplx parse_complex(std::string s) {
    if (s.empty()) throw BadInterval("empty complex literal");
    double re = 0, im = 0;
    bool has_im = s.back() == 'i' || s.back() == 'I';
    if (has_im) s.pop_back();
    size_t split = std::string::npos;
    for (size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;
    }
    try {
        if (!has_im) {
            re = std::stod(s);
        } else if (split == std::string::npos) {
            im = s.empty() || s == "+" ? 1.0 : (s == "-" ? -1.0 : std::stod(s));
        } else {
            re = std::stod(s.substr(0, split));
            std::string rest = s.substr(split);
            im = rest == "+" ? 1.0 : (rest == "-" ? -1.0 : std::stod(rest));
        }
    } catch (const std::exception&) {
        throw BadInterval("cannot parse complex literal: " + s);
    }
    return {re, im};
}

std::vector<Cplx> parse_complex_list(const std::string& s) {
    std::vector<Cplx> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
    if (out.empty()) throw BadInterval("empty z list");
    return out;
}

Problem load_problem(const std::string& spec, double tol) {
    (void)tol;
    if (!spec.empty() && spec[0] == '{') return problem_from_json(Json::parse(spec));
    if (std::ifstream in(spec); in.good()) {
        Json j;
        in >> j;
        return problem_from_json(j);
    }
    return preset(spec);  // throws UnknownPreset with the offending name
}

BcDocument load_bc(const std::string& spec) {
    if (!spec.empty() && spec[0] == '{') return bc_from_json(Json::parse(spec));
    if (std::ifstream in(spec); in.good()) {
        Json j;
        in >> j;
        return bc_from_json(j);
    }
    return bc_from_json(Json{{"kind", "named"}, {"name", spec}});
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty() || output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) throw BadInterval("cannot open output file " + output);
    out << text;
}

size_t thread_budget(size_t work_items) {
    size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SL_KREIN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = static_cast<size_t>(v);
    }
    return std::min(n, std::max<size_t>(1, work_items));
}

// Evaluate fn over indices [0, n) on the thread budget; results in order.
template <class T, class Fn>
std::vector<T> parallel_map(size_t n, Fn&& fn) {
    size_t workers = thread_budget(n);
    std::vector<T> out(n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> futs;
    for (size_t w = 0; w < workers; ++w)
        futs.push_back(std::async(std::launch::async, [&] {
            for (size_t i = next++; i < n; i = next++) out[i] = fn(i);
        }));
    for (auto& f : futs) f.get();
    return out;
}

struct GlobalOpts {
    std::string problem;
    double tol = kDefaultTol;
    std::string format = "json";
    std::string output;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sturm-Liouville boundary data maps, Krein resolvent formulas, and spectral shift functions"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("-p,--problem", g.problem,
                   "problem: preset name, JSON file path, or inline JSON document");
    app.add_option("--tol", g.tol, "integrator tolerance")->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("-o,--output", g.output, "output file (default stdout)");

    // --- eigs ---------------------------------------------------------------
    auto* eigs = app.add_subcommand("eigs", "eigenvalues of a self-adjoint realization");
    std::string eigs_bc;
    std::vector<double> eigs_window;
    double eig_tol = 1e-9;
    eigs->add_option("--bc", eigs_bc, "boundary condition")->required();
    eigs->add_option("--window", eigs_window, "window lo hi")->expected(2)->required();
    eigs->add_option("--eig-tol", eig_tol, "eigenvalue refinement tolerance");

    // --- bdm ----------------------------------------------------------------
    auto* bdm = app.add_subcommand("bdm", "boundary data map on a z grid");
    std::string bdm_from, bdm_to, bdm_z, bdm_check;
    bdm->add_option("--from", bdm_from, "source boundary condition")->required();
    bdm->add_option("--to", bdm_to, "target boundary condition")->required();
    bdm->add_option("--z", bdm_z, "comma separated complex points, e.g. -1,2+3i")->required();
    bdm->add_option("--check", bdm_check, "verify a property over the grid")
        ->check(CLI::IsMember({"group", "herglotz", "fractional"}));

    // --- green --------------------------------------------------------------
    auto* green = app.add_subcommand("green", "Green's function value");
    std::string green_bc, green_z;
    double green_x = 0, green_xp = 0;
    green->add_option("--bc", green_bc)->required();
    green->add_option("--z", green_z)->required();
    green->add_option("--x", green_x)->required();
    green->add_option("--xp", green_xp)->required();

    // --- ssf ----------------------------------------------------------------
    auto* ssf = app.add_subcommand("ssf", "spectral shift function");
    std::string ssf_from, ssf_to;
    double ssf_lmax = 0, ssf_eps = 1e-3;
    bool ssf_boundary_route = false;
    ssf->add_option("--from", ssf_from)->required();
    ssf->add_option("--to", ssf_to)->required();
    ssf->add_option("--lmax", ssf_lmax)->required();
    ssf->add_option("--eps", ssf_eps, "offset for the boundary-value cross check");
    ssf->add_flag("--check-boundary", ssf_boundary_route,
                  "cross check against phase boundary values");

    // --- trace --------------------------------------------------------------
    auto* trace = app.add_subcommand("trace", "resolvent-difference trace formula");
    std::string trace_from, trace_to, trace_z;
    int trace_neigs = 25;
    trace->add_option("--from", trace_from)->required();
    trace->add_option("--to", trace_to)->required();
    trace->add_option("--z", trace_z)->required();
    trace->add_option("--neigs", trace_neigs, "eigenvalue budget per operator");

    // --- krein --------------------------------------------------------------
    auto* krein = app.add_subcommand("krein", "Krein resolvent formula residual");
    std::string krein_target, krein_ref = "dirichlet", krein_z;
    krein->add_option("--target", krein_target)->required();
    krein->add_option("--ref", krein_ref, "reference condition (default dirichlet)");
    krein->add_option("--z", krein_z)->required();

    // --- convert ------------------------------------------------------------
    auto* convert = app.add_subcommand("convert", "convert between parametrizations");
    std::string conv_bc, conv_to = "unitary";
    convert->add_option("--bc", conv_bc)->required();
    convert->add_option("--to", conv_to, "target form")
        ->check(CLI::IsMember({"ab", "dn", "unitary", "canonical"}));

    // --- vn -----------------------------------------------------------------
    auto* vn = app.add_subcommand("vn", "deficiency-space unitary of an extension");
    std::string vn_bc, vn_route = "auto";
    vn->add_option("--bc", vn_bc)->required();
    vn->add_option("--route", vn_route)->check(CLI::IsMember({"auto", "general"}));

    // --- verify -------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
    std::string suite = "free";
    std::optional<double> verify_tol;
    verify_cmd->add_option("--suite", suite)->check(CLI::IsMember({"free", "quick", "all"}));
    double verify_tol_raw = -1;
    verify_cmd->add_option("--tol-override", verify_tol_raw,
                           "replace every criterion tolerance with this value");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eigs->parsed()) {
            auto prob = load_problem(g.problem, g.tol);
            ABPair bc = resolve_bc(load_bc(eigs_bc), prob, g.tol);
            auto sp = eigenvalues(prob, bc, {eigs_window[0], eigs_window[1]}, eig_tol, g.tol);
            emit(g.format == "csv" ? spectrum_to_csv(sp) : to_json_string(spectrum_to_json(sp)),
                 g.output);
        } else if (bdm->parsed()) {
            auto prob = load_problem(g.problem, g.tol);
            ABPair from = resolve_bc(load_bc(bdm_from), prob, g.tol);
            ABPair to = resolve_bc(load_bc(bdm_to), prob, g.tol);
            auto zs = parse_complex_list(bdm_z);
            if (bdm_check.empty()) {
                auto values = parallel_map<BdmValue>(zs.size(), [&](size_t i) {
                    return bdm_eval(prob, from, to, zs[i], g.tol);
                });
                if (g.format == "csv") {
                    emit(bdm_grid_to_csv(values), g.output);
                } else {
                    Json arr = Json::array();
                    for (const auto& v : values)
                        arr.push_back(Json{{"z", Json::array({v.z.real(), v.z.imag()})},
                                           {"M", mat2_to_json(v.M)}});
                    emit(to_json_string(arr), g.output);
                }
            } else {
                double worst = 0.0;
                Json detail = Json::array();
                for (Cplx z : zs) {
                    double res = 0.0;
                    if (bdm_check == "group") {
                        res = bdm_compose_check(prob, from, to, from, z, g.tol);
                    } else if (bdm_check == "fractional") {
                        Mat2 a = bdm_eval(prob, from, to, z, g.tol).M;
                        Mat2 b = bdm_via_fractional(prob, from, to, z, g.tol).M;
                        res = max_abs(a - b);
                    } else {  // herglotz
                        auto [lo, hi] = herglotz_probe(prob, from, to, z, g.tol);
                        res = lo > 0 ? 0.0 : -lo;
                        detail.push_back(Json{{"z", Json::array({z.real(), z.imag()})},
                                              {"min_eig", lo},
                                              {"max_eig", hi}});
                    }
                    worst = std::max(worst, res);
                }
                Json out{{"check", bdm_check}, {"max_residual", worst}};
                if (!detail.empty()) out["points"] = detail;
                emit(to_json_string(out), g.output);
                if (worst > 1e-8) return 4;
            }
        } else if (green->parsed()) {
            auto prob = load_problem(g.problem, g.tol);
            ABPair bc = resolve_bc(load_bc(green_bc), prob, g.tol);
            Cplx z = parse_complex(green_z);
            Cplx val = green_direct(prob, bc, z, green_x, green_xp, g.tol);
            emit(to_json_string(Json{{"z", Json::array({z.real(), z.imag()})},
                                     {"x", green_x},
                                     {"xp", green_xp},
                                     {"re", val.real()},
                                     {"im", val.imag()}}),
                 g.output);
        } else if (ssf->parsed()) {
            auto prob = load_problem(g.problem, g.tol);
            ABPair from = resolve_bc(load_bc(ssf_from), prob, g.tol);
            ABPair to = resolve_bc(load_bc(ssf_to), prob, g.tol);
            auto xi = ssf_counting(prob, from, to, ssf_lmax, g.tol);
            if (ssf_boundary_route) {
                std::vector<double> lams;
                for (int i = 1; i <= 20; ++i) {
                    double lam = ssf_lmax * i / 20.5;
                    for (const auto& j : xi.jumps)
                        if (std::abs(lam - j.at) < 10 * ssf_eps) lam += 20 * ssf_eps;
                    lams.push_back(lam);
                }
                auto vals = ssf_boundary(prob, from, to, lams, ssf_eps, g.tol);
                for (size_t i = 0; i < lams.size(); ++i)
                    if (std::lround(vals[i]) != xi.value_at(lams[i]))
                        throw NonIntegerValue("boundary route disagrees with counting at lambda=" +
                                              std::to_string(lams[i]));
            }
            emit(g.format == "csv"
                     ? stepfunction_to_csv(xi, std::min(0.0, xi.jumps.empty() ? 0.0 : xi.jumps[0].at - 1.0), ssf_lmax)
                     : to_json_string(stepfunction_to_json(xi)),
                 g.output);
        } else if (trace->parsed()) {
            auto prob = load_problem(g.problem, g.tol);
            ABPair from = resolve_bc(load_bc(trace_from), prob, g.tol);
            ABPair to = resolve_bc(load_bc(trace_to), prob, g.tol);
            Cplx z = parse_complex(trace_z);
            auto tc = trace_formula_check(prob, from, to, z, trace_neigs, 1e-6, g.tol);
            emit(to_json_string(Json{{"z", Json::array({z.real(), z.imag()})},
                                     {"lhs", Json::array({tc.lhs.real(), tc.lhs.imag()})},
                                     {"rhs", Json::array({tc.rhs.real(), tc.rhs.imag()})},
                                     {"residual", tc.residual},
                                     {"eigenvalues_used",
                                      Json::array({tc.used_from, tc.used_to})}}),
                 g.output);
        } else if (krein->parsed()) {
            auto prob = load_problem(g.problem, g.tol);
            ABPair target = resolve_bc(load_bc(krein_target), prob, g.tol);
            ABPair ref = resolve_bc(load_bc(krein_ref), prob, g.tol);
            Cplx z = parse_complex(krein_z);
            auto corr = krein_correction(prob, target, ref, z, g.tol);
            std::vector<std::function<Cplx(double)>> trials = {
                [](double) { return Cplx(1.0, 0.0); }, [](double x) { return Cplx(x, 0.0); },
                [](double x) { return Cplx(std::sin(3 * x), 0.0); }};
            double residual = krein_resolvent_check(prob, target, ref, z, trials, g.tol);
            const char* kind = corr.kind == KreinCorrection::Kind::Matrix2 ? "matrix2"
                               : corr.kind == KreinCorrection::Kind::Rank1 ? "rank1"
                                                                           : "zero";
            Json out{{"kind", kind},
                     {"z", Json::array({z.real(), z.imag()})},
                     {"max_l2_residual", residual}};
            if (corr.kind == KreinCorrection::Kind::Matrix2) out["P"] = mat2_to_json(corr.P);
            if (corr.kind == KreinCorrection::Kind::Rank1)
                out["p"] = Json::array({corr.p_scalar.real(), corr.p_scalar.imag()});
            emit(to_json_string(out), g.output);
        } else if (convert->parsed()) {
            // kvn needs a problem to resolve; plain forms do not
            BcDocument doc = load_bc(conv_bc);
            ABPair ab = doc.is_kvn
                            ? resolve_bc(doc, load_problem(g.problem, g.tol), g.tol)
                            : *doc.ab;
            Json out;
            if (conv_to == "ab") {
                out = bc_to_json(ab);
            } else if (conv_to == "dn") {
                auto dn = ab_to_dn(ab);
                out = Json{{"kind", "dn"}, {"XD", mat2_to_json(dn.XD)}, {"XN", mat2_to_json(dn.XN)}};
            } else if (conv_to == "unitary") {
                out = Json{{"kind", "unitary"}, {"U", mat2_to_json(ab_to_unitary(ab).U)}};
            } else {
                out = canonical_to_json(canonicalize(ab));
            }
            out["class_unitary"] = mat2_to_json(ab_to_unitary(ab).U);
            emit(to_json_string(out), g.output);
        } else if (vn->parsed()) {
            auto prob = load_problem(g.problem, g.tol);
            BcDocument doc = load_bc(vn_bc);
            ABPair ab = resolve_bc(doc, prob, g.tol);
            VnUnitary v;
            if (vn_route == "general") {
                v = vn_unitary_general(prob, ab, dirichlet_bc(), "dirichlet", g.tol);
            } else {
                auto canon = canonicalize(ab);
                if (const auto* s = std::get_if<SeparatedBC>(&canon))
                    v = vn_unitary_separated(prob, *s, g.tol);
                else
                    v = vn_unitary_coupled(prob, std::get<CoupledBC>(canon), g.tol);
            }
            emit(to_json_string(vn_to_json(v)), g.output);
        } else if (verify_cmd->parsed()) {
            if (verify_tol_raw > 0) verify_tol = verify_tol_raw;
            auto results = verify::run_suite(suite, verify_tol);
            Json arr = Json::array();
            bool all_pass = true;
            std::vector<std::string> failed;
            for (const auto& r : results) {
                Json checks = Json::array();
                for (const auto& c : r.checks)
                    checks.push_back(Json{{"label", c.label},
                                          {"residual", c.residual},
                                          {"tol", c.tol},
                                          {"pass", c.pass()}});
                arr.push_back(Json{{"id", r.id},
                                   {"name", r.name},
                                   {"pass", r.pass()},
                                   {"seconds", r.seconds},
                                   {"checks", checks}});
                if (!r.pass()) {
                    all_pass = false;
                    failed.push_back(std::to_string(r.id) + ":" + r.name);
                }
            }
            Json out{{"suite", suite}, {"all_pass", all_pass}, {"criteria", arr}};
            emit(to_json_string(out), g.output);
            if (!all_pass) {
                std::cerr << "failed criteria:";
                for (const auto& f : failed) std::cerr << " " << f;
                std::cerr << "\n";
                return 4;
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
