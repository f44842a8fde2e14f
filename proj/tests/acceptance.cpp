// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the worst residual and its tolerance.

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>

#include "slkrein/verify.hpp"

using namespace slkrein;

namespace {

void report(const verify::CriterionResult& r) {
    auto w = r.worst();
    std::printf("%s criterion %2d: %-38s worst %.3e (tol %.1e, %s) in %.1fs\n",
                r.pass() ? "PASS" : "FAIL", r.id, r.name.c_str(), w.residual, w.tol,
                w.label.c_str(), r.seconds);
    std::fflush(stdout);
    for (const auto& c : r.checks) {
        INFO(c.label << ": residual " << c.residual << " vs tol " << c.tol);
        CHECK(c.pass());
    }
}

void run(verify::CriterionResult (*fn)(std::optional<double>)) {
    auto start = std::chrono::steady_clock::now();
    auto r = fn({});
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(r);
}

}  // namespace

TEST_CASE("criterion 1: free spectra") { run(verify::criterion_free_spectra); }
TEST_CASE("criterion 2: boundary data map closed form") { run(verify::criterion_bdm_closed_form); }
TEST_CASE("criterion 3: boundary data map algebra") { run(verify::criterion_bdm_algebra); }
TEST_CASE("criterion 4: herglotz and reflection") { run(verify::criterion_herglotz); }
TEST_CASE("criterion 5: krein resolvent formulas") { run(verify::criterion_krein_resolvent); }
TEST_CASE("criterion 6: specialized correction agreement") {
    run(verify::criterion_permutation_agreement);
}
TEST_CASE("criterion 7: krein-von neumann extension") { run(verify::criterion_kvn); }
TEST_CASE("criterion 8: trace formula and spectral shift") { run(verify::criterion_trace_and_ssf); }
TEST_CASE("criterion 9: parametrization bijections") { run(verify::criterion_bijections); }
TEST_CASE("criterion 10: deficiency-space unitaries") { run(verify::criterion_vonneumann); }
TEST_CASE("criterion 11: m-function asymptotics") { run(verify::criterion_m_asymptotics); }
