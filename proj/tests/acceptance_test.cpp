// Full-scale cross-check suite: every check runs at its stated sample count
// and tolerance and prints one pass/fail line.  The same checks back the
// CLI's `validate --full`; this binary pins them as the test-suite gate.

#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "brwsim/validation.hpp"

namespace {

constexpr std::uint64_t kSeed = 20240809;

using brwsim::validation::CheckResult;
using brwsim::validation::Tier;

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(const std::string& criterion, const CheckResult& result, double seconds,
            double budget_seconds) {
    std::printf("[%s] %s: %s (%.1f s, budget %.0f s)\n", result.passed ? "PASS" : "FAIL",
                criterion.c_str(), result.detail.c_str(), seconds, budget_seconds);
    std::fflush(stdout);
    CHECK_MESSAGE(result.passed, criterion, ": ", result.detail);
    WARN_MESSAGE(seconds < budget_seconds, criterion, " exceeded its runtime budget");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: kernel equality across all dense shapes") {
    Stopwatch timer;
    report("kernel-equality", brwsim::validation::check_kernel_equality(), timer.seconds(), 5);
}

TEST_CASE("criterion 2: sampler construction fidelity") {
    Stopwatch timer;
    report("construction-fidelity",
           brwsim::validation::check_construction_fidelity(Tier::full, kSeed), timer.seconds(),
           60);
}

TEST_CASE("criterion 3: hard-wall probability oracles") {
    Stopwatch timer;
    report("hardwall-oracles", brwsim::validation::check_hardwall_oracles(Tier::full, kSeed),
           timer.seconds(), 120);
}

TEST_CASE("criterion 4: conditional mean closed forms") {
    Stopwatch timer;
    report("conditional-mean-closed-form",
           brwsim::validation::check_conditional_mean_closed_form(Tier::full, kSeed),
           timer.seconds(), 120);
}

TEST_CASE("criterion 5: conditioning gap grows logarithmically") {
    Stopwatch timer;
    report("log-gap-growth", brwsim::validation::check_log_gap_growth(Tier::full, kSeed),
           timer.seconds(), 900);
}

TEST_CASE("criterion 6: left-tail shape and fixed-point order") {
    Stopwatch timer;
    report("left-tail-shape", brwsim::validation::check_left_tail_shape(Tier::full, kSeed),
           timer.seconds(), 900);
    Stopwatch timer2;
    report("fixed-point-order", brwsim::validation::check_fixed_point_order(), timer2.seconds(),
           900);
}

TEST_CASE("criterion 7: comparison-field dominance") {
    Stopwatch timer;
    report("comparison-dominance",
           brwsim::validation::check_comparison_dominance(Tier::full, kSeed), timer.seconds(),
           120);
}

TEST_CASE("criterion 8: weighted power sum against its closed-form bound") {
    Stopwatch timer;
    report("power-sum-bound", brwsim::validation::check_power_sum_bound(), timer.seconds(), 1);
}

TEST_CASE("criterion 9: determinism, library and CLI") {
    Stopwatch timer;
    report("determinism", brwsim::validation::check_determinism(kSeed), timer.seconds(), 60);

    // byte-identical payloads from two identical quick validation runs
    const std::string base = std::string(BRWSIM_CLI_PATH) + " validate --quick --seed 99";
    const int rc1 =
        std::system((base + " --out /tmp/brwsim_quick_a.jsonl >/dev/null 2>&1").c_str());
    const int rc2 =
        std::system((base + " --out /tmp/brwsim_quick_b.jsonl >/dev/null 2>&1").c_str());
    CHECK(WIFEXITED(rc1));
    CHECK(WEXITSTATUS(rc1) == 0);
    CHECK(WIFEXITED(rc2));
    CHECK(WEXITSTATUS(rc2) == 0);
    const std::string a = read_file("/tmp/brwsim_quick_a.jsonl");
    const std::string b = read_file("/tmp/brwsim_quick_b.jsonl");
    CHECK(!a.empty());
    CHECK(a == b);
    std::printf("[%s] validate-quick-byte-identity: %zu-byte payloads match (%.1f s)\n",
                (!a.empty() && a == b) ? "PASS" : "FAIL", a.size(), timer.seconds());
    std::fflush(stdout);
}
