#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace brwsim::validation {

/// Outcome of one oracle cross-check.  detail holds deterministic numbers
/// only (no timings), so a suite payload is byte-stable for a fixed seed.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// quick: reduced sample counts, smoke bands, completes in seconds.
/// full: the complete suite at its stated sample counts and tolerances.
enum class Tier { quick, full };

CheckResult check_kernel_equality();
CheckResult check_construction_fidelity(Tier tier, std::uint64_t seed);
CheckResult check_hardwall_oracles(Tier tier, std::uint64_t seed);
CheckResult check_conditional_mean_closed_form(Tier tier, std::uint64_t seed);
CheckResult check_log_gap_growth(Tier tier, std::uint64_t seed);
CheckResult check_left_tail_shape(Tier tier, std::uint64_t seed);
CheckResult check_fixed_point_order();
CheckResult check_comparison_dominance(Tier tier, std::uint64_t seed);
CheckResult check_power_sum_bound();
CheckResult check_determinism(std::uint64_t seed);

/// All checks in a fixed order.
std::vector<CheckResult> run_suite(Tier tier, std::uint64_t seed);

}  // namespace brwsim::validation
