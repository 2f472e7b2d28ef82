#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cascade {

inline constexpr double kDefaultWindowMargin = 10.0;

struct ValidityFlags {
  double margin = kDefaultWindowMargin;
  double target_fidelity = 0.0;
  double gamma1_max = 0.0;
  double q2 = 0.0;      // omega0 / gamma
  double q1_min = 0.0;  // omega0 / gamma1_max

  bool omega0_over_gamma1_max = false;         // omega0 >= m gamma1_max
  bool gamma1_max_over_budget = false;         // gamma1_max >= m gamma/(1-F)
  bool quality_budget_over_q1 = false;         // (1-F) Q2 >= m Q1min
  bool q1_over_unity = false;                  // Q1min >= m

  bool first_window() const noexcept { return omega0_over_gamma1_max && gamma1_max_over_budget; }
  bool second_window() const noexcept { return quality_budget_over_q1 && q1_over_unity; }
  bool all() const noexcept { return first_window() && second_window(); }
};

struct InfidelityTerms {
  double exponential = 0.0;  // 1/2 exp(-2 gamma T)
  double truncation = 0.0;   // gamma dt_cut
  double loss_line = 0.0;    // 1 - sqrt(eta)
  double loss_osc = 0.0;     // 1 - exp(-gamma' T)

  double total() const noexcept { return exponential + truncation + loss_line + loss_osc; }
};

struct FidelityReport {
  double fidelity = 0.0;
  InfidelityTerms terms;
  std::optional<ValidityFlags> validity;
  std::vector<std::string> warnings;
};

}  // namespace cascade
