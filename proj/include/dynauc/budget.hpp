#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dynauc/lp.hpp"

namespace dynauc {

// Pivot-cap aborts from the LP layer are the same condition seen from below.
class BudgetExceeded : public lp::ResourceLimit {
 public:
  using lp::ResourceLimit::ResourceLimit;
};

// One knob caps LP pivots, LP size and enumeration leaves alike.
// DYNAUC_BUDGET overrides the default; the CLI's --budget overrides both.
struct Budget {
  static constexpr const char* kEnvVar = "DYNAUC_BUDGET";
  std::uint64_t limit = 5'000'000;

  static Budget from_env() {
    Budget b;
    if (const char* s = std::getenv(kEnvVar)) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(s, &end, 10);
      if (end == s || *end != '\0' || v == 0)
        throw std::invalid_argument(std::string(kEnvVar) + " must be a positive integer, got \"" + s + "\"");
      b.limit = v;
    }
    return b;
  }

  lp::Options lp_options() const {
    lp::Options o;
    o.pivot_cap = limit;
    return o;
  }

  void check_variables(std::uint64_t count, const std::string& what) const {
    if (count > limit)
      throw BudgetExceeded(what + " needs " + std::to_string(count) + " variables, above the budget of " + std::to_string(limit) +
                           "; raise --budget or " + kEnvVar);
  }

  // The exact simplex keeps a dense tableau of rows x (columns + rows).
  void check_program(const lp::Problem& p, const std::string& what) const {
    check_variables(p.num_vars(), what);
    const std::uint64_t rows = p.constraints.size(), cells = rows * (p.num_vars() + rows);
    if (cells > limit)
      throw BudgetExceeded(what + " needs a " + std::to_string(rows) + "-row tableau (" + std::to_string(cells) +
                           " cells), above the budget of " + std::to_string(limit) + "; raise --budget or " + kEnvVar);
  }

  void check_enumeration(std::uint64_t count, const std::string& what) const {
    if (count > limit)
      throw BudgetExceeded(what + " enumerates " + std::to_string(count) + " candidates, above the budget of " +
                           std::to_string(limit) + "; raise --budget or " + kEnvVar);
  }
};

}  // namespace dynauc
