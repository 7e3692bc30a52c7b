#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vwlab/transport.hpp"

namespace vwlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values as key=value pairs
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

using ProgressFn = std::function<void(const std::string&)>;

// The generic coupled run used by the suite: d = 1, n = 3, box [-4, 4]^2 at cells^2.
TransportSetup reference_setup(int cells = 256);

std::vector<int> all_criteria();
CriterionResult run_criterion(int id, const ProgressFn& log = {});

// Optimal transport cost between weighted point sets on the line by min-cost flow.
double transport_lp(std::span<const double> x, std::span<const double> wx, std::span<const double> y,
                    std::span<const double> wy);

}  // namespace vwlab
