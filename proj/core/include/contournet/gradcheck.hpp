#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace contournet {

inline constexpr double kGradCheckTolerance = 1e-4;

struct GradSuiteResult {
  std::string name;
  int instances = 0;
  int failures = 0;
  double max_relative_error = 0.0;
  /// Index of the instance with the largest error.
  int worst_instance = 0;
  double step = 0.0;
};

/// Random-instance finite-difference checks of the IoU loss, the balanced
/// BCE and the full two-branch directional module. IoU-loss instances are
/// redrawn until no box edge sits within 1e-3 of a kink.
std::vector<GradSuiteResult> run_gradient_suites(std::uint64_t seed, int instances = 100,
                                                 double tolerance = kGradCheckTolerance);

}  // namespace contournet
