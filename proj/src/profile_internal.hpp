#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lagexp/profile.hpp"

namespace lagexp::detail {

/// Advances the ODE state by exactly one output interval with the configured integrator.
class Advancer {
 public:
  explicit Advancer(const IntegrationOptions& options);
  ~Advancer();
  /// Returns false (with a reason) when the integrator hit the origin or a curvature blow-up.
  bool advance(ProfileState& state, double s, double h, std::string& why);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Samples from s = 0 at the given spacing until `stop` holds or maxSteps is reached.
std::vector<ProfileSample> sample_forward(const ProfileState& start, double step,
                                          std::size_t maxSteps, const IntegrationOptions& options,
                                          const std::function<bool(const ProfileState&)>& stop);

}  // namespace lagexp::detail
