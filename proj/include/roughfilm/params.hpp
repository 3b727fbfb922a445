#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace roughfilm {

/// Fluid, porous-matrix and thermal constants. `M` is the Brinkman parameter
/// sqrt(mu / (K * mu_eff)); it is always derived, never set by callers.
class PhysicalParams {
public:
  double mu() const noexcept { return mu_; }
  double mu_eff() const noexcept { return mu_eff_; }
  double K() const noexcept { return K_; }
  double k() const noexcept { return k_; }
  double b() const noexcept { return b_; }
  double M() const noexcept { return M_; }

  /// K / mu, the scaling between the dimensionless cell fields and velocities.
  double mobility_scale() const noexcept { return K_ / mu_; }

  static double brinkman_parameter(double mu, double mu_eff, double K) {
    return std::sqrt(mu / (K * mu_eff));
  }

  friend PhysicalParams make_params(double mu, double mu_eff, double K, double k, double b);

private:
  PhysicalParams() = default;
  double mu_ = 1, mu_eff_ = 1, K_ = 1, k_ = 1, b_ = 0, M_ = 1;
};

inline PhysicalParams make_params(double mu, double mu_eff, double K, double k, double b) {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be a finite positive number");
  };
  require_positive(mu, "mu");
  require_positive(mu_eff, "mu_eff");
  require_positive(K, "K");
  require_positive(k, "k");
  if (!std::isfinite(b)) throw std::invalid_argument("b must be finite");

  PhysicalParams p;
  p.mu_ = mu;
  p.mu_eff_ = mu_eff;
  p.K_ = K;
  p.k_ = k;
  p.b_ = b;
  p.M_ = PhysicalParams::brinkman_parameter(mu, mu_eff, K);
  return p;
}

}  // namespace roughfilm
