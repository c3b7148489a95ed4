#pragma once

#include <vector>

#include "jetscope/distribution.hpp"
#include "jetscope/jet.hpp"
#include "jetscope/norms.hpp"
#include "jetscope/test_function.hpp"

namespace jetscope::rescale {

/// T^{a,r}(θ) − P^{a,r}(θ) = r^{−n}(T − P)(θ((· − a)/r)).
struct BlowupQuery {
  const DistributionRep* t = nullptr;
  Jet p;
  Point a{};
  double r = 1.0;
  TestFunction theta;
};

double pair_blowup(const BlowupQuery& q);
double pair_blowup(const DistributionRep& t, const Jet& p, const Point& a, double r,
                   const TestFunction& theta);
/// Blow-up of T alone (P = 0).
double pair_blowup(const DistributionRep& t, const Point& a, double r, const TestFunction& theta);

/// Right-hand side of the deformation identity,
/// Σ_j ∫_s^r t^{−n} (D_jT)([X_jθ]((· − a)/t)) dt, by Gauss–Legendre in t.
double deformation_integral(const DistributionRep& t, const Point& a, double r, double s,
                            const TestFunction& theta, int t_nodes);

/// |(T^{a,r} − T^{a,s})(θ) − deformation_integral(...)|.
double deformation_residual(const DistributionRep& t, const Point& a, double r, double s,
                            const TestFunction& theta, int t_nodes);

/// sup{ν_{i,p}(X_jθ) : ν_{i,p}(θ) ≤ 1} bound from the Leibniz estimate:
/// 1 for i = 0 (|x_j| ≤ 1 on the unit ball) and 2 otherwise.
double localness_constant(const norms::NormSpec& spec);

/// The four probes Φ, X_0Φ, and Φ(·∓0.3)/0.7 translates, each scaled to ν = 1.
std::vector<TestFunction> probe_family(int dim, const norms::NormSpec& spec);

struct LimitResult {
  Jet jet;
  /// Measured sup_t t^{−α} t^{−n/q−i}|D_jT|_{−i,q;a,t} over the ladder.
  double measured_m = 0.0;
  /// sup over ladder and probes of r^{−α−1}|(T^{a,r} − P)(θ)|.
  double achieved = 0.0;
  /// C·M·n/(α + 1)
  double bound = 0.0;
  bool within_bound = false;
  std::vector<double> ladder;
  Json table = Json::array();
};

/// Extrapolates the blow-ups of T at a to their constant limit and checks the
/// deformation bound for the probe family. Throws HypothesisUnverified if the
/// measured derivative modulus exceeds `m_bound`, NoConvergence if the probe
/// limits disagree with a constant.
LimitResult deformation_limit(const DistributionRep& t, const Point& a, const norms::NormSpec& spec,
                              double alpha, double delta, double m_bound, double c_const = -1.0,
                              int levels = 6);

}  // namespace jetscope::rescale
