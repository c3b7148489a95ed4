#pragma once

#include <vector>

#include "jetscope/distribution.hpp"
#include "jetscope/jet.hpp"
#include "jetscope/norms.hpp"
#include "jetscope/report.hpp"

namespace jetscope::jets {

struct JetFit {
  Jet jet;
  double residual = 0.0;
  int iterations = 0;
};

/// P of degree ≤ k minimizing ‖f − P‖_{L^p(B(a,r))}. Coordinates (x − a)/r.
JetFit fit_jet_lp(const SampledField& f, const Point& a, double r, int k, double p);

/// P of degree ≤ k minimizing |T − P|_{−i,p;a,r} (p on the T side).
JetFit fit_jet_dual(const DistributionRep& t, const Point& a, double r, int k,
                    const norms::NormSpec& spec);

/// Fits for every degree −1..k_max at one scale, sharing the region solves.
std::vector<JetFit> fit_jets_dual(const DistributionRep& t, const Point& a, double r, int k_max,
                                  const norms::NormSpec& spec);

/// coeffs[β] = D^β f(a) from finite-difference derivative fields.
Jet taylor_jet(const SampledField& f, const Point& a, int k);

/// Checks that the normalized residual r^{−n/q−k−i}|f − P|_{−i,q;a,r} with the
/// Taylor jet P decays along the ladder (last-four slope ≤ −τ per halving).
VerifierReport reshetnyak_check(const SampledField& f, const Point& a, int k,
                                const norms::NormSpec& spec, const std::vector<double>& ladder,
                                double tau = 0.25);

}  // namespace jetscope::jets
