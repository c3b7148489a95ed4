#pragma once

#include <functional>
#include <vector>

#include "jetscope/discrete.hpp"
#include "jetscope/distribution.hpp"
#include "jetscope/grid.hpp"
#include "jetscope/jet.hpp"
#include "jetscope/report.hpp"
#include "jetscope/test_function.hpp"

namespace jetscope::norms {

double conjugate(double p);

/// Derivative order i and exponent p ∈ [1, ∞] with conjugate q.
struct NormSpec {
  int i = 0;
  double p = 2.0;

  NormSpec() = default;
  NormSpec(int order, double exponent);
  double q() const { return conjugate(p); }
  /// The same order with the conjugate exponent.
  NormSpec dual() const { return {i, q()}; }
};

/// Tensor norm of the collection {D^α g : α ∈ Ξ(n, i)} given as a flat list
/// in enumerate_multiindices order.
double tensor_norm(int dim, int i, const double* values);

/// (∫_S |f|^p)^{1/p} by the trapezoid region rule; p = ∞ gives the max over S.
double lp_norm(const SampledField& f, const Ball& s, double p);

/// D^β f for a sampled field, by finite differences unless an exact sampler
/// is supplied.
using DerivativeSource = std::function<SampledField(const MultiIndex&)>;
DerivativeSource finite_differences(const SampledField& f);

/// |D^j f|_{p;S} with the tensor norm; j = 0 reduces to lp_norm.
double derivative_norm(const DerivativeSource& f, int dim, const Ball& s, int j, double p);
/// |D^j (f − P)|_{p;S}
double derivative_norm(const DerivativeSource& f, const Jet& p_jet, const Ball& s, int j, double p);

/// ν_{i,p}(θ) = (∫ ‖D^iθ‖^p)^{1/p}.
double sobolev_seminorm(const TestFunction& theta, const NormSpec& spec);
/// ‖D^iθ‖ restricted to a ball, for zero-boundary checks.
double sobolev_seminorm(const TestFunction& theta, int i, double p);

enum class DualMethod { Optimization, Riesz };

struct DualResult {
  double value = 0.0;
  /// Certified upper bound when available (i = 0), else equal to value.
  double upper = 0.0;
  double gap = 0.0;
  int iterations = 0;
  /// Maximizer with unit discrete seminorm (optimization route only).
  Eigen::VectorXd theta;
};

/// |T|_{−i,p;S} = sup{T(θ) : spt θ ⊂ S, ‖D^iθ‖_{L^q} ≤ 1} with p on the T side.
double dual_norm(const DistributionRep& t, const Ball& s, const NormSpec& spec,
                 DualMethod method = DualMethod::Riesz);
DualResult dual_norm_detailed(const DistributionRep& t, const Ball& s, const NormSpec& spec,
                              DualMethod method);
/// Explicit discretization grid, required when T carries no sampled field.
DualResult dual_norm_detailed(const DistributionRep& t, const Grid& grid, const Ball& s,
                              const NormSpec& spec, DualMethod method);
double dual_norm(const DistributionRep& t, const Grid& grid, const Ball& s, const NormSpec& spec,
                 DualMethod method = DualMethod::Riesz);

/// Lower-level entry: maximize bᵀθ over the masked space for a prepared functional.
DualResult maximize_pairing(const MaskedRegion& mask, const Eigen::VectorXd& b, int i, double q);

/// Degree ≤ k − 1 polynomial from the mean-of-derivatives recursion.
Jet poincare_polynomial(const DerivativeSource& f, int dim, const Ball& s, int k);
Jet poincare_polynomial(const SampledField& f, const Ball& s, int k);

VerifierReport verify_poincare(const DerivativeSource& f, int dim, const Ball& s, int k, double p,
                               double slack = 1e-9);
VerifierReport verify_poincare(const SampledField& f, const Ball& s, int k, double p,
                               double slack = 1e-9);

/// θ is a test function supported in `s`; checks |D^jθ|_p ≤ r^{k−j}|D^kθ|_p.
VerifierReport verify_zero_boundary_poincare(const TestFunction& theta, const Ball& s, int k, int j,
                                             double p, double slack = 1e-9);

/// Smallest C with r^i|D^iu|_p ≤ ε r^k|D^ku|_p + C|u|_p over the family,
/// evaluated on the given grid and on its refinement (h/2).
struct InterpolationResult {
  double c_coarse = 0.0;
  double c_fine = 0.0;
  VerifierReport report;
};
using FamilyMember = std::function<double(const Point&)>;
InterpolationResult verify_interpolation(const std::vector<FamilyMember>& family, const Grid& grid,
                                         const Ball& s, int i, int k, double p, double eps);
/// Single-field form: the measured C for one sampled u.
double interpolation_constant(const SampledField& u, const Ball& s, int i, int k, double p,
                              double eps);

/// |D^α T|_{−k,p;S} ≤ r^{k−j}|T|_{p;S} for |α| = j ≤ k on a sampled T.
VerifierReport verify_derivative_shift(const SampledField& t, const Ball& s, int k, double p);

}  // namespace jetscope::norms
