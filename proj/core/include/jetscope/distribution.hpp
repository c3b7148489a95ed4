#pragma once

#include <optional>
#include <vector>

#include "jetscope/grid.hpp"
#include "jetscope/jet.hpp"
#include "jetscope/multi_index.hpp"
#include "jetscope/test_function.hpp"

namespace jetscope {

/// c · D^β f in the weak sense.
struct FieldTerm {
  MultiIndex beta;
  SampledField field;
  double coefficient = 1.0;
};

/// c · D^β δ_x, acting as θ ↦ c (−1)^{|β|} D^βθ(x).
struct Atom {
  Point location{};
  double weight = 1.0;
  MultiIndex beta;
};

/// The function P (a jet), acting as θ ↦ c ∫ P θ.
struct PolynomialTerm {
  Jet jet;
  double coefficient = 1.0;
};

/// A distribution given as a finite sum of weak derivatives of sampled fields,
/// Dirac atoms and polynomials. Nothing is differentiated at construction.
class DistributionRep {
 public:
  explicit DistributionRep(int dim = 1) : dim_(dim) {}

  static DistributionRep from_field(SampledField f, MultiIndex beta = {}, double c = 1.0);
  static DistributionRep dirac(int dim, Point x, double weight = 1.0);
  static DistributionRep from_jet(const Jet& p);

  DistributionRep& add_field(SampledField f, MultiIndex beta = {}, double c = 1.0);
  DistributionRep& add_atom(Point x, double weight = 1.0, MultiIndex beta = {});
  DistributionRep& add_polynomial(const Jet& p, double c = 1.0);

  int dim() const noexcept { return dim_; }
  /// The common grid of all field terms, if any.
  const Grid* grid() const noexcept { return grid_ ? &*grid_ : nullptr; }
  const std::vector<FieldTerm>& fields() const noexcept { return fields_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<PolynomialTerm>& polynomials() const noexcept { return polys_; }
  int max_order() const noexcept;
  bool empty() const noexcept { return fields_.empty() && atoms_.empty() && polys_.empty(); }

  /// D^β T
  DistributionRep derivative(const MultiIndex& beta) const;
  DistributionRep derivative(int axis) const { return derivative(MultiIndex::unit(dim_, axis)); }
  /// T − P where the jet acts as a function.
  DistributionRep minus(const Jet& p) const;

  DistributionRep operator+(const DistributionRep& o) const;
  DistributionRep operator-(const DistributionRep& o) const;
  DistributionRep operator*(double s) const;

 private:
  void adopt_grid(const Grid& g);

  int dim_;
  std::optional<Grid> grid_;
  std::vector<FieldTerm> fields_;
  std::vector<Atom> atoms_;
  std::vector<PolynomialTerm> polys_;
};

/// Highest symbolic derivative order pair() will move onto a test function.
inline constexpr int kMaxPairingOrder = 12;

/// T(θ) = Σ c (−1)^{|β|} ∫ f D^βθ + atom and polynomial contributions. Field
/// integrals use the trapezoid rule on the field grid; polynomial terms use
/// that grid too when present, so T − P cancels exactly for polynomial T.
/// Throws SupportViolation if spt θ leaves `region` or the grid box.
double pair(const DistributionRep& t, const TestFunction& theta, const Ball& region);
double pair(const DistributionRep& t, const TestFunction& theta);

}  // namespace jetscope
