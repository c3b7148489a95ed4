#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace jetscope {

inline constexpr int kMaxDim = 3;

/// Multi-index β = (β_1, ..., β_n) with nonnegative components.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int dim);
  MultiIndex(int dim, std::array<int, kMaxDim> components);

  static MultiIndex zero(int dim) { return MultiIndex(dim); }
  static MultiIndex unit(int dim, int axis);
  /// Convenience for n = 1 and n = 2.
  static MultiIndex of(int a) { return MultiIndex(1, {a, 0, 0}); }
  static MultiIndex of(int a, int b) { return MultiIndex(2, {a, b, 0}); }

  int dim() const noexcept { return dim_; }
  int order() const noexcept;
  int operator[](int axis) const { return c_[static_cast<std::size_t>(axis)]; }

  MultiIndex plus(const MultiIndex& other) const;
  MultiIndex plus_unit(int axis) const;
  /// True when every component is ≤ the matching component of `other`.
  bool fits_in(const MultiIndex& other) const noexcept;
  MultiIndex minus(const MultiIndex& other) const;

  /// β! = β_1! ⋯ β_n!
  double factorial() const noexcept;
  /// Multinomial weight |β|! / β! used by the inner-product tensor norm.
  double multinomial() const noexcept;

  std::string str() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend std::strong_ordering operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  int dim_ = 1;
  std::array<int, kMaxDim> c_{};
};

/// Ξ(n, k): all multi-indices of order exactly k, in graded lexicographic
/// order (first component descending).
std::vector<MultiIndex> enumerate_multiindices(int n, int k);

/// All multi-indices of order 0..k concatenated, each block as above.
std::vector<MultiIndex> multiindices_up_to(int n, int k);

double factorial(int m) noexcept;
std::uint64_t binomial(int n, int k) noexcept;

}  // namespace jetscope
