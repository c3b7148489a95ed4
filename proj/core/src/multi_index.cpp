#include "jetscope/multi_index.hpp"

#include <numeric>
#include <sstream>

#include "jetscope/error.hpp"

namespace jetscope {

MultiIndex::MultiIndex(int dim) : dim_(dim) {
  require(dim >= 1 && dim <= kMaxDim, "multi-index dimension must be 1..3");
}

MultiIndex::MultiIndex(int dim, std::array<int, kMaxDim> components) : dim_(dim), c_(components) {
  require(dim >= 1 && dim <= kMaxDim, "multi-index dimension must be 1..3");
  for (int a = 0; a < kMaxDim; ++a) {
    require(c_[a] >= 0, "multi-index components must be nonnegative");
    if (a >= dim) require(c_[a] == 0, "multi-index component beyond its dimension");
  }
}

MultiIndex MultiIndex::unit(int dim, int axis) {
  require(axis >= 0 && axis < dim, "axis out of range");
  MultiIndex m(dim);
  m.c_[axis] = 1;
  return m;
}

int MultiIndex::order() const noexcept { return std::accumulate(c_.begin(), c_.end(), 0); }

MultiIndex MultiIndex::plus(const MultiIndex& other) const {
  require(dim_ == other.dim_, "multi-index dimension mismatch");
  MultiIndex m = *this;
  for (int a = 0; a < kMaxDim; ++a) m.c_[a] += other.c_[a];
  return m;
}

MultiIndex MultiIndex::plus_unit(int axis) const {
  require(axis >= 0 && axis < dim_, "axis out of range");
  MultiIndex m = *this;
  ++m.c_[axis];
  return m;
}

bool MultiIndex::fits_in(const MultiIndex& other) const noexcept {
  for (int a = 0; a < kMaxDim; ++a)
    if (c_[a] > other.c_[a]) return false;
  return true;
}

MultiIndex MultiIndex::minus(const MultiIndex& other) const {
  require(dim_ == other.dim_ && other.fits_in(*this), "multi-index subtraction underflow");
  MultiIndex m = *this;
  for (int a = 0; a < kMaxDim; ++a) m.c_[a] -= other.c_[a];
  return m;
}

double MultiIndex::factorial() const noexcept {
  double f = 1.0;
  for (int a = 0; a < dim_; ++a) f *= jetscope::factorial(c_[a]);
  return f;
}

double MultiIndex::multinomial() const noexcept { return jetscope::factorial(order()) / factorial(); }

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (int a = 0; a < dim_; ++a) os << (a ? "," : "") << c_[a];
  os << ')';
  return os.str();
}

std::vector<MultiIndex> enumerate_multiindices(int n, int k) {
  require(n >= 1 && n <= kMaxDim, "dimension must be 1..3");
  require(k >= 0, "order must be nonnegative");
  std::vector<MultiIndex> out;
  if (n == 1) {
    out.emplace_back(1, std::array<int, kMaxDim>{k, 0, 0});
    return out;
  }
  for (int first = k; first >= 0; --first) {
    for (const auto& tail : enumerate_multiindices(n - 1, k - first)) {
      std::array<int, kMaxDim> c{first, 0, 0};
      for (int a = 0; a < n - 1; ++a) c[a + 1] = tail[a];
      out.emplace_back(n, c);
    }
  }
  return out;
}

std::vector<MultiIndex> multiindices_up_to(int n, int k) {
  std::vector<MultiIndex> out;
  for (int j = 0; j <= k; ++j) {
    auto block = enumerate_multiindices(n, j);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

double factorial(int m) noexcept {
  double f = 1.0;
  for (int j = 2; j <= m; ++j) f *= j;
  return f;
}

std::uint64_t binomial(int n, int k) noexcept {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * static_cast<std::uint64_t>(n - k + j) / static_cast<std::uint64_t>(j);
  return r;
}

}  // namespace jetscope
