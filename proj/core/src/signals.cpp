#include "jetscope/signals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "jetscope/error.hpp"

namespace jetscope {

namespace {

const std::vector<std::string>& known() {
  static const std::vector<std::string> names{"absx", "xabsx", "heaviside", "weierstrass", "smooth", "bump"};
  return names;
}

}  // namespace

bool is_known_signal(const std::string& name) {
  for (const auto& n : known())
    if (n == name) return true;
  return false;
}

double SignalSpec::operator()(const Point& x, int dim) const {
  const double x0 = x[0];
  const double rr = dim == 2 ? x[0] * x[0] + x[1] * x[1] : x0 * x0;
  if (name == "absx") return std::abs(x0);
  if (name == "xabsx") return x0 * std::abs(x0);
  if (name == "heaviside") return x0 > 0.0 ? 1.0 : (x0 < 0.0 ? 0.0 : 0.5);
  if (name == "weierstrass") {
    double acc = 0.0;
    for (int m = 0; m <= m_max; ++m) acc += std::pow(2.0, -m * beta) * std::cos(std::ldexp(std::numbers::pi, m) * x0);
    return acc;
  }
  if (name == "smooth") return std::exp(0.5 * x0 - rr);
  if (name == "bump") {
    const double s = 1.0 - rr / 0.64;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
  }
  fail(ErrorCode::InvalidArgument, "unknown signal '" + name + "'");
}

SignalSpec parse_signal(const std::string& text) {
  SignalSpec spec;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty() || !is_known_signal(parts[0]))
    fail(ErrorCode::InvalidArgument, "unknown signal '" + text + "'");
  spec.name = parts[0];
  if (parts.size() > 1 && spec.name != "weierstrass")
    fail(ErrorCode::InvalidArgument, "signal '" + spec.name + "' takes no parameters");
  if (parts.size() > 3) fail(ErrorCode::InvalidArgument, "too many signal parameters");
  try {
    if (parts.size() > 1) spec.beta = std::stod(parts[1]);
    if (parts.size() > 2) spec.m_max = std::stoi(parts[2]);
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "malformed signal parameters in '" + text + "'");
  }
  if (!(spec.beta > 0.0 && spec.beta <= 1.0)) fail(ErrorCode::InvalidArgument, "weierstrass beta must lie in (0, 1]");
  if (spec.m_max < 0 || spec.m_max > 60) fail(ErrorCode::InvalidArgument, "weierstrass m_max must lie in [0, 60]");
  return spec;
}

SampledField make_signal(const SignalSpec& spec, const Grid& grid) {
  require(is_known_signal(spec.name), "unknown signal '" + spec.name + "'");
  return SampledField::sample(grid, [&](const Point& x) { return spec(x, grid.dim()); });
}

}  // namespace jetscope
