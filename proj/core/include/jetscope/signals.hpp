#pragma once

#include <string>

#include "jetscope/grid.hpp"

namespace jetscope {

/// Built-in synthetic inputs. Names: absx, xabsx, heaviside, smooth, bump,
/// weierstrass[:beta[:m_max]]. One-dimensional profiles act on x_0 in 2D;
/// smooth and bump are radial.
struct SignalSpec {
  std::string name = "absx";
  double beta = 0.5;
  int m_max = 12;

  double operator()(const Point& x, int dim) const;
};

SignalSpec parse_signal(const std::string& text);
SampledField make_signal(const SignalSpec& spec, const Grid& grid);
bool is_known_signal(const std::string& name);

}  // namespace jetscope
