#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jetscope/error.hpp"

namespace jetscope {

using Json = nlohmann::ordered_json;

/// One checked inequality instance.
struct Check {
  std::string label;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = true;
  Json extra = Json::object();
};

/// Outcome of a verifier: a list of checks plus free-form parameters.
struct VerifierReport {
  std::string inequality;
  Json parameters = Json::object();
  std::vector<Check> checks;
  Json summary = Json::object();

  bool pass() const noexcept;
  std::size_t violations() const noexcept;
  void add(std::string label, double measured, double bound, bool pass, Json extra = Json::object());
  /// Adds a `measured ≤ bound + slack` check.
  void add_le(std::string label, double measured, double bound, double slack = 0.0);
  void absorb(const VerifierReport& other);
};

Json to_json(const Check& c);
Json to_json(const VerifierReport& r);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace jetscope
