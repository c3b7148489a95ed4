#include "jetscope/report.hpp"

#include <charconv>
#include <cmath>

namespace jetscope {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::MissingDerivativeData: return "MissingDerivativeData";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::UnsupportedExponent: return "UnsupportedExponent";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::BoundaryPoint: return "BoundaryPoint";
    case ErrorCode::HypothesisUnverified: return "HypothesisUnverified";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::DegenerateSum: return "DegenerateSum";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool VerifierReport::pass() const noexcept { return violations() == 0; }

std::size_t VerifierReport::violations() const noexcept {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.pass ? 0 : 1;
  return n;
}

void VerifierReport::add(std::string label, double measured, double bound, bool ok, Json extra) {
  checks.push_back({std::move(label), measured, bound, ok, std::move(extra)});
}

void VerifierReport::add_le(std::string label, double measured, double bound, double slack) {
  const bool ok = std::isfinite(measured) && measured <= bound + slack;
  add(std::move(label), measured, bound, ok);
}

void VerifierReport::absorb(const VerifierReport& other) {
  for (const auto& c : other.checks) checks.push_back(c);
}

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? Json("nan") : Json(v > 0 ? "inf" : "-inf");
}

}  // namespace

Json to_json(const Check& c) {
  Json j;
  j["label"] = c.label;
  j["measured"] = number(c.measured);
  j["bound"] = number(c.bound);
  j["pass"] = c.pass;
  if (!c.extra.empty()) j["extra"] = c.extra;
  return j;
}

Json to_json(const VerifierReport& r) {
  Json j;
  j["inequality"] = r.inequality;
  j["parameters"] = r.parameters;
  j["pass"] = r.pass();
  j["violations"] = r.violations();
  j["checks"] = Json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  if (!r.summary.empty()) j["summary"] = r.summary;
  return j;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace jetscope
