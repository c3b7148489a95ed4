#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jetscope/report.hpp"

namespace jetscope::suites {

struct SuiteOptions {
  std::uint64_t seed = 1;
  int jobs = 1;
};

VerifierReport poincare(const SuiteOptions& opts);
VerifierReport zero_boundary(const SuiteOptions& opts);
VerifierReport interpolation(const SuiteOptions& opts);
VerifierReport deformation(const SuiteOptions& opts);
VerifierReport apriori(const SuiteOptions& opts);
VerifierReport duality(const SuiteOptions& opts);
VerifierReport criterion(const SuiteOptions& opts);
VerifierReport rademacher(const SuiteOptions& opts);
VerifierReport whitney(const SuiteOptions& opts);

const std::vector<std::string>& names();
bool is_suite(const std::string& name);
/// Throws InvalidArgument for unknown names.
VerifierReport run(const std::string& name, const SuiteOptions& opts);

}  // namespace jetscope::suites
