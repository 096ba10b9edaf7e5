#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbm/report.hpp"

namespace mbm {

struct SuiteContext {
  std::uint64_t seed = 1;
  int workers = 1;
};

using SuiteFn = ReportRecord (*)(const SuiteContext&);

struct SuiteInfo {
  std::string name;
  int criterion;
  std::string summary;
  SuiteFn run;
};

const std::vector<SuiteInfo>& suite_registry();

// Throws ConfigError("suite", ...) listing the registered names when unknown.
ReportRecord verify_suite(const std::string& name, const SuiteContext& ctx = {});

}  // namespace mbm
