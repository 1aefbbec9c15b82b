#pragma once

#include <string>
#include <vector>

namespace qzb::tools {

struct CheckResult
{
    std::string suite;
    std::string name;
    double observed = 0.0;
    double expected = 0.0;
    double deviation = 0.0;   // in the units of `tolerance`
    double tolerance = 0.0;
    bool pass = false;
};

enum class CheckLevel { fast, full };

/// TMSV closed form and matrix-exponential equivalence; `full` adds the
/// quantum-jump comparison.
std::vector<CheckResult> run_checks(CheckLevel level, int workers);

} // namespace qzb::tools
