#pragma once

#include <string>
#include <vector>

namespace pii {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;  // measured worst case
    double limit = 0.0;
};

/// Runs a quick version of every module invariant. Deterministic.
std::vector<CheckResult> run_selftest();

}  // namespace pii
