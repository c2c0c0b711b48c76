#pragma once

#include <ostream>

namespace aoiris {

/// Compact oracle/property suite behind the `selftest` CLI command. Prints one
/// PASS/FAIL line per check; returns the number of failures.
int run_selftest(std::ostream& os);

}  // namespace aoiris
