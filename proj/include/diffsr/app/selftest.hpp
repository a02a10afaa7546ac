#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diffsr::app {

/// Oracle battery and spectral validators. Prints one line per check and
/// returns the number of failures. An empty list runs everything.
int run_selftest(std::ostream& out, const std::vector<std::string>& names = {});

}  // namespace diffsr::app
