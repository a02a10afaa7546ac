#include "diffsr/app/selftest.hpp"

#include <algorithm>
#include <ostream>

#include "diffsr/app/checks.hpp"
#include "diffsr/numerics/errors.hpp"

namespace diffsr::app {

int run_selftest(std::ostream& out, const std::vector<std::string>& names) {
  const auto registry = check_registry();
  for (const auto& name : names) {
    const bool known = std::any_of(registry.begin(), registry.end(), [&](const NamedCheck& c) { return c.name == name; });
    if (!known) throw ConfigError("selftest: unknown check '" + name + "'");
  }
  int failures = 0;
  for (const auto& check : registry) {
    if (!names.empty() && std::find(names.begin(), names.end(), check.name) == names.end()) continue;
    CheckResult r;
    try {
      r = check.run();
    } catch (const std::exception& e) {
      r = {check.name, false, std::string("threw: ") + e.what()};
    }
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << std::endl;
    if (!r.passed) ++failures;
  }
  return failures;
}

}  // namespace diffsr::app
