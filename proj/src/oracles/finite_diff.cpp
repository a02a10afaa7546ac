#include "diffsr/oracles/finite_diff.hpp"

#include <cmath>

namespace diffsr::oracles {

FiniteDiffReport finite_diff_check(const std::function<double()>& f, const std::vector<ParamView>& params,
                                   const std::vector<ParamView>& grads, double eps) {
  if (params.size() != grads.size()) throw DimensionError("finite_diff_check: tensor count mismatch");
  FiniteDiffReport report;
  for (std::size_t t = 0; t < params.size(); ++t) {
    std::span<double> p = params[t].data;
    std::span<const double> g = grads[t].data;
    if (p.size() != g.size()) throw DimensionError("finite_diff_check: size mismatch in " + params[t].name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + eps;
      const double up = f();
      p[i] = saved - eps;
      const double down = f();
      p[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw PoisonError("finite_diff_check: non-finite objective at " + params[t].name + "[" +
                          std::to_string(i) + "]");
      const double numeric = (up - down) / (2.0 * eps);
      const double scale = std::max(std::abs(numeric), std::abs(g[i]));
      if (scale <= kGradientFloor) continue;
      ++report.checked;
      const double rel = std::abs(numeric - g[i]) / scale;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst = params[t].name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

}  // namespace diffsr::oracles
