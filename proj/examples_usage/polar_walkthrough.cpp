// Simulate from a two-atom polar model and recover alpha, the atom masses and
// the total mass.

#include <cstdio>

#include "rvspec.hpp"

int main() {
  using namespace rvspec;
  const ModelSpec model(1.0, 2.0, {{{1.0, 0.0}, 1.2}, {{0.0, 1.0}, 0.8}});
  SeededRng rng(2024, 0);
  const DataMatrix data = sample_polar(model, 100000, rng);

  PipelineConfig config;
  config.r = 0.5;
  config.alpha = 1.0;
  config.regions = {{"x-axis", halfspace_region({1.0, 0.0}, 0.5)}, {"y-axis", halfspace_region({0.0, 1.0}, 0.5)}};
  const PipelineResult res = run_pipeline(data, config);

  std::printf("groups: n=%zu m=%zu\n", res.alpha_scheme.n, res.alpha_scheme.m);
  std::printf("alpha  %.4f  [%.4f, %.4f]\n", res.alpha.alpha_hat, res.alpha_interval.lo, res.alpha_interval.hi);
  for (const auto& region : res.regions) {
    std::printf("%-7s %.4f  [%.4f, %.4f]\n", region.label.c_str(), region.mass, region.ci->lo, region.ci->hi);
  }
  std::printf("mass   %.4f  [%.4f, %.4f]  (t=%.4f)\n", res.mass.mass_hat, res.mass_interval.lo,
              res.mass_interval.hi, res.mass.t);
  for (const auto& w : res.warnings) std::printf("warning: %s\n", w.c_str());
}
