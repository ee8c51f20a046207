/* Copyright 2026 The rwen-tts Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "rwen/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "rwen/nn/random.hpp"

namespace rwen::nn {

std::string GradcheckReport::summary() const {
  std::string out;
  char line[256];
  for (const ParamCheck& c : params) {
    std::snprintf(line, sizeof(line), "%-40s entries=%-4d max_rel=%.3e (analytic %.6e, numeric %.6e)\n", c.name.c_str(),
                  c.entries_checked, c.max_rel_error, c.analytic_at_max, c.numeric_at_max);
    out += line;
  }
  std::snprintf(line, sizeof(line), "max relative error %.3e -> %s\n", max_rel_error, passed ? "PASS" : "FAIL");
  out += line;
  return out;
}

GradcheckReport gradcheck(const LossClosure& loss, ParamSet<double>& params, const GradcheckOptions& options) {
  params.zero_grad();
  {
    Graph<double> g;
    const Var<double> out = loss(g);
    g.backward(out);
    g.accumulate_param_grads();
  }

  auto evaluate = [&]() {
    Graph<double> g(false);
    return loss(g).value()(0, 0);
  };

  GradcheckReport report;
  Rng rng(options.sample_seed);
  for (const auto& p : params) {
    ParamCheck check;
    check.name = p->name;
    const Eigen::Index total = p->value.size();
    std::vector<Eigen::Index> entries(static_cast<std::size_t>(total));
    std::iota(entries.begin(), entries.end(), Eigen::Index{0});
    if (total > options.max_entries_per_param) {
      // Partial Fisher-Yates shuffle for a seeded sample.
      for (int k = 0; k < options.max_entries_per_param; ++k) {
        const auto j = static_cast<std::size_t>(k + rng.below(static_cast<int>(total) - k));
        std::swap(entries[static_cast<std::size_t>(k)], entries[j]);
      }
      entries.resize(static_cast<std::size_t>(options.max_entries_per_param));
    }
    for (const Eigen::Index idx : entries) {
      double& x = p->value.data()[idx];
      const double saved = x;
      x = saved + options.step;
      const double up = evaluate();
      x = saved - options.step;
      const double down = evaluate();
      x = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double analytic = p->grad.data()[idx];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), options.denominator_floor});
      const double rel = std::abs(analytic - numeric) / denom;
      ++check.entries_checked;
      if (rel > check.max_rel_error || check.entries_checked == 1) {
        check.max_rel_error = std::max(rel, check.max_rel_error);
        check.analytic_at_max = analytic;
        check.numeric_at_max = numeric;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.params.push_back(std::move(check));
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace rwen::nn
