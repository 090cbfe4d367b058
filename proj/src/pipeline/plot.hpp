// Copyright 2026 The mdplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDPLAN_PIPELINE_PLOT_HPP_
#define MDPLAN_PIPELINE_PLOT_HPP_

#include <string>
#include <vector>

#include "pipeline/csv.hpp"

namespace mdplan::pipeline {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static SVG line chart; output depends only on the arguments.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);

struct SweepPoint {
  int steps = 0;
  double pdms = 0.0;
  double latency_ms = 0.0;
};

/// Columns: steps,pdms,latency_ms.
std::string sweep_csv(const std::vector<SweepPoint>& points);

/// Recognizes SFT loss logs (epoch, gen_loss, refine_loss), RFT metric logs
/// (step, mean_r, mean_r_refined) and step sweeps (steps, pdms, latency_ms)
/// by their columns, and writes one or two SVG files per input into
/// `out_dir`. Returns the written paths.
std::vector<std::string> plot_files(const std::vector<std::string>& inputs, const std::string& out_dir);

}  // namespace mdplan::pipeline

#endif  // MDPLAN_PIPELINE_PLOT_HPP_
