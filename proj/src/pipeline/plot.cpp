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

#include "pipeline/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace mdplan::pipeline {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
         "</text>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + ph + 16) + "\" text-anchor=\"middle\">" + tick(xv) +
           "</text>\n";
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) +
           "</text>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
           num(py(yv)) + "\" stroke=\"#ddd\"/>\n";
  }
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">" +
         escape(x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kTop + ph / 2) + ")\">" + escape(y_label) + "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
    std::string pts;
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      pts += (i ? " " : "") + num(px(series[s].x[i])) + "," + num(py(series[s].y[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + pts +
           "\"/>\n";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      svg += "<circle cx=\"" + num(px(series[s].x[i])) + "\" cy=\"" + num(py(series[s].y[i])) + "\" r=\"2.5\" fill=\"" +
             color + "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(s);
    svg += "<line x1=\"" + num(kWidth - kRight + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(kWidth - kRight + 32) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(kWidth - kRight + 38) + "\" y=\"" + num(ly) + "\">" + escape(series[s].name) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "steps,pdms,latency_ms\n";
  char buf[128];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", p.steps, p.pdms, p.latency_ms);
    out += buf;
  }
  return out;
}

std::vector<std::string> plot_files(const std::vector<std::string>& inputs, const std::string& out_dir) {
  if (inputs.empty()) throw ParseError("plot: no input files");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& path : inputs) {
    const CsvTable t = read_csv(path);
    const std::string stem = (std::filesystem::path(out_dir) / std::filesystem::path(path).stem()).string();
    if (t.has_column("gen_loss")) {
      const auto x = t.numbers("epoch");
      std::vector<Series> s = {{"generation", x, t.numbers("gen_loss")}, {"refinement", x, t.numbers("refine_loss")}};
      write_text(stem + "_loss.svg", svg_line_chart("Supervised loss", "epoch", "loss", s));
      written.push_back(stem + "_loss.svg");
    } else if (t.has_column("mean_r")) {
      const auto x = t.numbers("step");
      std::vector<Series> s = {{"rollouts", x, t.numbers("mean_r")}, {"refined", x, t.numbers("mean_r_refined")}};
      write_text(stem + "_reward.svg", svg_line_chart("Reinforcement reward", "step", "mean reward", s));
      written.push_back(stem + "_reward.svg");
    } else if (t.has_column("steps")) {
      const auto steps = t.numbers("steps");
      const auto score = t.numbers("pdms");
      const auto lat = t.numbers("latency_ms");
      write_text(stem + "_score_vs_steps.svg",
                 svg_line_chart("Score vs steps", "denoising steps", "mean score", {{"score", steps, score}}));
      write_text(stem + "_score_vs_latency.svg",
                 svg_line_chart("Score vs latency", "median latency (ms)", "mean score", {{"score", lat, score}}));
      written.push_back(stem + "_score_vs_steps.svg");
      written.push_back(stem + "_score_vs_latency.svg");
    } else {
      throw ParseError(path + ":1: unrecognized columns; expected a loss log, a metrics log or a steps sweep");
    }
  }
  return written;
}

}  // namespace mdplan::pipeline
