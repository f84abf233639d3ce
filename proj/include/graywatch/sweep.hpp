#pragma once

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graywatch/scenario.hpp"

namespace graywatch {

// Accepts "start:stop:step" (inclusive stop, small epsilon) or a comma list.
inline std::vector<double> parse_ratios(const std::string& spec) {
  std::vector<double> out;
  auto parse_num = [](const std::string& s) {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad ratio token: " + s);
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= spec.size(); ++i) {
      if (i == spec.size() || spec[i] == ':') {
        parts.push_back(spec.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() != 3) throw std::invalid_argument("range spec needs start:stop:step");
    double lo = parse_num(parts[0]), hi = parse_num(parts[1]), step = parse_num(parts[2]);
    if (step <= 0.0) throw std::invalid_argument("ratio step must be positive");
    for (double v = lo; v <= hi + step * 1e-9; v += step) out.push_back(v);
  } else {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= spec.size(); ++i) {
      if (i == spec.size() || spec[i] == ',') {
        std::string tok = spec.substr(start, i - start);
        if (!tok.empty()) out.push_back(parse_num(tok));
        start = i + 1;
      }
    }
  }
  if (out.empty()) throw std::invalid_argument("no ratios given");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (double v : out)
    if (v < 0.0 || v >= 1.0) throw std::invalid_argument("ratios must be in [0, 1)");
  return out;
}

struct SweepGroup {
  double ratio = 0.0;
  std::vector<RunReport> runs;
  double mean_fpr = 0.0;
  double mean_fnr = 0.0;
  double mean_dr = 0.0;
  std::optional<double> mean_pdr;
  std::optional<double> mean_delay;
};

inline SweepGroup summarize(double ratio, std::vector<RunReport> runs) {
  SweepGroup g;
  g.ratio = ratio;
  g.runs = std::move(runs);
  double pdr_sum = 0.0, delay_sum = 0.0;
  std::size_t pdr_n = 0, delay_n = 0;
  for (const RunReport& r : g.runs) {
    g.mean_fpr += r.fpr;
    g.mean_fnr += r.fnr;
    g.mean_dr += r.dr;
    if (r.pdr) {
      pdr_sum += *r.pdr;
      pdr_n++;
    }
    if (r.avg_delay_ms) {
      delay_sum += *r.avg_delay_ms;
      delay_n++;
    }
  }
  auto count = static_cast<double>(g.runs.size());
  if (!g.runs.empty()) {
    g.mean_fpr /= count;
    g.mean_fnr /= count;
    g.mean_dr /= count;
  }
  if (pdr_n) g.mean_pdr = pdr_sum / static_cast<double>(pdr_n);
  if (delay_n) g.mean_delay = delay_sum / static_cast<double>(delay_n);
  return g;
}

inline std::string mean_row(const SweepGroup& g) {
  return format3(g.ratio) + ",mean," + format3(g.mean_fpr) + "," + format3(g.mean_fnr) + "," +
         format3(g.mean_dr) + "," + format3(g.mean_pdr) + "," + format3(g.mean_delay);
}

// Runs seeds 1..n_seeds at every ratio. Rows come out sorted by (ratio, seed)
// with one mean row closing each ratio group.
inline std::vector<SweepGroup> run_sweep(const ScenarioConfig& base,
                                         const std::vector<double>& ratios, int n_seeds,
                                         std::ostream* csv = nullptr) {
  if (n_seeds < 1) throw std::invalid_argument("need at least one seed");
  std::vector<SweepGroup> groups;
  if (csv) *csv << report_header() << "\n";
  for (double ratio : ratios) {
    std::vector<RunReport> runs;
    for (int s = 1; s <= n_seeds; ++s) {
      ScenarioConfig cfg = base;
      cfg.attacker_ratio = ratio;
      cfg.seed = static_cast<std::uint64_t>(s);
      runs.push_back(run_scenario(cfg));
      if (csv) *csv << report_row(runs.back()) << "\n";
    }
    groups.push_back(summarize(ratio, std::move(runs)));
    if (csv) *csv << mean_row(groups.back()) << "\n";
  }
  return groups;
}

}  // namespace graywatch
