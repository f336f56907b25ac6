/* Copyright 2026 The tokmem Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "tokmem/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace tokmem {

namespace {

std::string format_median(double median) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", median);
  return buf;
}

std::string format_kg(double kg) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", kg);
  return buf;
}

}  // namespace

std::vector<IndexStats> token_distribution(std::span<const Thread> threads) {
  std::map<std::uint32_t, std::vector<std::uint64_t>> by_index;
  for (const Thread& t : threads) {
    for (const Message& m : t.messages) {
      by_index[m.message_index].push_back(m.prompt_tokens);
    }
  }
  std::vector<IndexStats> stats;
  stats.reserve(by_index.size());
  for (auto& [index, values] : by_index) {
    std::sort(values.begin(), values.end());
    IndexStats s;
    s.message_index = index;
    s.n = values.size();
    s.min = values.front();
    s.max = values.back();
    std::size_t n = values.size();
    if (n % 2 == 1) {
      s.median = static_cast<double>(values[n / 2]);
    } else {
      s.median = (static_cast<double>(values[n / 2 - 1]) +
                  static_cast<double>(values[n / 2])) /
                 2.0;
    }
    // Nearest-rank p90: the ceil(0.9 n)-th smallest observation.
    std::size_t rank = (9 * n + 9) / 10;  // ceil(0.9 n) in integers
    if (rank < 1) rank = 1;
    s.p90 = values[rank - 1];
    stats.push_back(s);
  }
  return stats;
}

PauseHistogram pause_histogram(std::span<const Thread> threads,
                               int bins_per_decade) {
  PauseHistogram hist;
  if (bins_per_decade < 1) bins_per_decade = 1;
  std::map<std::int64_t, std::uint64_t> bin_counts;
  std::int64_t max_bin = -1;
  for (const Thread& t : threads) {
    for (const Message& m : t.messages) {
      if (!m.pause_seconds) continue;
      std::int64_t pause = *m.pause_seconds;
      if (pause < 1) {
        ++hist.underflow;
        continue;
      }
      double p = static_cast<double>(pause);
      auto edge = [&](std::int64_t k) {
        return std::pow(10.0, static_cast<double>(k) / bins_per_decade);
      };
      std::int64_t k = static_cast<std::int64_t>(
          std::floor(std::log10(p) * bins_per_decade));
      // Guard the float edges: k must satisfy edge(k) <= p < edge(k+1).
      while (k > 0 && p < edge(k)) --k;
      while (p >= edge(k + 1)) ++k;
      ++bin_counts[k];
      max_bin = std::max(max_bin, k);
    }
  }
  if (max_bin < 0) return hist;
  hist.counts.assign(static_cast<std::size_t>(max_bin) + 1, 0);
  for (const auto& [k, count] : bin_counts) {
    hist.counts[static_cast<std::size_t>(k)] = count;
  }
  hist.edges.resize(hist.counts.size() + 1);
  for (std::size_t k = 0; k < hist.edges.size(); ++k) {
    hist.edges[k] =
        std::pow(10.0, static_cast<double>(k) / bins_per_decade);
  }
  return hist;
}

void write_token_distribution_csv(std::ostream& out,
                                  std::span<const IndexStats> stats) {
  out << "message_index,n,min,median,p90,max\n";
  for (const IndexStats& s : stats) {
    out << s.message_index << ',' << s.n << ',' << s.min << ','
        << format_median(s.median) << ',' << s.p90 << ',' << s.max << '\n';
  }
}

void write_pause_histogram_csv(std::ostream& out, const PauseHistogram& hist) {
  out << "bin_low_seconds,bin_high_seconds,count\n";
  char low[64], high[64];
  if (hist.underflow > 0 || !hist.counts.empty()) {
    out << "0,1," << hist.underflow << '\n';
  }
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    std::snprintf(low, sizeof(low), "%.6g", hist.edges[i]);
    std::snprintf(high, sizeof(high), "%.6g", hist.edges[i + 1]);
    out << low << ',' << high << ',' << hist.counts[i] << '\n';
  }
}

void write_summary_md(std::ostream& out, const SummaryInputs& inputs) {
  out << "# Token log analysis summary\n\n";
  out << "- Threads analyzed: " << inputs.thread_count << "\n";
  out << "- Orphan threads (records ahead of any thread marker): "
      << inputs.orphan_count << "\n";
  out << "- Messages: " << inputs.message_count << "\n\n";

  out << "## Reset simulation sweep\n\n";
  if (inputs.results.empty()) {
    out << "No simulation results.\n";
  } else {
    out << "| threshold | before | after | reduction | threads affected | "
           "resets |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const SimulationResult& r : inputs.results) {
      out << "| " << format_threshold(r.threshold_seconds) << " s | "
          << r.total_prompt_tokens_before << " | "
          << r.total_prompt_tokens_after << " | "
          << format_pct(r.reduction_fraction) << "% | " << r.threads_affected
          << " | " << r.resets_applied << " |\n";
    }
    if (inputs.default_sweep) {
      out << "\nThe 24 h and 30 min endpoints are the documented sweep "
             "bounds; the intermediate thresholds are configurable "
             "interpolations, not measured reference points.\n";
    }
  }

  if (!inputs.impacts.empty()) {
    out << "\n## Estimated savings\n\n";
    out << "| threshold | tokens saved | cost saved | CO2e saved |\n";
    out << "|---|---|---|---|\n";
    for (std::size_t i = 0; i < inputs.impacts.size(); ++i) {
      const ImpactEstimate& est = inputs.impacts[i];
      out << "| ";
      if (i < inputs.results.size()) {
        out << format_threshold(inputs.results[i].threshold_seconds) << " s";
      } else {
        out << "-";
      }
      out << " | " << est.tokens_saved << " | " << est.cost_saved.str() << ' '
          << est.currency_code << " | ";
      for (std::size_t m = 0; m < est.co2e_saved_by_model.size(); ++m) {
        if (m > 0) out << "; ";
        out << est.co2e_saved_by_model[m].first << ' '
            << format_kg(est.co2e_saved_by_model[m].second) << " kg";
      }
      out << " |\n";
    }
    out << "\nCO2e figures extrapolate a reference model's measured energy "
           "per token by parameter count and grid intensity; they are "
           "order-of-magnitude estimates, not measurements.\n";
  }
}

}  // namespace tokmem
