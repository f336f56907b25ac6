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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tokmem/errors.hpp"
#include "tokmem/impact.hpp"
#include "tokmem/ingest.hpp"
#include "tokmem/manifest.hpp"
#include "tokmem/memory_model.hpp"
#include "tokmem/report.hpp"
#include "tokmem/simulate.hpp"
#include "tokmem/threads.hpp"
#include "tokmem/version.hpp"
#include "tokmem/workload.hpp"

namespace tokmem {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// All artifacts go through a temp file and a rename so a failing stage
// leaves no partial output behind.
template <typename WriteFn>
void write_artifact(const std::string& path, WriteFn&& fn) {
  fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw FatalError("cannot write file: " + path);
      fn(out);
      out.flush();
      if (!out) throw FatalError("cannot write file: " + path);
    }
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

LogFormat resolve_format(const std::string& flag, const std::string& path) {
  if (!flag.empty()) return parse_format_tag(flag);
  if (path.ends_with(".jsonl")) return LogFormat::Jsonl;
  return LogFormat::Csv;
}

std::string manifest_dir(const std::string& artifact_path) {
  fs::path parent = fs::path(artifact_path).parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

// Flag value, then $TOKMEM_CONFIG_DIR, then ./configs checked in that order.
std::string resolve_config(const std::string& flag, const char* filename) {
  if (!flag.empty()) return flag;
  if (const char* dir = std::getenv("TOKMEM_CONFIG_DIR")) {
    fs::path p = fs::path(dir) / filename;
    if (fs::exists(p)) return p.string();
  }
  fs::path local = fs::path("configs") / filename;
  if (fs::exists(local)) return local.string();
  throw FatalError(std::string("cannot find ") + filename +
                   "; pass the flag or set TOKMEM_CONFIG_DIR");
}

struct GenerateOptions {
  std::string preset = "paper-like";
  std::string config_file;
  std::string out = "log.csv";
  std::string truth = "truth.jsonl";
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set{};
  std::uint64_t users = 0;
  bool users_set{};
  std::uint64_t threads = 0;
  bool threads_set{};
  double irregular_rate = 0;
  bool irregular_set{};
  bool adversarial{};
  int jobs = 1;
};

void run_generate(const GenerateOptions& opt) {
  GeneratorConfig config;
  if (!opt.config_file.empty()) {
    config = load_generator_config_file(opt.config_file);
  } else if (opt.preset == "paper-like") {
    config = paper_like_preset();
  } else {
    throw UsageError("unknown preset '" + opt.preset +
                     "' (available: paper-like)");
  }
  if (opt.seed_set) config.seed = opt.seed;
  if (opt.users_set) config.n_users = opt.users;
  if (opt.threads_set) config.n_threads = opt.threads;
  if (opt.irregular_set) config.irregular_rate = opt.irregular_rate;
  if (opt.adversarial) config.adversarial = true;

  auto [records, truth] = generate(config, opt.jobs);
  perturb(records, truth, config);

  LogFormat format = resolve_format(opt.format, opt.out);
  write_artifact(opt.out, [&](std::ostream& out) {
    if (format == LogFormat::Csv) {
      write_csv(out, records);
    } else {
      write_jsonl(out, records);
    }
  });
  write_artifact(opt.truth,
                 [&](std::ostream& out) { write_truth(out, truth); });

  RunManifest manifest;
  manifest.stage = "generate";
  if (!opt.config_file.empty()) manifest.inputs.push_back(opt.config_file);
  manifest.outputs = {opt.out, opt.truth};
  manifest.config["preset"] = opt.config_file.empty() ? opt.preset : "";
  manifest.config["seed"] = std::to_string(config.seed);
  manifest.config["n_users"] = std::to_string(config.n_users);
  manifest.config["n_threads"] = std::to_string(config.n_threads);
  manifest.config["title_delta"] = std::to_string(config.title_delta);
  manifest.config["irregular_rate"] = std::to_string(config.irregular_rate);
  manifest.config["adversarial"] = config.adversarial ? "true" : "false";
  manifest.config["format"] = std::string(format_tag(format));
  manifest.config["jobs"] = std::to_string(opt.jobs);
  write_manifest(manifest_dir(opt.out), manifest);
}

struct IngestOptions {
  std::string in;
  std::string format;
  std::string out = "ingested.jsonl";
  std::string report = "ingest.report.json";
};

ParseResult run_ingest(const IngestOptions& opt) {
  LogFormat format = resolve_format(opt.format, opt.in);
  ParseResult parsed = parse_log_file(opt.in, format);
  sort_records(parsed.records);

  write_artifact(opt.out, [&](std::ostream& out) {
    if (opt.out.ends_with(".csv")) {
      write_csv(out, parsed.records);
    } else {
      write_jsonl(out, parsed.records);
    }
  });
  write_artifact(opt.report, [&](std::ostream& out) {
    ordered_json doc;
    doc["row_count"] = parsed.report.row_count;
    doc["user_count"] = parsed.report.user_count;
    if (parsed.report.time_span) {
      doc["time_span"] = {{"start", format_utc(parsed.report.time_span->first)},
                          {"end", format_utc(parsed.report.time_span->second)}};
    } else {
      doc["time_span"] = nullptr;
    }
    ordered_json rejected = ordered_json::array();
    for (const RejectedRow& row : parsed.report.rejected_rows) {
      rejected.push_back({{"line", row.line}, {"reason", row.reason}});
    }
    doc["rejected_rows"] = std::move(rejected);
    out << doc.dump(2) << '\n';
  });

  RunManifest manifest;
  manifest.stage = "ingest";
  manifest.inputs = {opt.in};
  manifest.outputs = {opt.out, opt.report};
  manifest.config["format"] = std::string(format_tag(format));
  write_manifest(manifest_dir(opt.out), manifest);
  return parsed;
}

struct ReconstructOptions {
  std::string in;
  std::string format;
  std::string out = "threads.jsonl";
  std::string report = "reconstruct.report.json";
  std::uint64_t title_delta = 0;
  bool delta_set{};
  std::string monotonic = "nondecreasing";
};

std::vector<Thread> run_reconstruct(const ReconstructOptions& opt) {
  LogFormat format = resolve_format(opt.format, opt.in);
  ParseResult parsed = parse_log_file(opt.in, format);
  sort_records(parsed.records);

  std::uint64_t delta =
      opt.delta_set ? opt.title_delta : infer_title_delta(parsed.records);
  if (delta == 0) throw UsageError("--title-delta must be >= 1");
  MonotonicMode mode = parse_monotonic_mode(opt.monotonic);

  ThreadDiagnostics diag;
  std::vector<HelperMarker> markers =
      detect_helpers(parsed.records, delta, &diag);
  std::vector<Thread> labeled = label_threads(parsed.records, markers, &diag);
  auto [kept, dropped] = filter_irregular(std::move(labeled), mode);
  annotate(kept);

  write_artifact(opt.out,
                 [&](std::ostream& out) { write_threads(out, kept); });
  write_artifact(opt.report, [&](std::ostream& out) {
    ordered_json doc;
    doc["title_delta"] = delta;
    doc["title_delta_inferred"] = !opt.delta_set;
    doc["monotonic"] = std::string(monotonic_mode_tag(mode));
    doc["helper_count"] = diag.helper_count;
    doc["orphan_threads"] = diag.orphan_thread_count;
    doc["threads_kept"] = kept.size();
    doc["threads_dropped_irregular"] = dropped;
    ordered_json notes = ordered_json::array();
    constexpr std::size_t kMaxNotes = 100;
    for (std::size_t i = 0; i < diag.notes.size() && i < kMaxNotes; ++i) {
      notes.push_back(diag.notes[i]);
    }
    doc["diagnostics"] = std::move(notes);
    doc["diagnostics_total"] = diag.notes.size();
    out << doc.dump(2) << '\n';
  });

  RunManifest manifest;
  manifest.stage = "reconstruct";
  manifest.inputs = {opt.in};
  manifest.outputs = {opt.out, opt.report};
  manifest.config["title_delta"] = std::to_string(delta);
  manifest.config["title_delta_inferred"] = opt.delta_set ? "false" : "true";
  manifest.config["monotonic"] = std::string(monotonic_mode_tag(mode));
  write_manifest(manifest_dir(opt.out), manifest);
  return kept;
}

struct SimulateOptions {
  std::string in;
  std::string thresholds;
  bool keep_orphans{};
  int jobs = 1;
  std::string out = "results.csv";
  std::string json = "results.json";
};

std::vector<SimulationResult> run_simulate(const SimulateOptions& opt,
                                           const std::vector<Thread>* threads) {
  std::vector<Thread> loaded;
  if (threads == nullptr) {
    loaded = read_threads_file(opt.in);
    threads = &loaded;
  }
  std::vector<std::int64_t> sweep_list = opt.thresholds.empty()
                                             ? default_thresholds()
                                             : parse_thresholds(opt.thresholds);
  std::vector<SimulationResult> results =
      sweep(*threads, sweep_list, opt.keep_orphans, opt.jobs);

  write_artifact(opt.out,
                 [&](std::ostream& out) { write_results_csv(out, results); });
  write_artifact(opt.json,
                 [&](std::ostream& out) { write_results_json(out, results); });

  RunManifest manifest;
  manifest.stage = "simulate";
  if (!opt.in.empty()) manifest.inputs = {opt.in};
  manifest.outputs = {opt.out, opt.json};
  std::string thresholds_tag;
  for (std::int64_t t : sweep_list) {
    if (!thresholds_tag.empty()) thresholds_tag += ',';
    thresholds_tag += format_threshold(t);
  }
  manifest.config["thresholds"] = thresholds_tag;
  manifest.config["keep_orphans"] = opt.keep_orphans ? "true" : "false";
  manifest.config["jobs"] = std::to_string(opt.jobs);
  write_manifest(manifest_dir(opt.out), manifest);
  return results;
}

struct ImpactOptions {
  std::string results;
  std::uint64_t tokens_saved = 0;
  bool tokens_set{};
  std::string pricing;
  std::string energy;
  std::string model;
  std::string out = "impact.json";
};

std::vector<ImpactEstimate> run_impact(
    const ImpactOptions& opt, const std::vector<SimulationResult>* results) {
  if (!opt.tokens_set && results == nullptr && opt.results.empty()) {
    throw UsageError("impact needs --results or --tokens-saved");
  }
  std::string pricing_path = resolve_config(opt.pricing, "pricing.json");
  std::string energy_path = resolve_config(opt.energy, "energy.json");
  PricingConfig pricing = load_pricing_file(pricing_path);
  std::vector<EnergyModel> energy = load_energy_file(energy_path);
  const PricingModel& model = pricing.select(opt.model);

  std::vector<SimulationResult> loaded;
  std::vector<ImpactEstimate> estimates;
  ordered_json doc = ordered_json::array();
  if (opt.tokens_set) {
    estimates.push_back(estimate_impact(opt.tokens_saved, model, energy));
  } else {
    if (results == nullptr) {
      loaded = read_results_json_file(opt.results);
      results = &loaded;
    }
    for (const SimulationResult& r : *results) {
      std::uint64_t saved =
          r.total_prompt_tokens_before - r.total_prompt_tokens_after;
      estimates.push_back(estimate_impact(saved, model, energy));
    }
  }

  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const ImpactEstimate& est = estimates[i];
    ordered_json obj;
    if (!opt.tokens_set && results != nullptr && i < results->size()) {
      const SimulationResult& r = (*results)[i];
      if (r.threshold_seconds == kNoThreshold) {
        obj["threshold_seconds"] = "inf";
      } else {
        obj["threshold_seconds"] = r.threshold_seconds;
      }
    }
    obj["tokens_saved"] = est.tokens_saved;
    obj["cost_saved"] = est.cost_saved.str();
    obj["currency"] = est.currency_code;
    ordered_json co2e = ordered_json::array();
    for (const auto& [label, kg] : est.co2e_saved_by_model) {
      co2e.push_back({{"label", label}, {"kg_co2e", kg}});
    }
    obj["co2e_saved"] = std::move(co2e);
    doc.push_back(std::move(obj));
  }

  write_artifact(opt.out,
                 [&](std::ostream& out) { out << doc.dump(2) << '\n'; });

  RunManifest manifest;
  manifest.stage = "impact";
  manifest.inputs = {pricing_path, energy_path};
  if (!opt.results.empty()) manifest.inputs.push_back(opt.results);
  manifest.outputs = {opt.out};
  manifest.config["model"] = opt.model.empty() ? pricing.default_model
                                               : opt.model;
  if (opt.tokens_set) {
    manifest.config["tokens_saved"] = std::to_string(opt.tokens_saved);
  }
  write_manifest(manifest_dir(opt.out), manifest);
  return estimates;
}

// Re-reads an impact artifact so the report stage can run standalone.
std::vector<ImpactEstimate> read_impact_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open input file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw FatalError("invalid impact file: " + path);
  }
  std::vector<ImpactEstimate> estimates;
  for (const nlohmann::json& obj : doc) {
    if (!obj.is_object()) throw FatalError("invalid impact file: " + path);
    ImpactEstimate est;
    est.tokens_saved = obj.at("tokens_saved").get<std::uint64_t>();
    est.cost_saved =
        Decimal::parse(obj.at("cost_saved").get_ref<const std::string&>());
    est.currency_code = obj.at("currency").get<std::string>();
    for (const nlohmann::json& entry : obj.at("co2e_saved")) {
      est.co2e_saved_by_model.emplace_back(
          entry.at("label").get<std::string>(),
          entry.at("kg_co2e").get<double>());
    }
    estimates.push_back(std::move(est));
  }
  return estimates;
}

struct ReportOptions {
  std::string threads;
  std::string results;
  std::string impact;
  bool keep_orphans{};
  int bins_per_decade = 5;
  std::string out_dir = ".";
  bool default_sweep{};
};

void run_report(const ReportOptions& opt, const std::vector<Thread>* threads,
                const std::vector<SimulationResult>* results,
                const std::vector<ImpactEstimate>* impacts) {
  std::vector<Thread> loaded_threads;
  if (threads == nullptr) {
    loaded_threads = read_threads_file(opt.threads);
    threads = &loaded_threads;
  }
  std::vector<SimulationResult> loaded_results;
  if (results == nullptr && !opt.results.empty()) {
    loaded_results = read_results_json_file(opt.results);
    results = &loaded_results;
  }
  std::vector<ImpactEstimate> loaded_impacts;
  if (impacts == nullptr && !opt.impact.empty()) {
    loaded_impacts = read_impact_file(opt.impact);
    impacts = &loaded_impacts;
  }

  std::vector<Thread> scope;
  std::size_t orphan_count = 0;
  for (const Thread& t : *threads) {
    if (t.orphan) {
      ++orphan_count;
      if (!opt.keep_orphans) continue;
    }
    scope.push_back(t);
  }

  std::vector<IndexStats> dist = token_distribution(scope);
  PauseHistogram hist = pause_histogram(scope, opt.bins_per_decade);
  std::size_t message_count = 0;
  for (const Thread& t : scope) message_count += t.messages.size();

  fs::path dir(opt.out_dir);
  std::string dist_path = (dir / "token_distribution.csv").string();
  std::string hist_path = (dir / "pause_histogram.csv").string();
  std::string summary_path = (dir / "summary.md").string();
  write_artifact(dist_path, [&](std::ostream& out) {
    write_token_distribution_csv(out, dist);
  });
  write_artifact(hist_path, [&](std::ostream& out) {
    write_pause_histogram_csv(out, hist);
  });
  write_artifact(summary_path, [&](std::ostream& out) {
    SummaryInputs inputs;
    inputs.thread_count = scope.size();
    inputs.orphan_count = orphan_count;
    inputs.message_count = message_count;
    if (results != nullptr) {
      inputs.results = std::span<const SimulationResult>(*results);
    }
    if (impacts != nullptr) {
      inputs.impacts = std::span<const ImpactEstimate>(*impacts);
    }
    inputs.default_sweep = opt.default_sweep;
    write_summary_md(out, inputs);
  });

  RunManifest manifest;
  manifest.stage = "report";
  if (!opt.threads.empty()) manifest.inputs.push_back(opt.threads);
  if (!opt.results.empty()) manifest.inputs.push_back(opt.results);
  if (!opt.impact.empty()) manifest.inputs.push_back(opt.impact);
  manifest.outputs = {dist_path, hist_path, summary_path};
  manifest.config["bins_per_decade"] = std::to_string(opt.bins_per_decade);
  manifest.config["keep_orphans"] = opt.keep_orphans ? "true" : "false";
  write_manifest(opt.out_dir, manifest);
}

struct AllOptions {
  std::string in;
  std::string format;
  std::uint64_t title_delta = 0;
  bool delta_set{};
  std::string monotonic = "nondecreasing";
  bool keep_orphans{};
  std::string thresholds;
  int jobs = 1;
  std::string pricing;
  std::string energy;
  std::string model;
  int bins_per_decade = 5;
  std::string out_dir = "out";
};

void run_all(const AllOptions& opt) {
  fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  IngestOptions ingest_opt;
  ingest_opt.in = opt.in;
  ingest_opt.format = opt.format;
  ingest_opt.out = (dir / "ingested.jsonl").string();
  ingest_opt.report = (dir / "ingest.report.json").string();
  run_ingest(ingest_opt);

  ReconstructOptions rec_opt;
  rec_opt.in = ingest_opt.out;
  rec_opt.out = (dir / "threads.jsonl").string();
  rec_opt.report = (dir / "reconstruct.report.json").string();
  rec_opt.title_delta = opt.title_delta;
  rec_opt.delta_set = opt.delta_set;
  rec_opt.monotonic = opt.monotonic;
  std::vector<Thread> threads = run_reconstruct(rec_opt);

  SimulateOptions sim_opt;
  sim_opt.in = rec_opt.out;
  sim_opt.thresholds = opt.thresholds;
  sim_opt.keep_orphans = opt.keep_orphans;
  sim_opt.jobs = opt.jobs;
  sim_opt.out = (dir / "results.csv").string();
  sim_opt.json = (dir / "results.json").string();
  std::vector<SimulationResult> results = run_simulate(sim_opt, &threads);

  ImpactOptions impact_opt;
  impact_opt.results = sim_opt.json;
  impact_opt.pricing = opt.pricing;
  impact_opt.energy = opt.energy;
  impact_opt.model = opt.model;
  impact_opt.out = (dir / "impact.json").string();
  std::vector<ImpactEstimate> impacts = run_impact(impact_opt, &results);

  ReportOptions report_opt;
  report_opt.threads = rec_opt.out;
  report_opt.results = sim_opt.json;
  report_opt.impact = impact_opt.out;
  report_opt.keep_orphans = opt.keep_orphans;
  report_opt.bins_per_decade = opt.bins_per_decade;
  report_opt.out_dir = opt.out_dir;
  report_opt.default_sweep = opt.thresholds.empty();
  run_report(report_opt, &threads, &results, &impacts);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"token log analysis and conversational-memory simulation"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.require_subcommand(1);

  GenerateOptions gen;
  CLI::App* cmd_gen =
      app.add_subcommand("generate", "emit a synthetic token log with truth");
  cmd_gen->add_option("--preset", gen.preset, "named preset (paper-like)");
  cmd_gen->add_option("--config", gen.config_file, "generator config JSON");
  cmd_gen->add_option("--out", gen.out, "log output path");
  cmd_gen->add_option("--truth", gen.truth, "truth sidecar path");
  cmd_gen->add_option("--format", gen.format, "log format: csv or jsonl");
  cmd_gen->add_option("--seed", gen.seed, "generator seed")
      ->each([&](const std::string&) { gen.seed_set = true; });
  cmd_gen->add_option("--users", gen.users, "user count")
      ->each([&](const std::string&) { gen.users_set = true; });
  cmd_gen->add_option("--threads", gen.threads, "thread count")
      ->each([&](const std::string&) { gen.threads_set = true; });
  cmd_gen
      ->add_option("--irregular-rate", gen.irregular_rate,
                   "fraction of threads made non-monotone")
      ->each([&](const std::string&) { gen.irregular_set = true; });
  cmd_gen->add_flag("--adversarial", gen.adversarial,
                    "collide same-user thread starts");
  cmd_gen->add_option("--jobs", gen.jobs, "worker threads");

  IngestOptions ing;
  CLI::App* cmd_ing =
      app.add_subcommand("ingest", "parse and validate a token log");
  cmd_ing->add_option("--in", ing.in, "input log")->required();
  cmd_ing->add_option("--format", ing.format, "log format: csv or jsonl");
  cmd_ing->add_option("--out", ing.out, "normalized record output");
  cmd_ing->add_option("--report", ing.report, "validation report path");

  ReconstructOptions rec;
  CLI::App* cmd_rec =
      app.add_subcommand("reconstruct", "rebuild conversation threads");
  cmd_rec->add_option("--in", rec.in, "input records")->required();
  cmd_rec->add_option("--format", rec.format, "log format: csv or jsonl");
  cmd_rec->add_option("--out", rec.out, "thread file output");
  cmd_rec->add_option("--report", rec.report, "reconstruction report path");
  cmd_rec->add_option("--title-delta", rec.title_delta,
                      "helper prompt offset; inferred when omitted")
      ->each([&](const std::string&) { rec.delta_set = true; });
  cmd_rec->add_option("--monotonic", rec.monotonic,
                      "filter mode: nondecreasing or strict");

  SimulateOptions sim;
  CLI::App* cmd_sim =
      app.add_subcommand("simulate", "sweep pause-reset thresholds");
  cmd_sim->add_option("--in", sim.in, "thread file")->required();
  cmd_sim->add_option("--thresholds", sim.thresholds,
                      "comma-separated seconds, inf allowed");
  cmd_sim->add_flag("--keep-orphans", sim.keep_orphans,
                    "include orphan threads");
  cmd_sim->add_option("--jobs", sim.jobs, "worker threads");
  cmd_sim->add_option("--out", sim.out, "results CSV path");
  cmd_sim->add_option("--json", sim.json, "results JSON path");

  ImpactOptions imp;
  CLI::App* cmd_imp =
      app.add_subcommand("impact", "convert savings to cost and CO2e");
  cmd_imp->add_option("--results", imp.results, "simulate results JSON");
  cmd_imp->add_option("--tokens-saved", imp.tokens_saved,
                      "direct token amount")
      ->each([&](const std::string&) { imp.tokens_set = true; });
  cmd_imp->add_option("--pricing", imp.pricing, "pricing config JSON");
  cmd_imp->add_option("--energy", imp.energy, "energy config JSON");
  cmd_imp->add_option("--model", imp.model, "pricing model name");
  cmd_imp->add_option("--out", imp.out, "impact output path");

  ReportOptions rep;
  CLI::App* cmd_rep =
      app.add_subcommand("report", "emit distribution, histogram, summary");
  cmd_rep->add_option("--threads", rep.threads, "thread file")->required();
  cmd_rep->add_option("--results", rep.results, "simulate results JSON");
  cmd_rep->add_option("--impact", rep.impact, "impact JSON");
  cmd_rep->add_flag("--keep-orphans", rep.keep_orphans,
                    "include orphan threads");
  cmd_rep->add_option("--bins-per-decade", rep.bins_per_decade,
                      "pause histogram resolution");
  cmd_rep->add_option("--out-dir", rep.out_dir, "output directory");

  AllOptions all;
  CLI::App* cmd_all = app.add_subcommand(
      "all", "ingest, reconstruct, simulate, impact, report");
  cmd_all->add_option("--in", all.in, "input log")->required();
  cmd_all->add_option("--format", all.format, "log format: csv or jsonl");
  cmd_all->add_option("--title-delta", all.title_delta,
                      "helper prompt offset; inferred when omitted")
      ->each([&](const std::string&) { all.delta_set = true; });
  cmd_all->add_option("--monotonic", all.monotonic,
                      "filter mode: nondecreasing or strict");
  cmd_all->add_flag("--keep-orphans", all.keep_orphans,
                    "include orphan threads");
  cmd_all->add_option("--thresholds", all.thresholds,
                      "comma-separated seconds, inf allowed");
  cmd_all->add_option("--jobs", all.jobs, "worker threads");
  cmd_all->add_option("--pricing", all.pricing, "pricing config JSON");
  cmd_all->add_option("--energy", all.energy, "energy config JSON");
  cmd_all->add_option("--model", all.model, "pricing model name");
  cmd_all->add_option("--bins-per-decade", all.bins_per_decade,
                      "pause histogram resolution");
  cmd_all->add_option("--out-dir", all.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_gen->parsed()) {
      run_generate(gen);
    } else if (cmd_ing->parsed()) {
      run_ingest(ing);
    } else if (cmd_rec->parsed()) {
      run_reconstruct(rec);
    } else if (cmd_sim->parsed()) {
      run_simulate(sim, nullptr);
    } else if (cmd_imp->parsed()) {
      run_impact(imp, nullptr);
    } else if (cmd_rep->parsed()) {
      rep.default_sweep = false;
      run_report(rep, nullptr, nullptr, nullptr);
    } else if (cmd_all->parsed()) {
      run_all(all);
    }
  } catch (const UsageError& e) {
    std::cerr << kToolName << ": " << e.what() << '\n';
    return 2;
  } catch (const FatalError& e) {
    std::cerr << kToolName << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << kToolName << ": internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace tokmem

int main(int argc, char** argv) {
  return tokmem::run_cli(argc, argv);
}
