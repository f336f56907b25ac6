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
#include "tokmem/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <unordered_map>

#include "json.hpp"
#include "tokmem/errors.hpp"
#include "tokmem/ingest.hpp"
#include "tokmem/parallel.hpp"

namespace tokmem {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kPerturbStream = 0x7065727475726221ULL;

std::int64_t clamp_count(double v, std::int64_t floor_value) {
  if (!(v >= static_cast<double>(floor_value))) return floor_value;
  double capped = std::min(v, static_cast<double>(kMaxTokenCount));
  return static_cast<std::int64_t>(std::llround(capped));
}

DistSpec dist_from_json(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string()) {
    throw FatalError("distribution '" + where + "' is malformed");
  }
  const std::string& kind = obj["kind"].get_ref<const std::string&>();
  auto num = [&](const char* key) {
    if (!obj.contains(key) || !obj[key].is_number()) {
      throw FatalError("distribution '" + where + "' is missing numeric '" +
                       key + "'");
    }
    return obj[key].get<double>();
  };
  if (kind == "constant") return DistSpec::constant(num("value"));
  if (kind == "uniform") return DistSpec::uniform(num("min"), num("max"));
  if (kind == "geometric") return DistSpec::geometric(num("mean"));
  if (kind == "lognormal") {
    return DistSpec::log_normal(num("median"), num("sigma"));
  }
  throw FatalError("distribution '" + where + "' has unknown kind '" + kind +
                   "'");
}

ordered_json dist_to_json(const DistSpec& d) {
  ordered_json obj;
  switch (d.kind) {
    case DistSpec::Kind::Constant:
      obj["kind"] = "constant";
      obj["value"] = d.value;
      break;
    case DistSpec::Kind::Uniform:
      obj["kind"] = "uniform";
      obj["min"] = d.min;
      obj["max"] = d.max;
      break;
    case DistSpec::Kind::Geometric:
      obj["kind"] = "geometric";
      obj["mean"] = d.mean;
      break;
    case DistSpec::Kind::LogNormal:
      obj["kind"] = "lognormal";
      obj["median"] = d.median;
      obj["sigma"] = d.sigma;
      break;
  }
  return obj;
}

void validate(const GeneratorConfig& c) {
  if (c.n_threads > 0 && c.n_users == 0) {
    throw FatalError("generator config has zero users with positive threads");
  }
  if (c.window_seconds < 1) {
    throw FatalError("generator start window must span at least one second");
  }
  if (c.title_delta < 1) throw FatalError("title delta must be >= 1");
  if (c.token_limit < 1) throw FatalError("token limit must be >= 1");
  if (!(c.topic_change_rate >= 0.0 && c.topic_change_rate <= 1.0)) {
    throw FatalError("topic change rate must lie in [0, 1]");
  }
  if (!(c.irregular_rate >= 0.0 && c.irregular_rate <= 1.0)) {
    throw FatalError("irregular rate must lie in [0, 1]");
  }
}

struct Draft {
  std::uint64_t user{};
  std::vector<Turn> turns;
  std::vector<char> topic;
  std::vector<std::uint64_t> prompts;
  std::int64_t nominal_start{};
  UtcSeconds start{};
};

}  // namespace

DistSpec DistSpec::constant(double v) {
  DistSpec d;
  d.kind = Kind::Constant;
  d.value = v;
  return d;
}

DistSpec DistSpec::uniform(double lo, double hi) {
  DistSpec d;
  d.kind = Kind::Uniform;
  d.min = lo;
  d.max = hi;
  return d;
}

DistSpec DistSpec::geometric(double mean) {
  DistSpec d;
  d.kind = Kind::Geometric;
  d.mean = mean;
  return d;
}

DistSpec DistSpec::log_normal(double median, double sigma) {
  DistSpec d;
  d.kind = Kind::LogNormal;
  d.median = median;
  d.sigma = sigma;
  return d;
}

std::int64_t DistSpec::sample_int(Sampler& rng,
                                  std::int64_t floor_value) const {
  switch (kind) {
    case Kind::Constant:
      return clamp_count(value, floor_value);
    case Kind::Uniform: {
      std::int64_t lo = clamp_count(min, floor_value);
      std::int64_t hi = clamp_count(max, floor_value);
      if (hi < lo) std::swap(lo, hi);
      return static_cast<std::int64_t>(
          rng.uniform_u64(static_cast<std::uint64_t>(lo),
                          static_cast<std::uint64_t>(hi)));
    }
    case Kind::Geometric: {
      std::int64_t v = rng.geometric(mean);
      return v < floor_value ? floor_value : v;
    }
    case Kind::LogNormal:
      return clamp_count(rng.lognormal(median, sigma), floor_value);
  }
  return floor_value;
}

GeneratorConfig paper_like_preset() {
  GeneratorConfig c;
  c.seed = 42;
  c.n_users = 120;
  c.n_threads = 12000;
  c.messages_per_thread = DistSpec::geometric(8);
  c.user_tokens_dist = DistSpec::log_normal(60, 1.0);
  c.completion_tokens_dist = DistSpec::log_normal(120, 0.8);
  c.template_tokens = 150;
  c.token_limit = 8192;
  c.title_delta = 9;
  c.intra_pause_dist = DistSpec::log_normal(45, 1.2);
  c.topic_change_rate = 0.08;
  c.topic_pause_dist = DistSpec::log_normal(7200, 1.6);
  c.window_start = *parse_utc("2024-01-01T00:00:00Z");
  c.window_seconds = 30LL * 86400;
  return c;
}

GeneratorConfig load_generator_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open config file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw FatalError("invalid JSON in " + path);
  }
  GeneratorConfig c;
  c.seed = doc.value("seed", c.seed);
  c.n_users = doc.value("n_users", std::uint64_t{0});
  c.n_threads = doc.value("n_threads", std::uint64_t{0});
  auto dist = [&](const char* key, DistSpec fallback) {
    return doc.contains(key) ? dist_from_json(doc[key], key) : fallback;
  };
  c.messages_per_thread = dist("messages_per_thread", DistSpec::constant(1));
  c.user_tokens_dist = dist("user_tokens_dist", DistSpec::constant(1));
  c.completion_tokens_dist =
      dist("completion_tokens_dist", DistSpec::constant(0));
  c.template_tokens = doc.value("template_tokens", std::uint64_t{0});
  if (doc.contains("token_limit")) {
    c.token_limit = doc["token_limit"].get<std::uint64_t>();
  }
  c.title_delta = doc.value("title_delta", std::uint64_t{9});
  c.intra_pause_dist = dist("intra_pause_dist", DistSpec::constant(60));
  c.topic_change_rate = doc.value("topic_change_rate", 0.0);
  c.topic_pause_dist = dist("topic_pause_dist", DistSpec::constant(7200));
  if (doc.contains("start_window")) {
    const nlohmann::json& w = doc["start_window"];
    if (!w.is_object() || !w.contains("start") || !w["start"].is_string()) {
      throw FatalError("start_window is malformed in " + path);
    }
    auto start = parse_utc(w["start"].get_ref<const std::string&>());
    if (!start) throw FatalError("start_window.start is malformed in " + path);
    c.window_start = *start;
    if (w.contains("seconds")) {
      c.window_seconds = w["seconds"].get<std::int64_t>();
    } else if (w.contains("days")) {
      c.window_seconds = w["days"].get<std::int64_t>() * 86400;
    }
  }
  c.irregular_rate = doc.value("irregular_rate", 0.0);
  c.adversarial = doc.value("adversarial", false);
  validate(c);
  return c;
}

void write_generator_config(std::ostream& out, const GeneratorConfig& c) {
  ordered_json doc;
  doc["seed"] = c.seed;
  doc["n_users"] = c.n_users;
  doc["n_threads"] = c.n_threads;
  doc["messages_per_thread"] = dist_to_json(c.messages_per_thread);
  doc["user_tokens_dist"] = dist_to_json(c.user_tokens_dist);
  doc["completion_tokens_dist"] = dist_to_json(c.completion_tokens_dist);
  doc["template_tokens"] = c.template_tokens;
  if (c.token_limit != std::numeric_limits<std::uint64_t>::max()) {
    doc["token_limit"] = c.token_limit;
  }
  doc["title_delta"] = c.title_delta;
  doc["intra_pause_dist"] = dist_to_json(c.intra_pause_dist);
  doc["topic_change_rate"] = c.topic_change_rate;
  doc["topic_pause_dist"] = dist_to_json(c.topic_pause_dist);
  ordered_json window;
  window["start"] = format_utc(c.window_start);
  if (c.window_seconds % 86400 == 0) {
    window["days"] = c.window_seconds / 86400;
  } else {
    window["seconds"] = c.window_seconds;
  }
  doc["start_window"] = std::move(window);
  doc["irregular_rate"] = c.irregular_rate;
  doc["adversarial"] = c.adversarial;
  out << doc.dump(2) << '\n';
}

std::pair<std::vector<LogRecord>, GroundTruth> generate(
    const GeneratorConfig& config, int jobs) {
  validate(config);
  const std::size_t n = config.n_threads;
  std::vector<Draft> drafts(n);

  // Phase 1: per-thread content, one seed stream per thread so the result
  // is independent of chunking. Sampling order within a stream is fixed:
  // user, message count, (u, c) per message, (topic?, pause) per message
  // from the second on, then the nominal start offset.
  const ModelLimits limits{config.template_tokens, config.token_limit};
  parallel_chunks(n, jobs, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      Sampler rng(derive_seed(config.seed, t));
      Draft& d = drafts[t];
      d.user = rng.uniform_u64(0, config.n_users - 1);
      std::int64_t n_msgs = config.messages_per_thread.sample_int(rng, 1);
      d.turns.resize(static_cast<std::size_t>(n_msgs));
      d.topic.assign(static_cast<std::size_t>(n_msgs), 0);
      for (Turn& turn : d.turns) {
        turn.user_tokens = static_cast<std::uint64_t>(
            config.user_tokens_dist.sample_int(rng, 1));
        turn.completion_tokens = static_cast<std::uint64_t>(
            config.completion_tokens_dist.sample_int(rng, 0));
      }
      for (std::size_t i = 1; i < d.turns.size(); ++i) {
        bool topic = rng.bernoulli(config.topic_change_rate);
        d.topic[i] = topic ? 1 : 0;
        const DistSpec& dist =
            topic ? config.topic_pause_dist : config.intra_pause_dist;
        d.turns[i].pause_before_seconds = dist.sample_int(rng, 1);
      }
      d.prompts = accumulate(d.turns, limits, MemoryPolicy::full_history())
                      .prompt_tokens;
      d.nominal_start = static_cast<std::int64_t>(rng.uniform_u64(
          0, static_cast<std::uint64_t>(config.window_seconds) - 1));
    }
  });

  // Phase 2: sequential per-user timelines. Threads of one user never
  // overlap (next start lands past the previous thread's last message), so
  // reconstruction is unambiguous by construction. Adversarial mode instead
  // stacks each user's second thread onto the first one's start second with
  // an identical opening prompt.
  std::vector<std::vector<std::size_t>> by_user(config.n_users);
  for (std::size_t t = 0; t < n; ++t) {
    by_user[drafts[t].user].push_back(t);
  }
  for (std::vector<std::size_t>& list : by_user) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      if (drafts[a].nominal_start != drafts[b].nominal_start) {
        return drafts[a].nominal_start < drafts[b].nominal_start;
      }
      return a < b;
    });
    UtcSeconds cursor = config.window_start - 1;
    for (std::size_t k = 0; k < list.size(); ++k) {
      Draft& d = drafts[list[k]];
      if (config.adversarial && k == 1) {
        Draft& first = drafts[list[0]];
        d.start = first.start;
        d.turns[0].user_tokens = first.turns[0].user_tokens;
        d.prompts = accumulate(d.turns, limits, MemoryPolicy::full_history())
                        .prompt_tokens;
        continue;
      }
      d.start = std::max(config.window_start + d.nominal_start, cursor + 1);
      UtcSeconds ts = d.start;
      for (std::size_t i = 1; i < d.turns.size(); ++i) {
        ts += *d.turns[i].pause_before_seconds;
      }
      cursor = ts;
    }
  }

  // Phase 3: flatten in timeline order. Within one thread the helper sorts
  // directly after the first message it annotates.
  struct Emit {
    UtcSeconds ts;
    std::uint64_t user;
    std::size_t thread;
    std::uint32_t rank;  // msg i -> 2i, helper -> 3
  };
  std::vector<Emit> emits;
  std::size_t total_msgs = 0;
  for (const Draft& d : drafts) total_msgs += d.turns.size();
  emits.reserve(total_msgs + n);
  for (std::size_t t = 0; t < n; ++t) {
    const Draft& d = drafts[t];
    UtcSeconds ts = d.start;
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      if (i > 0) ts += *d.turns[i].pause_before_seconds;
      emits.push_back({ts, d.user, t, static_cast<std::uint32_t>(2 * (i + 1))});
    }
    emits.push_back({d.start, d.user, t, 3});
  }
  std::sort(emits.begin(), emits.end(), [](const Emit& a, const Emit& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    if (a.user != b.user) return a.user < b.user;
    if (a.thread != b.thread) return a.thread < b.thread;
    return a.rank < b.rank;
  });

  std::vector<LogRecord> records;
  records.reserve(emits.size());
  GroundTruth truth;
  truth.records.reserve(emits.size());
  truth.threads.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    TruthThread& tt = truth.threads[t];
    tt.thread_id = "g" + std::to_string(t);
    tt.user_id = "u" + std::to_string(drafts[t].user);
    tt.turns = drafts[t].turns;
    tt.message_record_index.resize(drafts[t].turns.size());
  }
  for (const Emit& e : emits) {
    const Draft& d = drafts[e.thread];
    TruthThread& tt = truth.threads[e.thread];
    std::uint64_t ordinal = records.size() + 1;
    LogRecord rec;
    rec.timestamp = e.ts;
    rec.user_id = tt.user_id;
    rec.source_line = ordinal;
    TruthRecord tr;
    tr.record_ordinal = ordinal;
    tr.thread_id = tt.thread_id;
    tr.user_id = tt.user_id;
    if (e.rank == 3) {
      rec.prompt_tokens = d.prompts[0] + config.title_delta;
      rec.completion_tokens = 0;
      tr.helper = true;
      tt.helper_record_index = records.size();
    } else {
      std::size_t i = e.rank / 2 - 1;
      rec.prompt_tokens = d.prompts[i];
      rec.completion_tokens = d.turns[i].completion_tokens;
      tr.message_index = static_cast<std::uint32_t>(i + 1);
      tr.topic_change = d.topic[i] != 0;
      tr.user_tokens = d.turns[i].user_tokens;
      tr.completion_tokens = d.turns[i].completion_tokens;
      if (d.turns[i].pause_before_seconds) {
        tr.pause_before_seconds = *d.turns[i].pause_before_seconds;
      }
      tt.message_record_index[i] = records.size();
    }
    records.push_back(std::move(rec));
    truth.records.push_back(std::move(tr));
  }
  return {std::move(records), std::move(truth)};
}

void perturb(std::vector<LogRecord>& records, GroundTruth& truth,
             const GeneratorConfig& config) {
  for (std::size_t t = 0; t < truth.threads.size(); ++t) {
    TruthThread& tt = truth.threads[t];
    Sampler rng(derive_seed(config.seed ^ kPerturbStream, t));
    if (!rng.bernoulli(config.irregular_rate)) continue;
    if (tt.turns.size() < 2) continue;
    std::uint64_t j = rng.uniform_u64(2, tt.turns.size());
    std::size_t cur = tt.message_record_index[j - 1];
    std::size_t prev = tt.message_record_index[j - 2];
    std::uint64_t prev_p = records[prev].prompt_tokens;
    std::uint64_t drop = rng.uniform_u64(1, prev_p);
    records[cur].prompt_tokens = prev_p - drop;
    tt.irregular = true;
    truth.records[tt.helper_record_index].irregular = true;
    for (std::size_t idx : tt.message_record_index) {
      truth.records[idx].irregular = true;
    }
  }
}

void write_truth(std::ostream& out, const GroundTruth& truth) {
  for (const TruthRecord& tr : truth.records) {
    ordered_json obj;
    obj["record_ordinal"] = tr.record_ordinal;
    obj["thread_id"] = tr.thread_id;
    obj["user_id"] = tr.user_id;
    obj["message_index"] = tr.message_index;
    obj["helper"] = tr.helper;
    obj["topic_change"] = tr.topic_change;
    obj["irregular"] = tr.irregular;
    obj["user_tokens"] = tr.user_tokens;
    obj["completion_tokens"] = tr.completion_tokens;
    if (tr.pause_before_seconds >= 0) {
      obj["pause_before_seconds"] = tr.pause_before_seconds;
    }
    out << obj.dump(-1, ' ', false,
                    nlohmann::json::error_handler_t::replace)
        << '\n';
  }
}

GroundTruth read_truth_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open input file: " + path);
  GroundTruth truth;
  std::string line;
  std::uint64_t lineno = 0;
  std::vector<std::string> thread_order;
  std::unordered_map<std::string, std::size_t> thread_pos;
  std::unordered_map<std::string, std::vector<std::pair<std::uint32_t, Turn>>>
      turns_by_thread;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw FatalError("invalid truth file at line " + std::to_string(lineno));
    }
    TruthRecord tr;
    try {
      tr.record_ordinal = obj.at("record_ordinal").get<std::uint64_t>();
      tr.thread_id = obj.at("thread_id").get<std::string>();
      tr.user_id = obj.at("user_id").get<std::string>();
      tr.message_index = obj.at("message_index").get<std::uint32_t>();
      tr.helper = obj.at("helper").get<bool>();
      tr.topic_change = obj.at("topic_change").get<bool>();
      tr.irregular = obj.value("irregular", false);
      tr.user_tokens = obj.at("user_tokens").get<std::uint64_t>();
      tr.completion_tokens = obj.at("completion_tokens").get<std::uint64_t>();
      tr.pause_before_seconds = obj.value("pause_before_seconds",
                                          std::int64_t{-1});
    } catch (const nlohmann::json::exception&) {
      throw FatalError("invalid truth file at line " + std::to_string(lineno));
    }
    auto [it, inserted] = thread_pos.emplace(tr.thread_id, thread_order.size());
    if (inserted) thread_order.push_back(tr.thread_id);
    if (!tr.helper) {
      Turn turn;
      turn.user_tokens = tr.user_tokens;
      turn.completion_tokens = tr.completion_tokens;
      if (tr.pause_before_seconds >= 0) {
        turn.pause_before_seconds = tr.pause_before_seconds;
      }
      turns_by_thread[tr.thread_id].emplace_back(tr.message_index, turn);
    }
    truth.records.push_back(std::move(tr));
  }
  truth.threads.resize(thread_order.size());
  for (std::size_t i = 0; i < thread_order.size(); ++i) {
    TruthThread& tt = truth.threads[i];
    tt.thread_id = thread_order[i];
    auto& turns = turns_by_thread[tt.thread_id];
    std::sort(turns.begin(), turns.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [idx, turn] : turns) tt.turns.push_back(turn);
  }
  for (const TruthRecord& tr : truth.records) {
    TruthThread& tt = truth.threads[thread_pos[tr.thread_id]];
    if (tt.user_id.empty()) tt.user_id = tr.user_id;
    if (tr.irregular) tt.irregular = true;
  }
  return truth;
}

}  // namespace tokmem
