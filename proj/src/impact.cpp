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
#include "tokmem/impact.hpp"

#include <fstream>

#include "json.hpp"
#include "tokmem/errors.hpp"

namespace tokmem {

namespace {

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open config file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw FatalError("invalid JSON in " + path);
  return doc;
}

double positive_number(const nlohmann::json& obj, const char* key,
                       const std::string& path) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw FatalError("missing numeric field '" + std::string(key) + "' in " +
                     path);
  }
  double v = obj[key].get<double>();
  if (!(v > 0)) {
    throw FatalError("field '" + std::string(key) + "' must be > 0 in " +
                     path);
  }
  return v;
}

}  // namespace

Decimal estimate_cost(std::uint64_t tokens_saved, const PricingModel& pricing) {
  Decimal raw = pricing.price_per_1k_prompt_tokens.times(tokens_saved)
                    .shift_down(3)
                    .trimmed(pricing.price_per_1k_prompt_tokens.scale());
  return raw.is_zero() ? Decimal(0, 0) : raw;
}

double estimate_co2e(std::uint64_t tokens_saved, const EnergyModel& model) {
  return static_cast<double>(tokens_saved) / 1000.0 *
         model.reference_energy_per_1k_tokens_kwh *
         (model.target_params / model.reference_params) *
         model.grid_intensity_kg_per_kwh;
}

ImpactEstimate estimate_impact(std::uint64_t tokens_saved,
                               const PricingModel& pricing,
                               std::span<const EnergyModel> models) {
  ImpactEstimate est;
  est.tokens_saved = tokens_saved;
  est.cost_saved = estimate_cost(tokens_saved, pricing);
  est.currency_code = pricing.currency_code;
  est.co2e_saved_by_model.reserve(models.size());
  for (const EnergyModel& m : models) {
    est.co2e_saved_by_model.emplace_back(m.label,
                                         estimate_co2e(tokens_saved, m));
  }
  return est;
}

const PricingModel& PricingConfig::select(const std::string& model_name) const {
  const std::string& name = model_name.empty() ? default_model : model_name;
  auto it = models.find(name);
  if (it == models.end()) {
    throw FatalError("pricing config has no model '" + name + "'");
  }
  return it->second;
}

PricingConfig load_pricing_file(const std::string& path) {
  nlohmann::json doc = load_json_file(path);
  if (!doc.is_object() || !doc.contains("models") ||
      !doc["models"].is_object()) {
    throw FatalError("pricing config must have a 'models' object: " + path);
  }
  PricingConfig cfg;
  cfg.default_model = doc.value("default_model", "");
  for (const auto& [name, entry] : doc["models"].items()) {
    if (!entry.is_object() || !entry.contains("price_per_1k_prompt_tokens")) {
      throw FatalError("pricing model '" + name + "' is malformed in " + path);
    }
    const nlohmann::json& price = entry["price_per_1k_prompt_tokens"];
    if (!price.is_string()) {
      throw FatalError("price for '" + name +
                       "' must be a decimal string in " + path);
    }
    PricingModel model;
    model.price_per_1k_prompt_tokens =
        Decimal::parse(price.get_ref<const std::string&>());
    if (!(Decimal(0, 0) == model.price_per_1k_prompt_tokens) &&
        model.price_per_1k_prompt_tokens.str().front() == '-') {
      throw FatalError("price for '" + name + "' must be >= 0 in " + path);
    }
    model.currency_code = entry.value("currency", "USD");
    cfg.models.emplace(name, std::move(model));
  }
  if (cfg.models.empty()) {
    throw FatalError("pricing config lists no models: " + path);
  }
  if (cfg.default_model.empty()) {
    cfg.default_model = cfg.models.begin()->first;
  }
  return cfg;
}

std::vector<EnergyModel> load_energy_file(const std::string& path) {
  nlohmann::json doc = load_json_file(path);
  if (!doc.is_object() || !doc.contains("models") ||
      !doc["models"].is_array()) {
    throw FatalError("energy config must have a 'models' array: " + path);
  }
  std::vector<EnergyModel> models;
  for (const nlohmann::json& entry : doc["models"]) {
    if (!entry.is_object() || !entry.contains("label") ||
        !entry["label"].is_string()) {
      throw FatalError("energy model entry is malformed in " + path);
    }
    EnergyModel m;
    m.label = entry["label"].get<std::string>();
    m.reference_params = positive_number(entry, "reference_params", path);
    m.reference_energy_per_1k_tokens_kwh =
        positive_number(entry, "reference_energy_per_1k_tokens_kwh", path);
    m.target_params = positive_number(entry, "target_params", path);
    m.grid_intensity_kg_per_kwh =
        positive_number(entry, "grid_intensity_kg_per_kwh", path);
    models.push_back(std::move(m));
  }
  if (models.empty()) {
    throw FatalError("energy config lists no models: " + path);
  }
  return models;
}

}  // namespace tokmem
