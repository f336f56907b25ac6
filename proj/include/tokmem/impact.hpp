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
#ifndef TOKMEM_IMPACT_HPP_
#define TOKMEM_IMPACT_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tokmem/decimal.hpp"

namespace tokmem {

struct PricingModel {
  Decimal price_per_1k_prompt_tokens;
  std::string currency_code;
};

// Linear parameter-count extrapolation of a measured public model's energy
// draw, converted through grid carbon intensity. All factors must be > 0.
struct EnergyModel {
  std::string label;
  double reference_params{};
  double reference_energy_per_1k_tokens_kwh{};
  double target_params{};
  double grid_intensity_kg_per_kwh{};
};

struct ImpactEstimate {
  std::uint64_t tokens_saved{};
  Decimal cost_saved;
  std::string currency_code;
  std::vector<std::pair<std::string, double>> co2e_saved_by_model;
};

// tokens / 1000 * price, exact decimal arithmetic. The result keeps the
// price's precision except that zero renders as plain 0.
Decimal estimate_cost(std::uint64_t tokens_saved, const PricingModel& pricing);

// tokens / 1000 * ref_energy * (target_params / ref_params) * intensity.
double estimate_co2e(std::uint64_t tokens_saved, const EnergyModel& model);

ImpactEstimate estimate_impact(std::uint64_t tokens_saved,
                               const PricingModel& pricing,
                               std::span<const EnergyModel> models);

// pricing.json: {"default_model": "...", "models": {name: {
//   "price_per_1k_prompt_tokens": "0.03", "currency": "USD"}}}
// Prices must be JSON strings so no binary float ever touches them.
struct PricingConfig {
  std::string default_model;
  std::map<std::string, PricingModel> models;

  const PricingModel& select(const std::string& model_name) const;
};
PricingConfig load_pricing_file(const std::string& path);

// energy.json: {"models": [{"label": "low", "reference_params": ...,
//   "reference_energy_per_1k_tokens_kwh": ..., "target_params": ...,
//   "grid_intensity_kg_per_kwh": ...}]}
std::vector<EnergyModel> load_energy_file(const std::string& path);

}  // namespace tokmem

#endif  // TOKMEM_IMPACT_HPP_
