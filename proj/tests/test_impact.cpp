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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "tokmem/errors.hpp"
#include "tokmem/impact.hpp"
#include "tokmem/rng.hpp"

namespace {

using namespace tokmem;

PricingModel pricing_of(const char* price) {
  PricingModel p;
  p.price_per_1k_prompt_tokens = Decimal::parse(price);
  p.currency_code = "USD";
  return p;
}

EnergyModel energy_of(double ref_params, double ref_energy, double target,
                      double intensity) {
  EnergyModel m;
  m.label = "m";
  m.reference_params = ref_params;
  m.reference_energy_per_1k_tokens_kwh = ref_energy;
  m.target_params = target;
  m.grid_intensity_kg_per_kwh = intensity;
  return m;
}

TEST_CASE("cost scales linearly and stays exact") {
  CHECK(estimate_cost(0, pricing_of("0.50")).str() == "0");
  CHECK(estimate_cost(1000000, pricing_of("0.50")).str() == "500.00");
  CHECK(estimate_cost(144247, pricing_of("0.03")).str() == "4.32741");
  CHECK(estimate_cost(1, pricing_of("0.03")).str() == "0.00003");
  CHECK(estimate_cost(1000, pricing_of("0.03")).str() == "0.03");
}

TEST_CASE("co2e follows the parameter-scaled energy formula") {
  EnergyModel m = energy_of(1.0, 0.002, 2.0, 0.4);
  CHECK(estimate_co2e(0, m) == 0.0);
  CHECK(estimate_co2e(1000000, m) == doctest::Approx(1.6).epsilon(1e-9));
}

TEST_CASE("co2e is additive within tolerance") {
  Sampler rng(44);
  EnergyModel m = energy_of(7e9, 0.0031, 1.75e12, 0.436);
  for (int i = 0; i < 200; ++i) {
    std::uint64_t a = rng.uniform_u64(0, 1u << 30);
    std::uint64_t b = rng.uniform_u64(0, 1u << 30);
    double lhs = estimate_co2e(a + b, m);
    double rhs = estimate_co2e(a, m) + estimate_co2e(b, m);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("raising any energy factor raises the estimate") {
  EnergyModel base = energy_of(7e9, 0.002, 1e12, 0.4);
  double ref = estimate_co2e(5000, base);
  EnergyModel m = base;
  m.reference_energy_per_1k_tokens_kwh *= 1.5;
  CHECK(estimate_co2e(5000, m) > ref);
  m = base;
  m.target_params *= 1.5;
  CHECK(estimate_co2e(5000, m) > ref);
  m = base;
  m.grid_intensity_kg_per_kwh *= 1.5;
  CHECK(estimate_co2e(5000, m) > ref);
  m = base;
  m.reference_params *= 1.5;  // denominator
  CHECK(estimate_co2e(5000, m) < ref);
}

TEST_CASE("a low and high model bracket intermediate models") {
  EnergyModel low = energy_of(7e9, 0.002, 1e12, 0.3);
  EnergyModel mid = energy_of(7e9, 0.003, 1e12, 0.35);
  EnergyModel high = energy_of(7e9, 0.004, 1e12, 0.5);
  std::uint64_t tokens = 123456;
  CHECK(estimate_co2e(tokens, low) <= estimate_co2e(tokens, mid));
  CHECK(estimate_co2e(tokens, mid) <= estimate_co2e(tokens, high));
}

TEST_CASE("estimate_impact carries one co2e entry per energy model") {
  std::vector<EnergyModel> models = {energy_of(1, 0.002, 2, 0.4),
                                     energy_of(1, 0.004, 2, 0.4)};
  models[0].label = "low";
  models[1].label = "high";
  ImpactEstimate est = estimate_impact(1000000, pricing_of("0.50"), models);
  CHECK(est.tokens_saved == 1000000);
  CHECK(est.cost_saved.str() == "500.00");
  CHECK(est.currency_code == "USD");
  REQUIRE(est.co2e_saved_by_model.size() == 2);
  CHECK(est.co2e_saved_by_model[0].first == "low");
  CHECK(est.co2e_saved_by_model[0].second == doctest::Approx(1.6));
  CHECK(est.co2e_saved_by_model[1].second == doctest::Approx(3.2));
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
}

TEST_CASE("pricing config loads with string prices only") {
  std::string path = "test_pricing.json";
  write_file(path, R"({
    "default_model": "base",
    "models": {
      "base": {"price_per_1k_prompt_tokens": "0.03", "currency": "USD"},
      "eur": {"price_per_1k_prompt_tokens": "0.025", "currency": "EUR"}
    }
  })");
  PricingConfig config = load_pricing_file(path);
  std::remove(path.c_str());
  CHECK(config.default_model == "base");
  CHECK(config.select("").price_per_1k_prompt_tokens == Decimal::parse("0.03"));
  CHECK(config.select("eur").currency_code == "EUR");
  CHECK_THROWS_AS(config.select("missing"), FatalError);
}

TEST_CASE("numeric prices are rejected so floats never touch money") {
  std::string path = "test_pricing_bad.json";
  write_file(path, R"({
    "models": {"base": {"price_per_1k_prompt_tokens": 0.03}}
  })");
  CHECK_THROWS_AS(load_pricing_file(path), FatalError);
  std::remove(path.c_str());

  write_file(path, R"({
    "models": {"base": {"price_per_1k_prompt_tokens": "-0.03"}}
  })");
  CHECK_THROWS_AS(load_pricing_file(path), FatalError);
  std::remove(path.c_str());
}

TEST_CASE("energy config loads and validates positivity") {
  std::string path = "test_energy.json";
  write_file(path, R"({
    "models": [
      {"label": "low", "reference_params": 7e9,
       "reference_energy_per_1k_tokens_kwh": 0.002,
       "target_params": 1e12, "grid_intensity_kg_per_kwh": 0.3}
    ]
  })");
  std::vector<EnergyModel> models = load_energy_file(path);
  std::remove(path.c_str());
  REQUIRE(models.size() == 1);
  CHECK(models[0].label == "low");
  CHECK(models[0].reference_params == 7e9);

  write_file(path, R"({
    "models": [
      {"label": "bad", "reference_params": 0,
       "reference_energy_per_1k_tokens_kwh": 0.002,
       "target_params": 1e12, "grid_intensity_kg_per_kwh": 0.3}
    ]
  })");
  CHECK_THROWS_AS(load_energy_file(path), FatalError);
  std::remove(path.c_str());
}

}  // namespace
