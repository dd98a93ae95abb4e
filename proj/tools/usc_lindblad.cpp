// Copyright 2026 The usc-lindblad Authors
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

// usc-lindblad <fit|simulate|oracle|compare|sweep> --config <path> [--model <path>] [--out <dir>] [--seed <int>]

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "usc/commands.hpp"

int main(int argc, char** argv) {
  using namespace usc::cli;

  CLI::App app{"Few-mode Lindblad models of ultrastrong-coupling emitters", "usc-lindblad"};
  app.require_subcommand(1);

  Options o;
  std::string config, model, out, reference;
  std::uint64_t seed = 0;
  double floor = 0.0;
  std::vector<std::string> inputs;

  const auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config, "run configuration (JSON)");
    if (config_required) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "fit RNG seed (overrides the config)");
  };

  auto* fit = app.add_subcommand("fit", "fit a mode network to the target spectral density");
  common(fit, true);
  auto* sim = app.add_subcommand("simulate", "Lindblad propagation of a fitted model");
  common(sim, true);
  sim->add_option("--model", model, "model JSON (default <out>/model.json)");
  auto* orc = app.add_subcommand("oracle", "discretized-bath reference dynamics");
  common(orc, true);
  auto* cmp = app.add_subcommand("compare", "relative error of P_e against a reference trajectory");
  common(cmp, false);
  cmp->add_option("trajectories", inputs, "<trajectory.csv> <reference.csv>")->expected(2)->required();
  cmp->add_option("--floor", floor, "normalization floor");
  auto* swp = app.add_subcommand("sweep", "error vs (N, threshold) table");
  common(swp, true);
  swp->add_option("--reference", reference, "reuse an oracle trajectory instead of recomputing it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  o.config = config;
  if (!model.empty()) o.model = model;
  if (!out.empty()) o.out = out;
  for (auto* s : {fit, sim, orc, cmp, swp})
    if (app.got_subcommand(s) && s->count("--seed")) o.seed = seed;
  if (cmp->count("--floor")) o.floor = floor;
  if (!reference.empty()) o.reference = reference;
  for (const auto& p : inputs) o.inputs.emplace_back(p);

  if (app.got_subcommand(fit)) return cmd_fit(o, std::cout, std::cerr);
  if (app.got_subcommand(sim)) return cmd_simulate(o, std::cout, std::cerr);
  if (app.got_subcommand(orc)) return cmd_oracle(o, std::cout, std::cerr);
  if (app.got_subcommand(cmp)) return cmd_compare(o, std::cout, std::cerr);
  return cmd_sweep(o, std::cout, std::cerr);
}
