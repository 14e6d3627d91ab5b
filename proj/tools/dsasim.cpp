// SPDX-License-Identifier: Apache-2.0
//
// dsa-sim: dynamic scattering array simulator and optimizer
// Copyright (C) 2026 the dsa-sim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsa/config.hpp"
#include "dsa/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  int workers = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

dsa::ScenarioConfig load(const Options& opt) {
  dsa::ScenarioConfig c = dsa::load_config(opt.config);
  if (opt.seed_set) c.seed = opt.seed;
  if (!opt.out.empty()) c.out_dir = opt.out;
  c.validate();
  return c;
}

void add_common(CLI::App* cmd, Options& opt, bool with_out = true) {
  cmd->add_option("--config", opt.config, "scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  if (with_out) cmd->add_option("--out", opt.out, "output directory");
  cmd->add_option("--workers", opt.workers, "concurrent sweep points")
      ->check(CLI::PositiveNumber);
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&opt](std::uint64_t s) {
        opt.seed = s;
        opt.seed_set = true;
      },
      "override the root seed");
}

int report_manifest(const std::vector<std::string>& files,
                    const std::string& out_dir) {
  for (const auto& f : files) std::cout << out_dir << "/" << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic scattering array simulator"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* run = app.add_subcommand("run", "run one scenario");
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  CLI::App* compare =
      app.add_subcommand("compare-sim", "general vs layered comparison");
  CLI::App* validate =
      app.add_subcommand("validate", "check a scenario file and echo it");
  add_common(run, opt);
  add_common(sweep, opt);
  add_common(compare, opt);
  add_common(validate, opt, false);

  CLI11_PARSE(app, argc, argv);

  try {
    const dsa::ScenarioConfig c = load(opt);
    if (validate->parsed()) {
      std::cout << dsa::echo_config(c);
      return 0;
    }
    if (run->parsed())
      return report_manifest(dsa::run_scenario(c, c.out_dir, opt.workers),
                             c.out_dir);
    if (sweep->parsed())
      return report_manifest(dsa::run_sweep(c, c.out_dir, opt.workers),
                             c.out_dir);
    return report_manifest(dsa::run_compare_sim(c, c.out_dir, opt.workers),
                           c.out_dir);
  } catch (const dsa::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dsa::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dsa::DsaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
