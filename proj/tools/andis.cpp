// Copyright 2026 The Authors.
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

// Command-line front end.
//
//   andis [--config FILE] [--manifest FILE] [--KEY VALUE ...] COMMAND
//
// COMMAND is one of stats, synth, run, sweep, evaluate. Settings are read
// from the config file, then from the manifest (if any), then from flags.
// Failures print "error: <code>: <message>" on one line.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "andis/pipeline.hpp"

namespace {

using namespace andis;

int Report(const std::string& code, const std::string& message, int status) {
  std::string line = message;
  for (char& ch : line) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::cerr << "error: " << code << ": " << line << "\n";
  return status;
}

int Main(int argc, char** argv) {
  CLI::App app{"Author name disambiguation experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  std::string config_path;
  std::string manifest_path;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--manifest", manifest_path, "rerun the settings recorded in a run manifest")
      ->check(CLI::ExistingFile);

  std::map<std::string, std::string> overrides;
  for (const auto& key : ExperimentConfig::Keys()) {
    if (key.name == "deterministic") {
      app.add_flag("--deterministic{true}", overrides[key.name], key.help);
    } else if (key.name == "out_dir") {
      app.add_option("--out-dir,--out_dir", overrides[key.name], key.help);
    } else {
      app.add_option("--" + key.name, overrides[key.name], key.help);
    }
  }

  app.add_subcommand("stats", "corpus statistics (pubs, optional truth) into out_dir");
  app.add_subcommand("synth", "generate a labeled synthetic corpus into out_dir");
  app.add_subcommand("run", "cluster at theta and score; writes clustering, metrics and manifest");
  app.add_subcommand("sweep", "cluster at every value of thetas and score");
  app.add_subcommand("evaluate", "score a predictions file against truth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Report("usage", e.what(), 2);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ExperimentConfig config;
  if (!config_path.empty()) config = ExperimentConfig::Load(config_path);
  ManifestRun manifest;
  const bool rerun = !manifest_path.empty();
  if (rerun) {
    manifest = ReadManifest(manifest_path);
    if (manifest.command != command) {
      Fail(ErrorCode::kConfig, "manifest records '" + manifest.command + "', not '" + command + "'");
    }
    config = manifest.config;
  }
  for (const auto& [key, value] : overrides) {
    if (!app.get_option(key == "out_dir" ? "--out-dir" : "--" + key)->empty()) config.Set(key, value);
  }
  config.Validate();

  if (command == "synth") {
    const SynthData d = ExecuteSynth(config);
    std::cout << "wrote " << d.corpus.size() << " publications and " << d.labeling.profile_count()
              << " profiles to " << config.out_dir << "\n";
  } else if (command == "stats") {
    const StatsReport r = ExecuteStats(config);
    std::cout << "names " << r.distinct_names << ", profiles " << r.distinct_profiles << ", publications "
              << r.publications << ", components " << r.components << ", largest " << r.largest_component
              << "\n";
  } else if (command == "evaluate") {
    const PairwiseMetrics m = ExecuteEvaluate(config);
    std::cout << MetricsSummaryTable({{"predicted", m}});
  } else {
    const auto sums = std::make_pair(manifest.pubs_checksum, manifest.truth_checksum);
    const ExperimentResult r =
        ExecuteCommand(command, config, rerun ? &manifest.split : nullptr, rerun ? &sums : nullptr);
    std::cout << MetricsSummaryTable(r.MetricsRows(command == "sweep"));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const andis::Error& e) {
    return Report(andis::ErrorCodeName(e.code()), e.what(), andis::ErrorExitStatus(e.code()));
  } catch (const std::exception& e) {
    return Report("internal", e.what(), 1);
  }
}
