//
// Copyright 2026 The LSP Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Experiment runner: lsp-lab <train|eval|compare|bench> --config <path>
//                            [--model <path>] [--out <dir>]

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lsp/error.h"
#include "lsp/experiment.h"

namespace {

int Run(const std::string& command, const std::filesystem::path& config_path,
        const std::filesystem::path& model_path,
        const std::string& out_override) {
  const lsp::RunConfig config = lsp::LoadRunConfig(config_path);
  const std::filesystem::path out =
      out_override.empty() ? config.out_dir : std::filesystem::path(out_override);
  if (command == "train") {
    lsp::CmdTrain(config, out);
    std::cout << "wrote " << (out / "model.lspm").string() << " and "
              << (out / "history.kv").string() << "\n";
  } else if (command == "eval") {
    const lsp::MetricsReport report = lsp::CmdEval(config, model_path, out);
    std::cout << report.ToText();
  } else if (command == "compare") {
    lsp::CmdCompare(config, out);
    std::cout << "wrote " << (out / "compare.txt").string() << "\n";
  } else {
    const lsp::BenchOutput bench = lsp::CmdBench(config, model_path, out);
    std::cout << bench.text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent space projection experiment runner", "lsp-lab"};
  std::string command;
  std::string config_path;
  std::string model_path;
  std::string out_dir;
  app.add_option("command", command, "Subcommand")
      ->required()
      ->check(CLI::IsMember({"train", "eval", "compare", "bench"}));
  app.add_option("--config", config_path, "key=value run configuration")
      ->required();
  app.add_option("--model", model_path,
                 "Model file (default: <out>/model.lspm)");
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return Run(command, config_path, model_path, out_dir);
  } catch (const lsp::Error& e) {
    std::cerr << "lsp-lab: " << lsp::ErrorKindName(e.kind())
              << " error: " << e.what() << "\n";
    return lsp::ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "lsp-lab: error: " << e.what() << "\n";
    return 1;
  }
}
