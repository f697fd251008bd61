// svcnet: centrality and anti-pattern analysis of service dependency graphs.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <map>

#include "svcnet/log.hpp"
#include "svcnet/pipeline.hpp"

namespace {

using svcnet::Command;

std::string key_table() {
  std::string out = "Configuration keys (flag --<key>, config file `key = value`):\n";
  for (const auto& k : svcnet::config_keys()) {
    std::string line = "  " + k.key;
    line.resize(std::max<std::size_t>(line.size() + 1, 24), ' ');
    out += line + "default: " + (k.default_value.empty() ? "(none)" : k.default_value) + "  " +
           k.description + "\n";
  }
  out += "Precedence: flags > --config file > " + std::string(svcnet::kOutputDirEnv) +
         " (output_dir only) > defaults.\n";
  out += "Exit codes: 0 success, 1 some centrality metric unavailable, 2 fatal input error.\n";
  return out;
}

struct Subcommand {
  Command command;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::string config_file;
};

void add_config_options(Subcommand& sub) {
  for (const auto& k : svcnet::config_keys()) {
    const std::string description =
        k.description + " [default: " + (k.default_value.empty() ? "none" : k.default_value) + "]";
    std::string names = "--" + k.key;
    if (k.key.find('_') != std::string::npos) {
      std::string dashed = k.key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      names += ",--" + dashed;
    }
    auto& slot = sub.values[k.key];
    if (k.key == "raw_degree" || k.key == "strict_graph")
      sub.app->add_flag(names + "{true}", slot, description);
    else
      sub.app->add_option(names, slot, description);
  }
  sub.app->add_option("--config", sub.config_file, "key = value configuration file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Centrality and anti-pattern analysis of service dependency graphs", "svcnet"};
  app.require_subcommand(1);
  app.footer(key_table());

  std::vector<Subcommand> subs{
      {Command::Preprocess, nullptr, {}, {}}, {Command::Centrality, nullptr, {}, {}},
      {Command::Correlate, nullptr, {}, {}},  {Command::Detect, nullptr, {}, {}},
      {Command::Analyze, nullptr, {}, {}},
  };
  const std::map<Command, std::string> help{
      {Command::Preprocess, "drop degree-1 database nodes and keep the largest weakly connected component"},
      {Command::Centrality, "preprocess, then compute all centrality metrics"},
      {Command::Correlate, "centrality against aggregated software metrics (needs --metrics, --mapping)"},
      {Command::Detect, "detect hub-like, nano- and mega-services"},
      {Command::Analyze, "full pipeline; the correlation stage runs when metrics are given"},
  };
  for (auto& sub : subs) {
    sub.app = app.add_subcommand(std::string(svcnet::to_string(sub.command)), help.at(sub.command));
    add_config_options(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : svcnet::kExitFatal;
  }

  const Subcommand* chosen = nullptr;
  for (const auto& sub : subs)
    if (sub.app->parsed()) chosen = &sub;

  svcnet::RunConfig config;
  try {
    if (const char* env = std::getenv(std::string(svcnet::kOutputDirEnv).c_str()); env && *env)
      config.output_dir = env;
    if (!chosen->config_file.empty())
      svcnet::apply_config_file(config, svcnet::read_file(chosen->config_file));
    for (const auto& [key, value] : chosen->values)
      if (chosen->app->count("--" + key) > 0) config.set(key, value);
  } catch (const std::exception& e) {
    svcnet::log::error(e.what());
    nlohmann::ordered_json summary{{"command", svcnet::to_string(chosen->command)},
                                   {"exit_code", svcnet::kExitFatal},
                                   {"error", e.what()}};
    std::cout << summary.dump() << "\n";
    return svcnet::kExitFatal;
  }

  auto result = svcnet::run(chosen->command, config);
  std::cout << result.summary << "\n";
  return result.exit_code;
}
