#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "signmat/experiments.hpp"
#include "signmat/version.hpp"

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed;
  int threads = 0;  // 0 = auto
  std::string out;
  std::string format;
};

json parse_set_value(const std::string& raw) {
  // Numbers and booleans pass through as JSON scalars; anything that does
  // not parse is taken verbatim as a string.
  try {
    json value = json::parse(raw);
    if (value.is_number() || value.is_boolean()) return value;
  } catch (const json::parse_error&) {
  }
  return json(raw);
}

int resolve_threads(int requested) {
  int threads = requested;
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw > 0 ? static_cast<int>(hw) : 1;
  }
  if (const char* cap_text = std::getenv("SIGNMAT_MAX_THREADS")) {
    const int cap = std::atoi(cap_text);
    if (cap >= 1) threads = std::min(threads, cap);
  }
  return threads;
}

void run_subcommand(const std::string& experiment,
                    const CommonOptions& options) {
  json doc = json::object();
  if (!options.config_path.empty()) {
    std::ifstream file(options.config_path);
    if (!file)
      throw std::runtime_error("cannot open config file " +
                               options.config_path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    doc = json::parse(buffer.str());
    if (!doc.is_object())
      throw signmat::ConfigError("config: top-level document must be an "
                                 "object");
  }
  if (doc.contains("experiment") && doc["experiment"] != experiment)
    throw signmat::ConfigError(
        "config selects experiment '" +
        doc["experiment"].get<std::string>() + "' but the subcommand is '" +
        experiment + "'");
  doc["experiment"] = experiment;
  if (!doc.contains("parameters")) doc["parameters"] = json::object();

  for (const std::string& assignment : options.sets) {
    const auto pos = assignment.find('=');
    if (pos == std::string::npos || pos == 0)
      throw signmat::ConfigError("--set expects KEY=VALUE, got '" +
                                 assignment + "'");
    const std::string key = assignment.substr(0, pos);
    const json value = parse_set_value(assignment.substr(pos + 1));
    if (key == "out" || key == "format")
      doc[key] = value;
    else
      doc["parameters"][key] = value;
  }
  if (!options.seed.empty())
    doc["parameters"]["seed"] = json::parse(options.seed);
  if (!options.out.empty()) doc["out"] = options.out;
  if (!options.format.empty()) doc["format"] = options.format;

  const signmat::ExperimentConfig config =
      signmat::parse_config(doc.dump());
  const signmat::ExperimentOutput output =
      signmat::run_experiment(config, resolve_threads(options.threads));
  signmat::write_report(config, output);
}

std::string parameter_help(const signmat::ExperimentSpec& spec) {
  std::ostringstream help;
  help << "Parameters (override with --set KEY=VALUE):\n";
  for (const auto& param : spec.params) {
    help << "  " << param.name << " (default " << param.fallback.dump()
         << ") - " << param.help << "\n";
  }
  return help.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Batch experiments on Bernoulli sign matrices: Marchenko-Pastur "
      "spectra, shifted Chebyshev trace sequences, spectral-edge tails, and "
      "near-square l1 sections."};
  app.set_version_flag("--version", std::string(signmat::kToolName) + " " +
                                        signmat::kVersion);
  app.require_subcommand(1);
  app.footer(
      "Environment:\n"
      "  SIGNMAT_MAX_THREADS  hard cap on worker threads, applied on top of "
      "--threads.");

  for (const auto& spec : signmat::experiment_registry()) {
    auto* sub = app.add_subcommand(spec.name, spec.summary);
    auto options = std::make_shared<CommonOptions>();
    sub->add_option("--config", options->config_path,
                    "JSON config file (a single object)");
    sub->add_option("--set", options->sets,
                    "Override an individual key, KEY=VALUE; bare keys go "
                    "into parameters, 'out'/'format' address the top level")
        ->allow_extra_args(false);
    sub->add_option("--seed", options->seed, "Master seed (64-bit unsigned)");
    sub->add_option("--threads", options->threads,
                    "Worker threads (default: hardware concurrency)");
    sub->add_option("--out", options->out,
                    "Output path; '-' writes to stdout (default)");
    sub->add_option("--format", options->format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->footer(parameter_help(spec));
    sub->callback([options, name = spec.name] { run_subcommand(name, *options); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    return app.exit(error);
  } catch (const std::exception& error) {
    std::cerr << "signmat: error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
