#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace signmat {

/// Raised for malformed configs: bad JSON, unknown experiment or parameter
/// names, out-of-range values. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamSpec {
  enum class Kind { integer, unsigned64, real, text };
  std::string name;
  Kind kind = Kind::integer;
  double min = 0.0;
  double max = 0.0;
  nlohmann::json fallback;  // default value
  std::string help;
  std::vector<std::string> choices;  // for Kind::text
};

struct ExperimentSpec {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
};

const std::vector<ExperimentSpec>& experiment_registry();
const ExperimentSpec* find_experiment(const std::string& name);

/// A validated experiment run description. `parameters` holds the fully
/// resolved set (defaults filled in), so serializing the config records the
/// complete run recipe. Worker-thread count is deliberately not part of the
/// config: reports must not depend on it.
struct ExperimentConfig {
  std::string experiment;
  nlohmann::json parameters = nlohmann::json::object();
  std::string out = "-";
  std::string format = "json";

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);

/// Report plus a flat per-trial/per-seed table for CSV output.
struct ExperimentOutput {
  nlohmann::json report;  // {"experiment", "version", "config", "results"}
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
};

/// Executes the named experiment. The returned report carries no timestamp;
/// identical config produces a byte-identical serialization for any
/// `threads`.
ExperimentOutput run_experiment(const ExperimentConfig& config, int threads);

std::string render_csv(const ExperimentOutput& output);

/// Serializes the report (JSON gets an ISO-8601 UTC "timestamp" field
/// appended; CSV is the bare table) and writes it to config.out, "-"
/// meaning stdout.
void write_report(const ExperimentConfig& config, const ExperimentOutput& out);

}  // namespace signmat
