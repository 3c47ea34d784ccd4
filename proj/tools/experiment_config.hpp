#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace tlbt_cli {

/// Usage errors: bad flags, bad config values. Mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string model = "gen:20,7,6";  // manifest path or gen:n[,m,p]
  double tbar = 1.0;                  // +inf selects classical BT
  std::optional<double> dt;           // default tbar / 2500
  std::optional<double> tend;         // default 4 tbar
  std::optional<int> order;
  std::optional<double> tol;
  std::string input = "const:1";
  std::uint64_t seed = 0;
  std::string out = "out";
  bool verify = false;
  int jobs = 1;
  std::string axis;             // sweep only: r | tbar | tol
  std::vector<double> values;   // sweep only

  double effective_dt() const { return dt ? *dt : tbar / 2500.0; }
  double effective_tend() const { return tend ? *tend : 4.0 * tbar; }
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Throws UsageError unless exactly one of order / tol is set.
void require_reduction_control(const ExperimentConfig& cfg);

/// Numeric checks shared by all commands.
void validate(const ExperimentConfig& cfg);

struct GenSpec {
  int n = 0;
  int m = 7;
  int p = 6;
};

/// Parses "gen:n" or "gen:n,m,p"; nullopt when `model` is not a generator spec.
std::optional<GenSpec> parse_gen_spec(const std::string& model);

/// Real number; "inf" allowed.
double parse_real(const std::string& text);

/// Parses a comma-separated list of reals ("inf" allowed).
std::vector<double> parse_value_list(const std::string& text);

/// "%.17g"; "inf" for +infinity.
std::string format_real(double v);

}  // namespace tlbt_cli
