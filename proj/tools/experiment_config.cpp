#include "experiment_config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace tlbt_cli {

namespace {

using nlohmann::json;

json real_to_json(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

double real_from_json(const json& j, const char* key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  throw UsageError(std::string("config field '") + key + "' must be a number");
}

const std::vector<std::string> kKeys = {"model", "tbar",  "dt",     "tend", "order", "tol",   "input",
                                        "seed",  "out",   "verify", "jobs", "axis",  "values"};

}  // namespace

double parse_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = cfg.model;
  j["tbar"] = real_to_json(cfg.tbar);
  j["dt"] = cfg.dt ? json(*cfg.dt) : json(nullptr);
  j["tend"] = cfg.tend ? json(*cfg.tend) : json(nullptr);
  j["order"] = cfg.order ? json(*cfg.order) : json(nullptr);
  j["tol"] = cfg.tol ? json(*cfg.tol) : json(nullptr);
  j["input"] = cfg.input;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  j["verify"] = cfg.verify;
  j["jobs"] = cfg.jobs;
  j["axis"] = cfg.axis;
  json vals = json::array();
  for (double v : cfg.values) vals.push_back(real_to_json(v));
  j["values"] = vals;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const auto& k : kKeys) known = known || k == key;
    if (!known) throw UsageError("unknown config field '" + key + "'");
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("model")) cfg.model = j.at("model").get<std::string>();
    if (j.contains("tbar")) cfg.tbar = real_from_json(j.at("tbar"), "tbar");
    if (j.contains("dt") && !j.at("dt").is_null()) cfg.dt = j.at("dt").get<double>();
    if (j.contains("tend") && !j.at("tend").is_null()) cfg.tend = j.at("tend").get<double>();
    if (j.contains("order") && !j.at("order").is_null()) cfg.order = j.at("order").get<int>();
    if (j.contains("tol") && !j.at("tol").is_null()) cfg.tol = j.at("tol").get<double>();
    if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("verify")) cfg.verify = j.at("verify").get<bool>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
    if (j.contains("axis")) cfg.axis = j.at("axis").get<std::string>();
    if (j.contains("values")) {
      for (const auto& v : j.at("values")) cfg.values.push_back(real_from_json(v, "values"));
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

void require_reduction_control(const ExperimentConfig& cfg) {
  if (cfg.order.has_value() == cfg.tol.has_value()) {
    throw UsageError("give exactly one of --order or --tol");
  }
  if (cfg.order && *cfg.order < 1) throw UsageError("--order must be >= 1");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw UsageError("--tol must be positive");
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.tbar > 0.0)) throw UsageError("--tbar must be positive (or inf)");
  if (cfg.dt && !(*cfg.dt > 0.0 && std::isfinite(*cfg.dt))) throw UsageError("--dt must be positive");
  if (cfg.tend && !(*cfg.tend > 0.0 && std::isfinite(*cfg.tend))) throw UsageError("--tend must be positive");
  if (cfg.jobs < 1) throw UsageError("--jobs must be >= 1");
}

std::optional<GenSpec> parse_gen_spec(const std::string& model) {
  if (model.rfind("gen:", 0) != 0) return std::nullopt;
  std::vector<int> parts;
  std::stringstream ss(model.substr(4));
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const long v = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || end != item.c_str() + item.size()) {
      throw UsageError("bad generator spec '" + model + "' (expected gen:n or gen:n,m,p)");
    }
    parts.push_back(static_cast<int>(v));
  }
  GenSpec g;
  if (parts.size() == 1) {
    g.n = parts[0];
  } else if (parts.size() == 3) {
    g.n = parts[0];
    g.m = parts[1];
    g.p = parts[2];
  } else {
    throw UsageError("bad generator spec '" + model + "' (expected gen:n or gen:n,m,p)");
  }
  return g;
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw UsageError("empty entry in value list '" + text + "'");
    out.push_back(parse_real(item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw UsageError("value list is empty");
  return out;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace tlbt_cli
