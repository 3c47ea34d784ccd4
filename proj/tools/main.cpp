#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "experiment_config.hpp"
#include "tlbt/tlbt.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tlbt_cli;

namespace {

struct ApiError : std::runtime_error {
  ApiError(tlbt_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  tlbt_status status;
};

void check(tlbt_status s) {
  if (s != TLBT_OK) throw ApiError(s, tlbt_last_error());
}

struct Free {
  void operator()(tlbt_system* p) const { tlbt_system_free(p); }
  void operator()(tlbt_reduction* p) const { tlbt_reduction_free(p); }
  void operator()(tlbt_input* p) const { tlbt_input_free(p); }
  void operator()(tlbt_trajectory* p) const { tlbt_trajectory_free(p); }
};
using System = std::unique_ptr<tlbt_system, Free>;
using Reduction = std::unique_ptr<tlbt_reduction, Free>;
using Input = std::unique_ptr<tlbt_input, Free>;
using Trajectory = std::unique_ptr<tlbt_trajectory, Free>;

int exit_code_for(tlbt_status s) {
  switch (s) {
    case TLBT_ERR_INVALID_ARGUMENT:
    case TLBT_ERR_DIMENSION:
    case TLBT_ERR_PARSE:
    case TLBT_ERR_IO:
    case TLBT_ERR_ORDER:
      return 2;
    default:
      return 1;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  check(tlbt_write_file(path.string().c_str(), text.c_str()));
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

System load_model(const std::string& model) {
  tlbt_system* raw = nullptr;
  if (const auto gen = parse_gen_spec(model)) {
    check(tlbt_system_generate_heat(gen->n, gen->m, gen->p, &raw));
  } else {
    check(tlbt_system_load(model.c_str(), &raw));
  }
  return System(raw);
}

struct Dims {
  int n = 0, m = 0, p = 0;
};

Dims dims_of(const tlbt_system* sys) {
  Dims d;
  check(tlbt_system_dims(sys, &d.n, &d.m, &d.p));
  return d;
}

Reduction reduce(const tlbt_system* sys, double tbar, std::optional<int> order, std::optional<double> tol) {
  tlbt_reduction* raw = nullptr;
  check(tlbt_reduce(sys, tbar, order.value_or(0), tol.value_or(0.0), &raw));
  return Reduction(raw);
}

int order_of(const tlbt_reduction* red) {
  int r = 0;
  check(tlbt_reduction_order(red, &r));
  return r;
}

std::vector<double> singular_values(const tlbt_reduction* red) {
  int count = 0;
  check(tlbt_reduction_singular_values(red, nullptr, 0, &count));
  std::vector<double> sv(static_cast<std::size_t>(count));
  check(tlbt_reduction_singular_values(red, sv.data(), count, &count));
  return sv;
}

double bound_of(const tlbt_reduction* red) {
  double eps = 0.0;
  check(tlbt_reduction_bound(red, &eps));
  return eps;
}

json bound_json(const tlbt_reduction* red, bool verify) {
  char* text = nullptr;
  check(tlbt_reduction_bound_json(red, verify ? 1 : 0, &text));
  json j = json::parse(text);
  tlbt_string_free(text);
  return j;
}

Input make_input(const std::string& spec, int m, double horizon, std::uint64_t seed) {
  tlbt_input* raw = nullptr;
  check(tlbt_input_parse(spec.c_str(), m, horizon, seed, &raw));
  return Input(raw);
}

double l2_norm(const tlbt_input* u, double horizon, double dt) {
  double v = 0.0;
  check(tlbt_input_l2_norm(u, horizon, dt, &v));
  return v;
}

Trajectory simulate(const tlbt_system* sys, const tlbt_input* u, double tend, double dt) {
  tlbt_trajectory* raw = nullptr;
  check(tlbt_simulate_system(sys, u, tend, dt, &raw));
  return Trajectory(raw);
}

Trajectory simulate(const tlbt_reduction* red, const tlbt_input* u, double tend, double dt) {
  tlbt_trajectory* raw = nullptr;
  check(tlbt_simulate_reduced(red, u, tend, dt, &raw));
  return Trajectory(raw);
}

void require_finite_tbar(const ExperimentConfig& cfg, const char* command) {
  if (std::isinf(cfg.tbar)) throw UsageError(std::string(command) + " needs a finite --tbar");
}

void prepare_out(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw UsageError("cannot create output directory '" + cfg.out + "': " + ec.message());
  write_json(fs::path(cfg.out) / "config.json", to_json(cfg));
}

// ---- commands ----

int cmd_gen_model(const ExperimentConfig& cfg) {
  System sys = load_model(cfg.model);
  prepare_out(cfg);
  check(tlbt_system_save(sys.get(), cfg.out.c_str()));
  const Dims d = dims_of(sys.get());
  std::cout << "wrote model n=" << d.n << " m=" << d.m << " p=" << d.p << " to " << cfg.out << "\n";
  return 0;
}

int cmd_reduce(const ExperimentConfig& cfg) {
  require_reduction_control(cfg);
  System sys = load_model(cfg.model);
  Reduction red = reduce(sys.get(), cfg.tbar, cfg.order, cfg.tol);
  const Dims d = dims_of(sys.get());
  const int r = order_of(red.get());
  const std::vector<double> sv = singular_values(red.get());

  prepare_out(cfg);
  const fs::path out(cfg.out);
  check(tlbt_reduction_save(red.get(), (out / "rom").string().c_str()));
  std::string csv = "i,sigma\n";
  double tail = 0.0;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    csv += std::to_string(i + 1) + "," + format_real(sv[i]) + "\n";
    if (static_cast<int>(i) >= r) tail += sv[i];
  }
  write_text(out / "singular_values.csv", csv);
  json summary;
  summary["n"] = d.n;
  summary["m"] = d.m;
  summary["p"] = d.p;
  summary["r"] = r;
  summary["n_hat"] = sv.size();
  summary["tbar"] = std::isinf(cfg.tbar) ? json(nullptr) : json(cfg.tbar);
  summary["method"] = std::isinf(cfg.tbar) ? "BT" : "TLBT";
  summary["sigma_tail_sum"] = tail;
  write_json(out / "summary.json", summary);
  std::cout << "reduced n=" << d.n << " to r=" << r << " (sigma tail " << format_real(tail) << ")\n";
  return 0;
}

int cmd_bound(const ExperimentConfig& cfg) {
  require_reduction_control(cfg);
  System sys = load_model(cfg.model);
  Reduction red = reduce(sys.get(), cfg.tbar, cfg.order, cfg.tol);
  const json report = bound_json(red.get(), cfg.verify);
  prepare_out(cfg);
  write_json(fs::path(cfg.out) / "bound.json", report);
  std::cout << "epsilon = " << format_real(report.at("epsilon").get<double>()) << "\n";
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  require_reduction_control(cfg);
  require_finite_tbar(cfg, "simulate");
  const double dt = cfg.effective_dt();
  const double tend = cfg.effective_tend();
  System sys = load_model(cfg.model);
  const Dims d = dims_of(sys.get());
  Reduction red = reduce(sys.get(), cfg.tbar, cfg.order, cfg.tol);
  const double eps = bound_of(red.get());
  Input u = make_input(cfg.input, d.m, cfg.tbar, cfg.seed);
  const double unorm = l2_norm(u.get(), cfg.tbar, dt);
  const double level = eps * unorm;

  Trajectory full = simulate(sys.get(), u.get(), tend, dt);
  Trajectory rom = simulate(red.get(), u.get(), tend, dt);
  int points = 0;
  check(tlbt_trajectory_dims(full.get(), &points, nullptr));
  std::vector<double> times(static_cast<std::size_t>(points));
  std::vector<double> err(static_cast<std::size_t>(points));
  double max_h = 0.0;
  double max_all = 0.0;
  check(tlbt_trajectory_data(full.get(), times.data(), nullptr));
  check(tlbt_output_error(full.get(), rom.get(), cfg.tbar, err.data(), &max_h, &max_all));

  prepare_out(cfg);
  const fs::path out(cfg.out);
  check(tlbt_trajectory_write_csv(full.get(), (out / "trajectory_full.csv").string().c_str()));
  check(tlbt_trajectory_write_csv(rom.get(), (out / "trajectory_reduced.csv").string().c_str()));
  std::string csv = "t,err,bound_level\n";
  const std::string level_s = format_real(level);
  for (std::size_t k = 0; k < times.size(); ++k) {
    csv += format_real(times[k]) + "," + format_real(err[k]) + "," + level_s + "\n";
  }
  write_text(out / "error.csv", csv);
  json summary;
  summary["r"] = order_of(red.get());
  summary["tbar"] = cfg.tbar;
  summary["tend"] = tend;
  summary["dt"] = dt;
  summary["epsilon"] = eps;
  summary["input_l2_norm"] = unorm;
  summary["bound_level"] = level;
  summary["max_error_tbar"] = max_h;
  summary["max_error_tend"] = max_all;
  summary["bound_holds"] = max_h <= level * (1.0 + 1e-6);
  write_json(out / "max_error.json", summary);
  std::cout << "max error on [0,tbar] = " << format_real(max_h) << ", bound level = " << level_s << "\n";
  return 0;
}

struct SweepRow {
  double value = 0.0;
  std::string method;
  int r = 0;
  double max_error = 0.0;
  std::optional<double> bound_level;
  std::string status = "ok";
};

std::string csv_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += (c == '\n') ? ' ' : c;
  }
  return q + "\"";
}

// Both methods at one sweep value.
std::pair<SweepRow, SweepRow> sweep_point(const ExperimentConfig& cfg, const tlbt_system* sys, int m,
                                          double value) {
  double tbar = cfg.tbar;
  std::optional<int> order = cfg.order;
  std::optional<double> tol = cfg.tol;
  if (cfg.axis == "r") {
    order = static_cast<int>(value);
    tol.reset();
  } else if (cfg.axis == "tol") {
    tol = value;
    order.reset();
  } else {
    tbar = value;
  }
  // dt and tend scale with the horizon unless set explicitly.
  const double dt = cfg.dt ? *cfg.dt : tbar / 2500.0;
  const double tend = cfg.tend ? *cfg.tend : 4.0 * tbar;

  SweepRow bt;
  bt.value = value;
  bt.method = "BT";
  SweepRow tl;
  tl.value = value;
  tl.method = "TLBT";
  Input u;
  Trajectory full;
  try {
    u = make_input(cfg.input, m, tbar, cfg.seed);
    full = simulate(sys, u.get(), tend, dt);
  } catch (const ApiError& e) {
    bt.status = tl.status = std::string("error: ") + e.what();
    return {bt, tl};
  }
  auto run = [&](SweepRow& row, double horizon) {
    try {
      Reduction red = reduce(sys, horizon, order, tol);
      row.r = order_of(red.get());
      Trajectory rom = simulate(red.get(), u.get(), tend, dt);
      check(tlbt_output_error(full.get(), rom.get(), tbar, nullptr, &row.max_error, nullptr));
      if (!std::isinf(horizon)) row.bound_level = bound_of(red.get()) * l2_norm(u.get(), tbar, dt);
    } catch (const ApiError& e) {
      row.status = std::string("error: ") + e.what();
    }
  };
  run(bt, std::numeric_limits<double>::infinity());
  run(tl, tbar);
  return {bt, tl};
}

int cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.axis != "r" && cfg.axis != "tbar" && cfg.axis != "tol") {
    throw UsageError("--axis must be one of r, tbar, tol");
  }
  if (cfg.values.empty()) throw UsageError("--values must be nonempty");
  for (double v : cfg.values) {
    if (cfg.axis == "r" && (v < 1 || v != std::floor(v))) throw UsageError("r values must be positive integers");
    if (cfg.axis != "r" && !(v > 0.0 && std::isfinite(v))) throw UsageError("sweep values must be positive");
  }
  if (cfg.axis == "tbar") require_reduction_control(cfg);
  if (cfg.axis != "tbar") require_finite_tbar(cfg, "sweep");
  System sys = load_model(cfg.model);
  const Dims d = dims_of(sys.get());

  std::vector<std::pair<SweepRow, SweepRow>> rows(cfg.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      rows[i] = sweep_point(cfg, sys.get(), d.m, cfg.values[i]);
    }
  };
  const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), rows.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string csv = "axis,value,method,r,max_error,bound_level,status\n";
  std::size_t failures = 0;
  for (const auto& [bt, tl] : rows) {
    for (const SweepRow* row : {&bt, &tl}) {
      const bool ok = row->status == "ok";
      failures += ok ? 0 : 1;
      csv += cfg.axis + "," + format_real(row->value) + "," + row->method + ",";
      csv += (ok ? std::to_string(row->r) : std::string()) + ",";
      csv += (ok ? format_real(row->max_error) : std::string()) + ",";
      csv += (ok && row->bound_level ? format_real(*row->bound_level) : std::string()) + ",";
      csv += (ok ? row->status : csv_quote(row->status)) + "\n";
    }
  }
  prepare_out(cfg);
  write_text(fs::path(cfg.out) / "sweep.csv", csv);
  std::cout << "sweep over " << cfg.axis << ": " << rows.size() * 2 << " rows";
  if (failures > 0) std::cout << " (" << failures << " failed)";
  std::cout << "\n";
  return 0;
}

// ---- option plumbing ----

struct RawOptions {
  std::string config;
  std::string model, input, out, axis, values, tbar;
  double dt = 0, tend = 0, tol = 0;
  int order = 0, jobs = 1;
  std::uint64_t seed = 0;
  bool verify = false;
  std::vector<std::pair<std::string, CLI::Option*>> opts;

  bool given(const std::string& name) const {
    for (const auto& [n, o] : opts) {
      if (n == name) return o->count() > 0;
    }
    return false;
  }
};

void add_options(CLI::App* sub, RawOptions& raw, bool sweep) {
  auto add = [&](const std::string& name, CLI::Option* o) { raw.opts.emplace_back(name, o); };
  sub->add_option("--config", raw.config, "JSON config file; flags override its fields");
  add("model", sub->add_option("--model", raw.model, "manifest path or gen:n[,m,p]"));
  add("tbar", sub->add_option("--tbar", raw.tbar, "time horizon (inf for classical BT)"));
  add("dt", sub->add_option("--dt", raw.dt, "time step (default tbar/2500)"));
  add("tend", sub->add_option("--tend", raw.tend, "final simulation time (default 4 tbar)"));
  auto* order = sub->add_option("--order", raw.order, "reduced order r");
  auto* tol = sub->add_option("--tol", raw.tol, "singular value tail tolerance");
  order->excludes(tol);
  add("order", order);
  add("tol", tol);
  add("input", sub->add_option("--input", raw.input, "const:c | star | zero | table:path | random[:pieces]"));
  add("seed", sub->add_option("--seed", raw.seed, "seed for random inputs"));
  add("out", sub->add_option("--out", raw.out, "output directory"));
  add("verify", sub->add_flag("--verify", raw.verify, "add the balanced-coordinate check to bound output"));
  add("jobs", sub->add_option("--jobs", raw.jobs, "parallel sweep points"));
  if (sweep) {
    add("axis", sub->add_option("--axis", raw.axis, "r | tbar | tol"));
    add("values", sub->add_option("--values", raw.values, "comma-separated sweep values"));
  }
}

ExperimentConfig resolve(const RawOptions& raw) {
  ExperimentConfig cfg;
  if (!raw.config.empty()) {
    std::ifstream in(raw.config);
    if (!in) throw ApiError(TLBT_ERR_IO, "cannot open config file '" + raw.config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ApiError(TLBT_ERR_PARSE, "config file '" + raw.config + "': " + e.what());
    }
    cfg = config_from_json(j);
  }
  if (raw.given("model")) cfg.model = raw.model;
  if (raw.given("tbar")) cfg.tbar = parse_real(raw.tbar);
  if (raw.given("dt")) cfg.dt = raw.dt;
  if (raw.given("tend")) cfg.tend = raw.tend;
  if (raw.given("order")) {
    cfg.order = raw.order;
    cfg.tol.reset();
  }
  if (raw.given("tol")) {
    cfg.tol = raw.tol;
    cfg.order.reset();
  }
  if (raw.given("input")) cfg.input = raw.input;
  if (raw.given("seed")) cfg.seed = raw.seed;
  if (raw.given("out")) cfg.out = raw.out;
  if (raw.given("verify")) cfg.verify = raw.verify;
  if (raw.given("jobs")) cfg.jobs = raw.jobs;
  if (raw.given("axis")) cfg.axis = raw.axis;
  if (raw.given("values")) cfg.values = parse_value_list(raw.values);
  validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-limited balanced truncation with output error bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tlbt_version());

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const ExperimentConfig&);
    RawOptions raw;
    CLI::App* sub = nullptr;
  };
  std::vector<Command> commands;
  commands.push_back({"gen-model", "write a heat-equation model (Matrix Market + manifest)", cmd_gen_model, {}});
  commands.push_back({"reduce", "reduce a model; write ROM, singular values, summary", cmd_reduce, {}});
  commands.push_back({"bound", "compute the output error bound", cmd_bound, {}});
  commands.push_back({"simulate", "simulate full and reduced model; write error series", cmd_simulate, {}});
  commands.push_back({"sweep", "sweep r, tbar or tol comparing BT and TLBT", cmd_sweep, {}});
  for (auto& c : commands) {
    c.sub = app.add_subcommand(c.name, c.help);
    add_options(c.sub, c.raw, std::string(c.name) == "sweep");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (auto& c : commands) {
    if (!c.sub->parsed()) continue;
    try {
      return c.run(resolve(c.raw));
    } catch (const UsageError& e) {
      std::cerr << "tlbt " << c.name << ": error: " << e.what() << "\n";
      return 2;
    } catch (const ApiError& e) {
      std::cerr << "tlbt " << c.name << ": error (" << tlbt_status_name(e.status) << "): " << e.what() << "\n";
      return exit_code_for(e.status);
    } catch (const std::exception& e) {
      std::cerr << "tlbt " << c.name << ": error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
