#include "tlbt/tlbt.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "tlbt/balancing.hpp"
#include "tlbt/error.hpp"
#include "tlbt/error_bounds.hpp"
#include "tlbt/gramians.hpp"
#include "tlbt/input_signal.hpp"
#include "tlbt/io.hpp"
#include "tlbt/simulation.hpp"
#include "tlbt/system.hpp"

struct tlbt_system {
  tlbt::StateSpaceSystem sys;
};

struct tlbt_reduction {
  std::shared_ptr<const tlbt::StateSpaceSystem> sys;
  tlbt::GramianSet gramians;
  tlbt::BalancingResult bal;
  tlbt::ReducedModel rom;
};

struct tlbt_input {
  tlbt::InputSignal u;
};

struct tlbt_trajectory {
  tlbt::Trajectory traj;
};

namespace {

thread_local std::string last_error;

tlbt_status to_status(tlbt::ErrorCode code) {
  using tlbt::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return TLBT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Dimension: return TLBT_ERR_DIMENSION;
    case ErrorCode::Parse: return TLBT_ERR_PARSE;
    case ErrorCode::Io: return TLBT_ERR_IO;
    case ErrorCode::Singular: return TLBT_ERR_SINGULAR;
    case ErrorCode::NotSeparated: return TLBT_ERR_NOT_SEPARATED;
    case ErrorCode::NotPsd: return TLBT_ERR_NOT_PSD;
    case ErrorCode::Unstable: return TLBT_ERR_UNSTABLE;
    case ErrorCode::Order: return TLBT_ERR_ORDER;
    case ErrorCode::Degenerate: return TLBT_ERR_DEGENERATE;
    case ErrorCode::Overflow: return TLBT_ERR_OVERFLOW;
    case ErrorCode::Numerical: return TLBT_ERR_NUMERICAL;
    case ErrorCode::VerificationUnavailable: return TLBT_ERR_VERIFICATION_UNAVAILABLE;
  }
  return TLBT_ERR_INTERNAL;
}

template <class F>
tlbt_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return TLBT_OK;
  } catch (const tlbt::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TLBT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TLBT_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TLBT_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw tlbt::Error(tlbt::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

tlbt::Matrix copy_in(const double* data, int rows, int cols) {
  return Eigen::Map<const tlbt::Matrix>(data, rows, cols);
}

void copy_out(const tlbt::Matrix& m, double* dst) {
  if (dst != nullptr) Eigen::Map<tlbt::Matrix>(dst, m.rows(), m.cols()) = m;
}

tlbt::Horizon horizon_of(double tbar) {
  if (std::isinf(tbar) && tbar > 0) return tlbt::Horizon::infinite();
  return tlbt::Horizon::finite(tbar);
}

}  // namespace

extern "C" {

const char* tlbt_version(void) { return "0.1.0"; }

const char* tlbt_status_name(tlbt_status status) {
  switch (status) {
    case TLBT_OK: return "ok";
    case TLBT_ERR_INTERNAL: return "internal-error";
    default: break;
  }
  if (status > TLBT_OK && status < TLBT_ERR_INTERNAL) {
    return tlbt::to_string(static_cast<tlbt::ErrorCode>(static_cast<int>(status) - 1));
  }
  return "unknown";
}

const char* tlbt_last_error(void) { return last_error.c_str(); }

void tlbt_string_free(char* s) { delete[] s; }

tlbt_status tlbt_system_generate_heat(int n, int m, int p, tlbt_system** out) {
  return guard([&] {
    need(out, "out");
    *out = new tlbt_system{tlbt::generate_heat_model(n, m, p)};
  });
}

tlbt_status tlbt_system_load(const char* manifest_path, tlbt_system** out) {
  return guard([&] {
    need(manifest_path, "manifest path");
    need(out, "out");
    *out = new tlbt_system{tlbt::load_system(std::filesystem::path(manifest_path))};
  });
}

tlbt_status tlbt_system_create(int n, int m, int p, const double* a, const double* b, const double* c,
                               const double* e, tlbt_system** out) {
  return guard([&] {
    need(a, "A");
    need(b, "B");
    need(c, "C");
    need(out, "out");
    if (n < 1 || m < 1 || p < 1) throw tlbt::Error(tlbt::ErrorCode::Dimension, "n, m, p must be positive");
    std::optional<tlbt::Matrix> em;
    if (e != nullptr) em = copy_in(e, n, n);
    *out = new tlbt_system{tlbt::StateSpaceSystem(copy_in(a, n, n), copy_in(b, n, m), copy_in(c, p, n), em)};
  });
}

tlbt_status tlbt_system_save(const tlbt_system* sys, const char* dir) {
  return guard([&] {
    need(sys, "system");
    need(dir, "directory");
    tlbt::save_system(sys->sys, dir);
  });
}

tlbt_status tlbt_system_dims(const tlbt_system* sys, int* n, int* m, int* p) {
  return guard([&] {
    need(sys, "system");
    if (n) *n = static_cast<int>(sys->sys.n());
    if (m) *m = static_cast<int>(sys->sys.m());
    if (p) *p = static_cast<int>(sys->sys.p());
  });
}

tlbt_status tlbt_system_name(const tlbt_system* sys, char** name) {
  return guard([&] {
    need(sys, "system");
    need(name, "name");
    *name = dup_string(sys->sys.name());
  });
}

void tlbt_system_free(tlbt_system* sys) { delete sys; }

tlbt_status tlbt_reduce(const tlbt_system* sys, double tbar, int order, double tol, tlbt_reduction** out) {
  return guard([&] {
    need(sys, "system");
    need(out, "out");
    const bool by_order = order > 0;
    const bool by_tol = tol > 0.0;
    if (by_order == by_tol) {
      throw tlbt::Error(tlbt::ErrorCode::InvalidArgument, "give exactly one of order > 0 or tol > 0");
    }
    auto red = std::make_unique<tlbt_reduction>();
    red->sys = std::make_shared<const tlbt::StateSpaceSystem>(sys->sys);
    red->gramians = tlbt::compute_gramians(*red->sys, horizon_of(tbar));
    tlbt::Index r = order;
    if (by_tol) {
      // Order selection needs the singular values first; balance at r = 1 to get them.
      const tlbt::BalancingResult probe = tlbt::balance(red->gramians, *red->sys, 1);
      const auto& sv = probe.singular_values;
      r = tlbt::select_order(std::span<const double>(sv.data(), static_cast<std::size_t>(sv.size())), tol);
    }
    red->bal = tlbt::balance(red->gramians, *red->sys, r);
    red->rom = tlbt::truncate(*red->sys, red->bal);
    *out = red.release();
  });
}

tlbt_status tlbt_reduction_order(const tlbt_reduction* red, int* order) {
  return guard([&] {
    need(red, "reduction");
    need(order, "order");
    *order = static_cast<int>(red->rom.order());
  });
}

tlbt_status tlbt_reduction_horizon(const tlbt_reduction* red, double* tbar) {
  return guard([&] {
    need(red, "reduction");
    need(tbar, "tbar");
    *tbar = red->rom.horizon.value();
  });
}

tlbt_status tlbt_reduction_singular_values(const tlbt_reduction* red, double* values, int capacity, int* count) {
  return guard([&] {
    need(red, "reduction");
    const auto& sv = red->bal.singular_values;
    if (count) *count = static_cast<int>(sv.size());
    if (values != nullptr) {
      const auto k = std::min<tlbt::Index>(sv.size(), std::max(capacity, 0));
      for (tlbt::Index i = 0; i < k; ++i) values[i] = sv(i);
    }
  });
}

tlbt_status tlbt_reduction_matrices(const tlbt_reduction* red, double* a11, double* b1, double* c1) {
  return guard([&] {
    need(red, "reduction");
    copy_out(red->rom.a11, a11);
    copy_out(red->rom.b1, b1);
    copy_out(red->rom.c1, c1);
  });
}

tlbt_status tlbt_reduction_save(const tlbt_reduction* red, const char* dir) {
  return guard([&] {
    need(red, "reduction");
    need(dir, "directory");
    tlbt::save_system(red->rom.as_system(), dir);
  });
}

tlbt_status tlbt_reduction_bound(const tlbt_reduction* red, double* epsilon) {
  return guard([&] {
    need(red, "reduction");
    need(epsilon, "epsilon");
    *epsilon = tlbt::tlbt_h2_bound(*red->sys, red->rom, red->gramians.p, red->gramians.horizon).epsilon;
  });
}

tlbt_status tlbt_reduction_bound_json(const tlbt_reduction* red, int verify, char** json) {
  return guard([&] {
    need(red, "reduction");
    need(json, "json");
    const tlbt::BoundReport rep =
        verify != 0 ? tlbt::tlbt_h2_bound_alt(*red->sys, red->gramians, red->rom.order())
                    : tlbt::tlbt_h2_bound(*red->sys, red->rom, red->gramians.p, red->gramians.horizon);
    *json = dup_string(tlbt::to_json(rep));
  });
}

tlbt_status tlbt_reduction_hinf_bound(const tlbt_reduction* red, double* bound) {
  return guard([&] {
    need(red, "reduction");
    need(bound, "bound");
    const auto& sv = red->bal.singular_values;
    *bound = tlbt::bt_hinf_bound(std::span<const double>(sv.data(), static_cast<std::size_t>(sv.size())),
                                 red->rom.order());
  });
}

void tlbt_reduction_free(tlbt_reduction* red) { delete red; }

tlbt_status tlbt_input_parse(const char* spec, int m, double horizon, uint64_t seed, tlbt_input** out) {
  return guard([&] {
    need(spec, "spec");
    need(out, "out");
    tlbt::InputContext ctx;
    ctx.dimension = m;
    ctx.horizon = horizon;
    ctx.seed = seed;
    *out = new tlbt_input{tlbt::parse_input(spec, ctx)};
  });
}

tlbt_status tlbt_input_random(int m, int pieces, double horizon, uint64_t seed, tlbt_input** out) {
  return guard([&] {
    need(out, "out");
    *out = new tlbt_input{tlbt::InputSignal::random_unit(m, pieces, horizon, seed)};
  });
}

tlbt_status tlbt_input_dimension(const tlbt_input* u, int* m) {
  return guard([&] {
    need(u, "input");
    need(m, "m");
    *m = static_cast<int>(u->u.dimension());
  });
}

tlbt_status tlbt_input_eval(const tlbt_input* u, double t, double* values) {
  return guard([&] {
    need(u, "input");
    need(values, "values");
    const tlbt::Vector v = u->u(t);
    for (tlbt::Index i = 0; i < v.size(); ++i) values[i] = v(i);
  });
}

tlbt_status tlbt_input_l2_norm(const tlbt_input* u, double horizon, double dt, double* norm) {
  return guard([&] {
    need(u, "input");
    need(norm, "norm");
    *norm = tlbt::input_l2_norm(u->u, horizon, dt);
  });
}

void tlbt_input_free(tlbt_input* u) { delete u; }

tlbt_status tlbt_simulate_system(const tlbt_system* sys, const tlbt_input* u, double t_end, double dt,
                                 tlbt_trajectory** out) {
  return guard([&] {
    need(sys, "system");
    need(u, "input");
    need(out, "out");
    *out = new tlbt_trajectory{tlbt::simulate(sys->sys, u->u, t_end, dt)};
  });
}

tlbt_status tlbt_simulate_reduced(const tlbt_reduction* red, const tlbt_input* u, double t_end, double dt,
                                  tlbt_trajectory** out) {
  return guard([&] {
    need(red, "reduction");
    need(u, "input");
    need(out, "out");
    *out = new tlbt_trajectory{tlbt::simulate(red->rom, u->u, t_end, dt)};
  });
}

tlbt_status tlbt_trajectory_dims(const tlbt_trajectory* traj, int* points, int* p) {
  return guard([&] {
    need(traj, "trajectory");
    if (points) *points = static_cast<int>(traj->traj.size());
    if (p) *p = static_cast<int>(traj->traj.outputs.rows());
  });
}

tlbt_status tlbt_trajectory_data(const tlbt_trajectory* traj, double* times, double* outputs) {
  return guard([&] {
    need(traj, "trajectory");
    if (times) std::copy(traj->traj.times.begin(), traj->traj.times.end(), times);
    copy_out(traj->traj.outputs, outputs);
  });
}

tlbt_status tlbt_trajectory_write_csv(const tlbt_trajectory* traj, const char* path) {
  return guard([&] {
    need(traj, "trajectory");
    need(path, "path");
    tlbt::write_file_atomic(path, tlbt::trajectory_csv(traj->traj));
  });
}

tlbt_status tlbt_output_error(const tlbt_trajectory* full, const tlbt_trajectory* reduced, double tbar,
                              double* series, double* max_on_horizon, double* max_overall) {
  return guard([&] {
    need(full, "full trajectory");
    need(reduced, "reduced trajectory");
    const tlbt::OutputError err = tlbt::output_error(full->traj, reduced->traj, tbar);
    if (series) std::copy(err.series.begin(), err.series.end(), series);
    if (max_on_horizon) *max_on_horizon = err.max_on_horizon;
    if (max_overall) *max_overall = err.max_overall;
  });
}

void tlbt_trajectory_free(tlbt_trajectory* traj) { delete traj; }

tlbt_status tlbt_write_file(const char* path, const char* contents) {
  return guard([&] {
    need(path, "path");
    need(contents, "contents");
    tlbt::write_file_atomic(path, contents);
  });
}

}  // extern "C"
