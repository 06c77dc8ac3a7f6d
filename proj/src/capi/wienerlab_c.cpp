#include "wienerlab/wienerlab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "wienerlab/bmo.hpp"
#include "wienerlab/bsde.hpp"
#include "wienerlab/chaos.hpp"
#include "wienerlab/experiments.hpp"

struct wl_grid {
  wlab::GridPtr grid;
};
struct wl_profile {
  wlab::RotationProfile profile;
};
struct wl_functional {
  wlab::FunctionalPtr xi;
};
struct wl_bsde {
  wlab::BsdeSolution solution;
  double x0;
};

namespace {

thread_local std::string last_error;

wl_status set_error(wl_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
wl_status guarded(F&& body) {
  try {
    body();
    return WL_OK;
  } catch (const wlab::Error& e) {
    return set_error(static_cast<wl_status>(e.code()), e.what());
  } catch (const std::exception& e) {
    return set_error(WL_INTERNAL, e.what());
  } catch (...) {
    return set_error(WL_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* what) {
  if (!p) wlab::fail(wlab::ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

wlab::McConfig to_cpp(const wl_mc_config* cfg) {
  need(cfg, "mc config");
  wlab::McConfig c;
  c.n_samples = cfg->n_samples;
  c.n_batches = cfg->n_batches;
  c.seed = cfg->seed;
  c.n_inner = cfg->n_inner;
  c.threads = cfg->threads;
  return c;
}

void put(const wlab::Estimate& e, wl_estimate* out) {
  need(out, "output");
  *out = {e.value, e.std_error, e.n};
}

}  // namespace

extern "C" {

const char* wl_version(void) { return "0.1.0"; }
const char* wl_last_error(void) { return last_error.c_str(); }

const char* wl_status_name(wl_status status) {
  if (status == WL_OK) return "ok";
  if (status == WL_INTERNAL) return "internal";
  if (status >= WL_INVALID_ARGUMENT && status <= WL_CONTRACT_FAILED)
    return wlab::to_string(static_cast<wlab::ErrorCode>(status));
  return "unknown";
}

wl_mc_config wl_mc_default(void) { return {100000, 20, 1, 0, 1}; }

wl_status wl_grid_uniform(double horizon, size_t cells, wl_grid** out) {
  return guarded([&] {
    need(out, "output");
    *out = new wl_grid{wlab::make_uniform_grid(horizon, cells)};
  });
}
void wl_grid_free(wl_grid* grid) { delete grid; }
size_t wl_grid_cells(const wl_grid* grid) { return grid ? grid->grid->cells() : 0; }
double wl_grid_horizon(const wl_grid* grid) { return grid ? grid->grid->horizon() : 0.0; }

wl_status wl_profile_indicator(const wl_grid* grid, double a, double b, wl_profile** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "output");
    *out = new wl_profile{wlab::RotationProfile::indicator(grid->grid, a, b)};
  });
}
wl_status wl_profile_constant(const wl_grid* grid, double r, wl_profile** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "output");
    *out = new wl_profile{wlab::RotationProfile::constant(grid->grid, r)};
  });
}
void wl_profile_free(wl_profile* profile) { delete profile; }

wl_status wl_functional_create(const wl_grid* grid, const char* name, const char* params, wl_functional** out) {
  return guarded([&] {
    need(grid, "grid");
    need(name, "name");
    need(out, "output");
    *out = new wl_functional{wlab::make_functional(grid->grid, name, params ? params : "")};
  });
}
void wl_functional_free(wl_functional* functional) { delete functional; }

size_t wl_functional_name(const wl_functional* functional, char* buf, size_t size) {
  if (!functional) return 0;
  const std::string n = functional->xi->name();
  if (buf && size) {
    const size_t k = std::min(size - 1, n.size());
    std::memcpy(buf, n.data(), k);
    buf[k] = '\0';
  }
  return n.size();
}

wl_status wl_p_norm_diff(const wl_functional* xi, const wl_profile* phi, double p, const wl_mc_config* cfg,
                         wl_estimate* out) {
  return guarded([&] {
    need(xi, "functional");
    need(phi, "profile");
    put(wlab::p_norm_diff(*xi->xi, phi->profile, p, to_cpp(cfg)), out);
  });
}

wl_status wl_sandwich_ratio(const wl_functional* xi, double a, double b, double p, const wl_mc_config* cfg,
                            wl_estimate* ratio, int* within_bounds) {
  return guarded([&] {
    need(xi, "functional");
    const auto r = wlab::sandwich_check(*xi->xi, a, b, p, to_cpp(cfg));
    put(r.ratio, ratio);
    if (within_bounds) *within_bounds = r.within_bounds ? 1 : 0;
  });
}

wl_status wl_seminorm(const wl_functional* xi, const char* phi_name, const char* phi_params, double p,
                      const wl_mc_config* cfg, wl_estimate* out) {
  return guarded([&] {
    need(xi, "functional");
    need(phi_name, "phi name");
    const auto phi = wlab::make_phi(xi->xi->grid(), phi_name, phi_params ? phi_params : "");
    put(wlab::seminorm(*xi->xi, *phi, p, to_cpp(cfg)).value, out);
  });
}

wl_status wl_chaos_residual(const wl_functional* xi, double a, double b, double* out) {
  return guarded([&] {
    need(xi, "functional");
    need(out, "output");
    *out = wlab::conditional_residual_exact(wlab::expand_library(*xi->xi), a, b);
  });
}

wl_status wl_kazamaki_phi(double beta, double* out) {
  return guarded([&] {
    need(out, "output");
    *out = wlab::kazamaki_phi(beta);
  });
}
wl_status wl_kazamaki_psi(double gamma, double beta, double* out) {
  return guarded([&] {
    need(out, "output");
    *out = wlab::kazamaki_psi(gamma, beta);
  });
}
wl_status wl_phi_inverse(double x, double* out) {
  return guarded([&] {
    need(out, "output");
    *out = wlab::phi_inverse(x);
  });
}
wl_status wl_p0_threshold(double lz, double s_inf, double* out) {
  return guarded([&] {
    need(out, "output");
    *out = wlab::p0_threshold(lz, s_inf);
  });
}
wl_status wl_rh_bound(double sl, size_t n_slices, double beta, int* has_bound, double* out) {
  return guarded([&] {
    need(has_bound, "has_bound");
    need(out, "output");
    const auto b = wlab::rh_bound(sl, n_slices, beta);
    *has_bound = b ? 1 : 0;
    *out = b.value_or(0.0);
  });
}

wl_status wl_bsde_solve_preset(const char* preset, double horizon, size_t steps, wl_bsde** out) {
  return guarded([&] {
    need(preset, "preset");
    need(out, "output");
    const auto p = wlab::bsde_preset(preset);
    *out = new wl_bsde{wlab::solve_markovian(p.problem, wlab::make_uniform_grid(horizon, steps), p.solver),
                       p.problem.model.x0};
  });
}
void wl_bsde_free(wl_bsde* solution) { delete solution; }

wl_status wl_bsde_value(const wl_bsde* solution, size_t k, double x, double* out) {
  return guarded([&] {
    need(solution, "solution");
    need(out, "output");
    wlab::require(k <= solution->solution.grid()->cells(), wlab::ErrorCode::invalid_argument,
                  "time index out of range");
    *out = solution->solution.value(k, x);
  });
}
wl_status wl_bsde_y0(const wl_bsde* solution, double* out) {
  return solution ? wl_bsde_value(solution, 0, solution->x0, out) : set_error(WL_INVALID_ARGUMENT, "solution is NULL");
}

wl_status wl_run_config(const char* path, unsigned threads, const char* out_dir, int* exit_code) {
  return guarded([&] {
    need(path, "path");
    need(exit_code, "exit_code");
    wlab::RunOptions opts;
    opts.threads = threads;
    if (out_dir) opts.out_dir = out_dir;
    const auto r = wlab::run_config_file(path, opts);
    *exit_code = r.exit_code;
    last_error = r.exit_code ? "contract failed: " + r.failing_record : std::string();
  });
}

wl_status wl_catalog(char** out) {
  return guarded([&] {
    need(out, "output");
    const std::string text = wlab::catalog_text();
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}
void wl_string_free(char* text) { std::free(text); }

}  // extern "C"
