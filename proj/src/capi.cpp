#include "vwlab.h"

#include <omp.h>

#include <cstring>
#include <exception>
#include <memory>
#include <span>
#include <string>

#include "vwlab/config.hpp"
#include "vwlab/diagnostics.hpp"
#include "vwlab/memorykernel.hpp"
#include "vwlab/runner.hpp"
#include "vwlab/validation.hpp"

struct vwlab_config {
  vwlab::SimulationConfig cfg;
  std::string text;
};

struct vwlab_kernel {
  std::unique_ptr<vwlab::KernelSpectrum> spectrum;
};

namespace {

thread_local std::string last_error;

vwlab_status record(vwlab_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
vwlab_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return VWLAB_OK;
  } catch (const vwlab::Error& e) {
    return record(static_cast<vwlab_status>(vwlab::exit_code_for(e.kind())),
                  std::string(vwlab::to_string(e.kind())) + ": " + e.what());
  } catch (const std::exception& e) {
    return record(VWLAB_E_SOLVER, e.what());
  }
}

vwlab_status null_arg(const char* what) { return record(VWLAB_E_NULL, std::string(what) + " is NULL"); }

}  // namespace

extern "C" {

const char* vwlab_version(void) { return "0.1.0"; }

const char* vwlab_last_error(void) { return last_error.c_str(); }

void vwlab_set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

vwlab_status vwlab_config_from_text(const char* text, const char* overrides, vwlab_config** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<vwlab_config>();
    c->cfg = vwlab::parse_config_text(text ? text : "", overrides ? overrides : "");
    c->text = c->cfg.canonical_text();
    *out = c.release();
  });
}

vwlab_status vwlab_config_from_file(const char* path, const char* overrides, vwlab_config** out) {
  if (!out) return null_arg("out");
  if (!path) return null_arg("path");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<vwlab_config>();
    c->cfg = vwlab::parse_config_file(path, overrides ? overrides : "");
    c->text = c->cfg.canonical_text();
    *out = c.release();
  });
}

void vwlab_config_free(vwlab_config* cfg) { delete cfg; }

vwlab_status vwlab_config_hash(const vwlab_config* cfg, char out[17]) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  const std::string h = cfg->cfg.hash_hex();
  std::memcpy(out, h.c_str(), 17);
  return VWLAB_OK;
}

const char* vwlab_config_mode(const vwlab_config* cfg) { return cfg ? vwlab::to_string(cfg->cfg.mode) : ""; }

vwlab_status vwlab_config_text(const vwlab_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  const std::size_t n = cfg->text.size() + 1;
  if (needed) *needed = n;
  if (cap == 0) return VWLAB_OK;
  if (!buf) return null_arg("buf");
  const std::size_t m = std::min(cap - 1, cfg->text.size());
  std::memcpy(buf, cfg->text.data(), m);
  buf[m] = '\0';
  return VWLAB_OK;
}

int vwlab_run(const vwlab_config* cfg, const char* out_dir) {
  if (!cfg) return null_arg("cfg");
  if (!out_dir) return null_arg("out_dir");
  try {
    return vwlab::run_config(cfg->cfg, out_dir);
  } catch (const std::exception& e) {
    return record(VWLAB_E_SOLVER, e.what());
  }
}

vwlab_status vwlab_kernel_create(int n, double support_radius, double mass, vwlab_kernel** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    vwlab::require(n >= 1 && support_radius > 0.0 && mass >= 0.0, vwlab::ErrorKind::InvalidParameter,
                   "kernel needs n >= 1, radius > 0 and mass >= 0");
    auto k = std::make_unique<vwlab_kernel>();
    k->spectrum = std::make_unique<vwlab::KernelSpectrum>(vwlab::FormFactor::bump(n, support_radius, mass));
    *out = k.release();
  });
}

void vwlab_kernel_free(vwlab_kernel* k) { delete k; }

vwlab_status vwlab_kernel_q(const vwlab_kernel* k, double t, double* out) {
  if (!k) return null_arg("kernel");
  if (!out) return null_arg("out");
  return guarded([&] { *out = k->spectrum->q(t); });
}

vwlab_status vwlab_kernel_p(const vwlab_kernel* k, double t, double c, double* out) {
  if (!k) return null_arg("kernel");
  if (!out) return null_arg("out");
  return guarded([&] { *out = k->spectrum->p(t, c); });
}

vwlab_status vwlab_kernel_kappa(const vwlab_kernel* k, double* out) {
  if (!k) return null_arg("kernel");
  if (!out) return null_arg("out");
  return guarded([&] { *out = k->spectrum->kappa(); });
}

vwlab_status vwlab_kernel_tail_constant(const vwlab_kernel* k, double* out) {
  if (!k) return null_arg("kernel");
  if (!out) return null_arg("out");
  return guarded([&] { *out = k->spectrum->tail_constant(); });
}

vwlab_status vwlab_wasserstein1(const double* x, const double* wx, size_t nx, const double* y,
                                const double* wy, size_t ny, double* out) {
  if (!x || !wx || !y || !wy) return null_arg("atom array");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto a = vwlab::Distribution1D::from_atoms(std::span(x, nx), std::span(wx, nx));
    const auto b = vwlab::Distribution1D::from_atoms(std::span(y, ny), std::span(wy, ny));
    *out = vwlab::wasserstein1_1d(a, b);
  });
}

vwlab_status vwlab_run_criterion(int id, int* passed, double* seconds, char* detail, size_t cap) {
  if (!passed) return null_arg("passed");
  return guarded([&] {
    const vwlab::CriterionResult r = vwlab::run_criterion(id);
    *passed = r.pass ? 1 : 0;
    if (seconds) *seconds = r.seconds;
    if (detail && cap > 0) {
      const std::size_t m = std::min(cap - 1, r.detail.size());
      std::memcpy(detail, r.detail.data(), m);
      detail[m] = '\0';
    }
  });
}

}  // extern "C"
