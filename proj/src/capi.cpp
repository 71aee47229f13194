#include "ksrobin/ksrobin.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>

#include "ksrobin/commands.hpp"

struct ksr_manifest {
  ksr::OutputManifest m;
};

struct ksr_classify_request {
  ksr::ClassifyRequest r;
};

struct ksr_verdict {
  ksr::ClassifyResult r;
};

namespace {

thread_local std::string last_error;

ksr_status fail(ksr_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

template <class Fn>
ksr_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return KSR_OK;
  } catch (const ksr::ValidationError& e) {
    return fail(KSR_ERR_VALIDATION, e.what());
  } catch (const std::bad_alloc&) {
    return fail(KSR_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(KSR_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(KSR_ERR_RUNTIME, "unknown error");
  }
}

using Command = ksr::OutputManifest (*)(const std::string&, const std::optional<std::string>&);

ksr_status run_command(Command cmd, const char* config_path, const char* out_dir,
                       ksr_manifest** out) {
  if (!config_path || !out) return fail(KSR_ERR_NULL_ARG, "config_path and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    std::optional<std::string> dir;
    if (out_dir) dir = out_dir;
    auto m = new ksr_manifest{cmd(config_path, dir)};
    *out = m;
  });
}

} // namespace

extern "C" {

const char* ksr_version(void) { return "1.0.0"; }

const char* ksr_last_error(void) { return last_error.c_str(); }

int ksr_exit_code(ksr_status s) {
  switch (s) {
  case KSR_OK: return 0;
  case KSR_ERR_VALIDATION:
  case KSR_ERR_NULL_ARG: return 1;
  default: return 2;
  }
}

ksr_status ksr_run(const char* config_path, const char* out_dir, ksr_manifest** out) {
  return run_command(&ksr::cmd_run, config_path, out_dir, out);
}

ksr_status ksr_compare(const char* config_path, const char* out_dir, ksr_manifest** out) {
  return run_command(&ksr::cmd_compare, config_path, out_dir, out);
}

ksr_status ksr_sweep(const char* config_path, const char* out_dir, ksr_manifest** out) {
  return run_command(&ksr::cmd_sweep, config_path, out_dir, out);
}

const char* ksr_manifest_run_id(const ksr_manifest* m) { return m ? m->m.run_id.c_str() : ""; }
const char* ksr_manifest_status(const ksr_manifest* m) { return m ? m->m.status.c_str() : ""; }
const char* ksr_manifest_summary(const ksr_manifest* m) { return m ? m->m.summary.c_str() : ""; }
const char* ksr_manifest_config_echo(const ksr_manifest* m) {
  return m ? m->m.config_echo.c_str() : "";
}
const char* ksr_manifest_file(const ksr_manifest* m) {
  return m ? m->m.manifest_path.c_str() : "";
}
size_t ksr_manifest_path_count(const ksr_manifest* m) { return m ? m->m.paths.size() : 0; }
const char* ksr_manifest_path(const ksr_manifest* m, size_t i) {
  if (!m || i >= m->m.paths.size()) return nullptr;
  return m->m.paths[i].c_str();
}
void ksr_manifest_free(ksr_manifest* m) { delete m; }

ksr_classify_request* ksr_classify_request_new(void) {
  return new (std::nothrow) ksr_classify_request{};
}

ksr_status ksr_classify_request_set(ksr_classify_request* r, const char* name, double value) {
  if (!r || !name) return fail(KSR_ERR_NULL_ARG, "request and name must be non-null");
  if (!std::isfinite(value))
    return fail(KSR_ERR_VALIDATION, std::string("non-finite value for ") + name);
  const std::string k = name;
  auto& q = r->r;
  if (k == "chi") q.chi = value;
  else if (k == "h") q.h = value;
  else if (k == "alpha") q.alpha = value;
  else if (k == "tau") q.tau = value;
  else if (k == "a") q.a = value;
  else if (k == "b") q.b = value;
  else if (k == "c") q.c = value;
  else if (k == "trace_c") q.trace_c = value;
  else if (k == "radius") q.radius = value;
  else if (k == "n" || k == "cells") {
    if (value != std::floor(value) || value < 1 || value > 1e7)
      return fail(KSR_ERR_VALIDATION, k + " must be a positive integer");
    if (k == "n") q.n = static_cast<int>(value);
    else q.cells = static_cast<std::size_t>(value);
  } else {
    return fail(KSR_ERR_VALIDATION, "unknown classify parameter '" + k + "'");
  }
  return KSR_OK;
}

void ksr_classify_request_free(ksr_classify_request* r) { delete r; }

ksr_status ksr_classify(const ksr_classify_request* r, ksr_verdict** out) {
  if (!r || !out) return fail(KSR_ERR_NULL_ARG, "request and out must be non-null");
  *out = nullptr;
  return guarded([&] { *out = new ksr_verdict{ksr::cmd_classify(r->r)}; });
}

int ksr_verdict_bounded(const ksr_verdict* v) { return v && v->r.verdict.bounded ? 1 : 0; }
int ksr_verdict_has_witness(const ksr_verdict* v) {
  return v && v->r.verdict.witness ? 1 : 0;
}
double ksr_verdict_eps1(const ksr_verdict* v) {
  return v && v->r.verdict.witness ? v->r.verdict.witness->eps1 : NAN;
}
double ksr_verdict_eps2(const ksr_verdict* v) {
  return v && v->r.verdict.witness ? v->r.verdict.witness->eps2 : NAN;
}
double ksr_verdict_trace_constant(const ksr_verdict* v) { return v ? v->r.trace.value : NAN; }
int ksr_verdict_trace_estimated(const ksr_verdict* v) {
  return v && v->r.trace.kind == ksr::TraceConstantKind::EstimatedLowerBound ? 1 : 0;
}
const char* ksr_verdict_text(const ksr_verdict* v) { return v ? v->r.text.c_str() : ""; }
void ksr_verdict_free(ksr_verdict* v) { delete v; }

} // extern "C"
