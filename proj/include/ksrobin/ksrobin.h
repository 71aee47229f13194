#ifndef KSROBIN_H
#define KSROBIN_H

/* C interface to the radial chemotaxis solver. All handles are opaque and
 * owned by the caller once returned; free them with the matching *_free.
 * Functions returning ksr_status leave a thread-local message retrievable
 * with ksr_last_error() on failure. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(KSROBIN_BUILD)
#    define KSR_API __declspec(dllexport)
#  else
#    define KSR_API __declspec(dllimport)
#  endif
#else
#  define KSR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ksr_status {
  KSR_OK = 0,
  KSR_ERR_VALIDATION = 1, /* bad input, configuration or parameters */
  KSR_ERR_RUNTIME = 2,    /* numerical or I/O failure */
  KSR_ERR_NULL_ARG = 3    /* a required pointer argument was NULL */
} ksr_status;

typedef struct ksr_manifest ksr_manifest;
typedef struct ksr_classify_request ksr_classify_request;
typedef struct ksr_verdict ksr_verdict;

KSR_API const char* ksr_version(void);

/* Message of the last failure on this thread ("" if none). */
KSR_API const char* ksr_last_error(void);

/* Map a status to the process exit code convention (0, 1 or 2). */
KSR_API int ksr_exit_code(ksr_status status);

/* out_dir may be NULL to use output.dir from the configuration. */
KSR_API ksr_status ksr_run(const char* config_path, const char* out_dir, ksr_manifest** out);
KSR_API ksr_status ksr_compare(const char* config_path, const char* out_dir, ksr_manifest** out);
KSR_API ksr_status ksr_sweep(const char* config_path, const char* out_dir, ksr_manifest** out);

KSR_API const char* ksr_manifest_run_id(const ksr_manifest* m);
KSR_API const char* ksr_manifest_status(const ksr_manifest* m);
KSR_API const char* ksr_manifest_summary(const ksr_manifest* m);
KSR_API const char* ksr_manifest_config_echo(const ksr_manifest* m);
KSR_API const char* ksr_manifest_file(const ksr_manifest* m);
KSR_API size_t ksr_manifest_path_count(const ksr_manifest* m);
/* NULL when index is out of range. */
KSR_API const char* ksr_manifest_path(const ksr_manifest* m, size_t index);
KSR_API void ksr_manifest_free(ksr_manifest* m);

KSR_API ksr_classify_request* ksr_classify_request_new(void);
/* Names: chi, h, alpha, tau, a, b, c, trace_c, n, radius, cells. */
KSR_API ksr_status ksr_classify_request_set(ksr_classify_request* r, const char* name,
                                            double value);
KSR_API void ksr_classify_request_free(ksr_classify_request* r);

KSR_API ksr_status ksr_classify(const ksr_classify_request* r, ksr_verdict** out);
KSR_API int ksr_verdict_bounded(const ksr_verdict* v);
KSR_API int ksr_verdict_has_witness(const ksr_verdict* v);
KSR_API double ksr_verdict_eps1(const ksr_verdict* v);
KSR_API double ksr_verdict_eps2(const ksr_verdict* v);
KSR_API double ksr_verdict_trace_constant(const ksr_verdict* v);
/* 1 when the trace constant was estimated numerically (a lower bound). */
KSR_API int ksr_verdict_trace_estimated(const ksr_verdict* v);
KSR_API const char* ksr_verdict_text(const ksr_verdict* v);
KSR_API void ksr_verdict_free(ksr_verdict* v);

#ifdef __cplusplus
}
#endif

#endif
