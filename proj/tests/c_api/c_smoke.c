/* Compiles the public header as C and drives the classifier through it. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ksrobin/ksrobin.h"

static int fails = 0;

static void check(int ok, const char* what) {
  if (!ok) {
    fprintf(stderr, "FAIL: %s (%s)\n", what, ksr_last_error());
    ++fails;
  }
}

int main(void) {
  ksr_classify_request* r = ksr_classify_request_new();
  ksr_verdict* v = NULL;
  ksr_manifest* m = NULL;

  check(strlen(ksr_version()) > 0, "version");
  check(ksr_classify(r, &v) == KSR_ERR_VALIDATION, "missing parameters rejected");
  check(strstr(ksr_last_error(), "--chi") != NULL, "missing names listed");
  check(ksr_classify_request_set(r, "nonsense", 1.0) == KSR_ERR_VALIDATION, "unknown field");

  ksr_classify_request_set(r, "tau", 0);
  ksr_classify_request_set(r, "chi", 1);
  ksr_classify_request_set(r, "h", 1);
  ksr_classify_request_set(r, "alpha", 1);
  ksr_classify_request_set(r, "b", 1);
  ksr_classify_request_set(r, "c", 1);
  ksr_classify_request_set(r, "trace_c", 1);
  check(ksr_classify(r, &v) == KSR_OK, "classify");
  check(ksr_verdict_bounded(v) == 1, "bounded");
  check(ksr_verdict_has_witness(v) == 1, "witness");
  check(fabs(ksr_verdict_eps1(v) - 2.0) < 1e-12, "eps1");
  check(fabs(ksr_verdict_eps2(v) - 0.6875) < 1e-12, "eps2");
  check(ksr_verdict_trace_estimated(v) == 0, "trace supplied");
  ksr_verdict_free(v);
  ksr_classify_request_free(r);

  check(ksr_run("/nonexistent/x.cfg", NULL, &m) == KSR_ERR_RUNTIME, "unreadable config");
  check(ksr_exit_code(KSR_ERR_RUNTIME) == 2, "runtime exit code");
  check(ksr_exit_code(KSR_ERR_VALIDATION) == 1, "validation exit code");
  check(ksr_run(NULL, NULL, &m) == KSR_ERR_NULL_ARG, "null argument");

  if (fails == 0) puts("c api smoke: ok");
  return fails == 0 ? 0 : 1;
}
