/* C interface of the decomposition toolkit.
 *
 * All functions return a status code:
 *   0  KID_OK                  success
 *   1  KID_ERR_INPUT           malformed input, schema violation, misuse
 *   2  KID_ERR_NUMERIC         rank ambiguity, retries exhausted, solver failure
 *   3  KID_ERR_VERIFY          a verification contract did not hold
 *
 * Payloads cross the boundary as JSON strings. Strings returned through
 * char** out-parameters are owned by the caller and must be released with
 * kid_string_free. On failure the out-parameters are left untouched and a
 * message is available from kid_last_error until the next call on the same
 * context. Contexts are not thread-safe; use one per thread.
 */

#ifndef KIDECOMP_KIDECOMP_H
#define KIDECOMP_KIDECOMP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  KID_OK = 0,
  KID_ERR_INPUT = 1,
  KID_ERR_NUMERIC = 2,
  KID_ERR_VERIFY = 3
};

typedef struct kid_ctx kid_ctx;

kid_ctx* kid_ctx_new(void);
void kid_ctx_free(kid_ctx* ctx);

const char* kid_version(void);

/* Message describing the last failure on this context ("" when none). */
const char* kid_last_error(const kid_ctx* ctx);

int kid_ctx_set_tolerance(kid_ctx* ctx, double rank_cut, double residual,
                          double cluster_gap);
void kid_ctx_set_seed(kid_ctx* ctx, uint64_t seed);

void kid_string_free(char* s);

/* Block decomposition of an experiment. Emits the decomposition document and
 * a verification report; returns KID_ERR_VERIFY when the report fails. */
int kid_decompose(kid_ctx* ctx, const char* experiment_json,
                  char** decomposition_json, char** report_json);

/* Distributions of the experiment over its block indices. */
int kid_classical_part(kid_ctx* ctx, const char* experiment_json,
                       char** classical_json);

/* Broadcastability verdict; includes a verified witness channel and its
 * marginal residual when the verdict is positive. */
int kid_broadcast_check(kid_ctx* ctx, const char* experiment_json,
                        char** verdict_json);

/* Decomposes two experiments and their product and matches product blocks
 * against index pairs. */
int kid_tensor_check(kid_ctx* ctx, const char* left_json, const char* right_json,
                     char** report_json);

/* blocks_spec is a JSON array of [n, m] pairs, e.g. "[[2,1],[1,2]]". */
int kid_gen_planted(kid_ctx* ctx, const char* blocks_spec, int num_labels,
                    char** experiment_json, char** ground_truth_json);

/* Runs the seeded property ensembles. suite may be NULL (all suites) or a
 * name prefix; sizes may be NULL or "planted=100,condexp=50,pairs=50,
 * invariance=25" (any subset). inject_bug corrupts the conditional
 * expectation on purpose so a red run of the harness can be demonstrated.
 * Returns KID_ERR_VERIFY when any property fails. */
int kid_verify(kid_ctx* ctx, const char* suite, const char* sizes, int inject_bug,
               char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* KIDECOMP_KIDECOMP_H */
