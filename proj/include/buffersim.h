/* buffersim: RTT-slotted congestion-control simulator and buffer-sizing
 * bound library. C interface over the C++ core; every entry point returns a
 * bsim_status, with a thread-local message available via bsim_last_error().
 * Strings returned through char** are owned by the caller and must be
 * released with bsim_string_free(). */

#ifndef BUFFERSIM_H
#define BUFFERSIM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bsim_status {
    BSIM_OK = 0,
    BSIM_ERR_CONFIG = 2,  /* schema violation; message names the field */
    BSIM_ERR_VERIFY = 3,  /* verification ran and failed */
    BSIM_ERR_RUNTIME = 4, /* anything else */
    BSIM_ERR_DOMAIN = 5,  /* input outside a formula's stated domain */
} bsim_status;

const char* bsim_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* bsim_last_error(void);

void bsim_string_free(char* s);

/* ---- closed-form bounds -------------------------------------------------
 * formula: "single", "sqrt_n", "util_floor", "bbr", "desync", "min_dec",
 * "bern_tail", "rand_loss", "thm2_floor".
 * inputs_json: flat object of numeric inputs (plus "algo"/"beta" for
 * "single"), e.g. {"delta_hi":2,"bdp":1000,"n":100}.
 * Output: one JSON object {"formula":...,"inputs":{...},"value":...}
 * ("bern_tail" and "thm2_floor" add the companion quantity). */
bsim_status bsim_bounds_eval(const char* formula, const char* inputs_json,
                             char** out_json);

/* ---- simulation ---------------------------------------------------------
 * config_json: the experiment configuration document (see README). */

typedef struct bsim_run bsim_run;

typedef struct bsim_slot {
    uint64_t slot;
    double aggregate_window;
    double queue;
    double utilization;
    int loss_event;
    uint64_t n_decreasing;
} bsim_slot;

bsim_status bsim_run_new(const char* config_json, bsim_run** out);
void bsim_run_free(bsim_run* run);

uint64_t bsim_run_slot_count(const bsim_run* run);
uint64_t bsim_run_flow_count(const bsim_run* run);
bsim_status bsim_run_slot(const bsim_run* run, uint64_t index, bsim_slot* out);
/* Per-flow window at a slot; fails unless the run recorded per-flow data. */
bsim_status bsim_run_window(const bsim_run* run, uint64_t slot, uint64_t flow,
                            double* out);

bsim_status bsim_run_csv(const bsim_run* run, char** out);
bsim_status bsim_run_summary_json(const bsim_run* run, char** out);
bsim_status bsim_run_timeseries_svg(const bsim_run* run, char** out);
bsim_status bsim_run_histogram_svg(const bsim_run* run, char** out);

/* ---- analysis -----------------------------------------------------------
 * Smallest buffer in [0, 2*bdp] whose min-utilization metric reaches target.
 * Result JSON: {"satisfiable":...,"buffer":...,"bracket_lo":...,
 * "bracket_hi":...,"monotone":...}. */
bsim_status bsim_search_min_buffer(const char* config_json, double target,
                                   double tolerance, char** out_json);

/* Sweep: one summary per value of the config's sweep parameter. jobs > 1
 * runs points in parallel; outputs are independent of scheduling. Returns
 * BSIM_ERR_RUNTIME if any point failed (partial results still in out_json). */
bsim_status bsim_sweep(const char* config_json, unsigned jobs, char** out_json);

/* Theorem verification. config_json may be NULL for the default suite
 * (Theorems 2-5, Lemma 6, decrease-condition scan). Returns BSIM_OK when
 * every check passes, BSIM_ERR_VERIFY otherwise; out_json carries the
 * per-check report either way. */
bsim_status bsim_verify(const char* config_json, uint64_t seed, char** out_json);

/* Monte Carlo bound check: check is "theorem5" or "lemma6"; params_json is a
 * flat object {"n":...,"bdp":...,"delta_lo":...,"delta_hi":...} plus "delta"
 * (theorem5) or optional "p" (lemma6). */
bsim_status bsim_monte_carlo(const char* check, const char* params_json,
                             uint64_t trials, uint64_t seed, char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BUFFERSIM_H */
