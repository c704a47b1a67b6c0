#ifndef CASCADENET_H
#define CASCADENET_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CnRefPrice {
  CN_REF_PRICE_MEAN = 0,
  CN_REF_PRICE_FIRST = 1,
  CN_REF_PRICE_LAST = 2,
} CnRefPrice;

typedef enum CnScenario {
  // One random asset per run; `targets` is ignored.
  CN_SCENARIO_GENERAL = 0,
  // Every asset every run; `targets` is ignored.
  CN_SCENARIO_GENERAL_SHOCK_ALL = 1,
  // The listed targets, shocked together every run.
  CN_SCENARIO_TARGETS = 2,
} CnScenario;

typedef enum CnStatus {
  CN_STATUS_OK = 0,
  CN_STATUS_NULL_POINTER = 1,
  CN_STATUS_INVALID_ARGUMENT = 2,
  CN_STATUS_DATA_ERROR = 3,
  CN_STATUS_IO_ERROR = 4,
  CN_STATUS_PANIC = 5,
} CnStatus;

// Thresholded exposure network.
typedef struct CnNetwork CnNetwork;

// Cleaned, aligned prices and their log returns.
typedef struct CnPanel CnPanel;

// Capital-model parameters. Obtain defaults from [`cn_capital_config_default`].
typedef struct CnCapitalConfig {
  double capital_ratio;
  double min_capital_ratio;
  double shock_low;
  double shock_high;
  size_t systemic_failure_count;
} CnCapitalConfig;

typedef struct CnSimulationSummary {
  double failure_probability;
  double avg_failed_assets;
} CnSimulationSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *cn_last_error(void);

struct CnCapitalConfig cn_capital_config_default(void);

// Loads a wide price CSV, cleans each series with the given IQR multiplier
// and aligns the assets on their common dates.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CnStatus cn_panel_load_csv(const char *path, double iqr_multiplier, struct CnPanel **out);

// # Safety
// `panel` must come from [`cn_panel_load_csv`] or be null.
void cn_panel_free(struct CnPanel *panel);

// # Safety
// `panel` must be a live handle or null (which yields 0).
size_t cn_panel_n_assets(const struct CnPanel *panel);

// Number of log returns per asset.
//
// # Safety
// `panel` must be a live handle or null (which yields 0).
size_t cn_panel_n_returns(const struct CnPanel *panel);

// Ticker of asset `index`, owned by the panel; null when out of range.
//
// # Safety
// `panel` must be a live handle or null.
const char *cn_panel_asset_id(const struct CnPanel *panel, size_t index);

// Copies the log returns of asset `index` into `out` (length `len`, which
// must equal [`cn_panel_n_returns`]).
//
// # Safety
// `panel` must be a live handle and `out` valid for `len` writes.
enum CnStatus cn_panel_returns(const struct CnPanel *panel, size_t index, double *out, size_t len);

// Builds the exposure network of `panel` kept at threshold `theta`.
//
// # Safety
// `panel` must be a live handle and `out` a valid pointer.
enum CnStatus cn_network_build(const struct CnPanel *panel,
                               double theta,
                               enum CnRefPrice ref_price,
                               struct CnNetwork **out);

// # Safety
// `net` must come from [`cn_network_build`] or be null.
void cn_network_free(struct CnNetwork *net);

// # Safety
// `net` must be a live handle or null (which yields 0).
size_t cn_network_n_assets(const struct CnNetwork *net);

// Number of directed edges.
//
// # Safety
// `net` must be a live handle or null (which yields 0).
size_t cn_network_edge_count(const struct CnNetwork *net);

// Row-major copy of the `n x n` weight matrix.
//
// # Safety
// `net` must be a live handle and `out` valid for `len` writes.
enum CnStatus cn_network_weights(const struct CnNetwork *net, double *out, size_t len);

// Local clustering coefficient of every asset.
//
// # Safety
// `net` must be a live handle and `out` valid for `len` writes.
enum CnStatus cn_network_clustering(const struct CnNetwork *net, double *out, size_t len);

// Seeded Monte Carlo over the capital/loss cascade. `per_run_failed` may be
// null; otherwise it receives `n_runs` failure counts.
//
// # Safety
// `net` must be a live handle, `targets` valid for `n_targets` reads,
// `summary` a valid pointer and `per_run_failed` null or valid for `n_runs`
// writes.
enum CnStatus cn_monte_carlo(const struct CnNetwork *net,
                             struct CnCapitalConfig config,
                             enum CnScenario scenario,
                             const size_t *targets,
                             size_t n_targets,
                             size_t n_runs,
                             uint64_t seed,
                             struct CnSimulationSummary *summary,
                             size_t *per_run_failed);

// One capital/loss cascade on a caller-supplied network.
//
// `weights` is the row-major `n x n` exposure matrix (entry `i*n + j` is
// what `j` loses through `i`). `target` is shocked by `shock * prices[target]`.
// On success `defaulted[i]` is 1 for every failed asset.
//
// # Safety
// `weights` must be valid for `n*n` reads, `prices` for `n` reads,
// `defaulted` for `n` writes and `iterations` a valid pointer.
enum CnStatus cn_cascade_run(size_t n,
                             const double *weights,
                             const double *prices,
                             struct CnCapitalConfig config,
                             size_t target,
                             double shock,
                             uint8_t *defaulted,
                             size_t *iterations);

// Historical VaR of `returns` at confidence `alpha_level`.
//
// # Safety
// `returns` must be valid for `len` reads and `out` a valid pointer.
enum CnStatus cn_var(const double *returns, size_t len, double alpha_level, double *out);

// Mean of the returns at or below the VaR.
//
// # Safety
// `returns` must be valid for `len` reads and `out` a valid pointer.
enum CnStatus cn_cvar(const double *returns, size_t len, double alpha_level, double *out);

// Hill tail index from the `k` largest of the positive `losses`.
//
// # Safety
// `losses` must be valid for `len` reads and `out` a valid pointer.
enum CnStatus cn_hill_estimate(const double *losses, size_t len, size_t k, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CASCADENET_H */
