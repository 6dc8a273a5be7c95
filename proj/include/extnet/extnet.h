/* extnet — C interface to the extremal-dependence network library.
 *
 * Conventions:
 *   - Every function returns an extnet_status; EXTNET_OK (0) means success.
 *     On failure, extnet_last_error() returns a thread-local message
 *     describing what went wrong (valid until the next failing call on the
 *     same thread).
 *   - Objects are opaque handles created through *_create/*_compute style
 *     functions with an out-parameter, and released with the matching
 *     *_free. Freeing NULL is a no-op. Handles are independent: inputs can
 *     be freed as soon as the call that consumed them returns.
 *   - Matrix buffers are row-major doubles supplied by the caller, sized as
 *     documented; NaN encodes a missing value on both input and output.
 *   - `threads` <= 0 means "use all hardware threads".
 */
#ifndef EXTNET_H
#define EXTNET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int extnet_status;

enum {
  EXTNET_OK = 0,
  EXTNET_ERR_INVALID_ARGUMENT = 1,
  EXTNET_ERR_PARSE = 2,
  EXTNET_ERR_NUMERIC = 3,
  EXTNET_ERR_IO = 4,
  EXTNET_ERR_UNESTIMABLE = 5,
  EXTNET_ERR_NONCONVERGENCE = 6,
  EXTNET_ERR_INTERNAL = 7,
  EXTNET_ERR_NULL_ARGUMENT = 8
};

/* Human-readable message for the most recent failure on this thread. */
const char* extnet_last_error(void);

/* Library version string, e.g. "0.1.0". */
const char* extnet_version(void);

/* ---------- stations ---------- */

typedef struct extnet_stations extnet_stations;

/* `count` stations placed uniformly at random on the unit square (planar
 * coordinates), ids "S001", "S002", ... Deterministic in `seed`. */
extnet_status extnet_stations_uniform(size_t count, uint64_t seed, extnet_stations** out);

/* Explicit station set. `geographic` nonzero means x = longitude and
 * y = latitude in degrees (distances in km); zero means planar coordinates
 * (unitless Euclidean distances). Ids must be unique, count >= 2. */
extnet_status extnet_stations_create(const char* const* ids, const double* x, const double* y,
                                     size_t count, int geographic, extnet_stations** out);

/* The stations with the given ids, in the given order. */
extnet_status extnet_stations_subset(const extnet_stations* stations, const char* const* ids,
                                     size_t count, extnet_stations** out);

extnet_status extnet_stations_count(const extnet_stations* stations, size_t* out);
extnet_status extnet_stations_is_geographic(const extnet_stations* stations, int* out);

/* Id pointer stays valid until the handle is freed. Any out-param may be
 * NULL if not wanted. */
extnet_status extnet_stations_get(const extnet_stations* stations, size_t index, const char** id,
                                  double* x, double* y);

/* Pairwise distances into a count*count row-major buffer. */
extnet_status extnet_stations_distances(const extnet_stations* stations, double* out);

void extnet_stations_free(extnet_stations* stations);

/* ---------- block-maximum panels ---------- */

typedef struct extnet_maxima extnet_maxima;

/* `values` is blocks*stations row-major. `valid` (same layout) marks usable
 * cells; NULL means all valid. Every station needs >= 2 valid cells, and
 * valid cells must be finite. `labels` (length blocks; NULL = 1..blocks)
 * names the blocks, e.g. years. `ids` (length stations; NULL = "S1",
 * "S2", ...) names the stations. */
extnet_status extnet_maxima_create(size_t blocks, size_t stations, const double* values,
                                   const unsigned char* valid, const long long* labels,
                                   const char* const* ids, extnet_maxima** out);

extnet_status extnet_maxima_dims(const extnet_maxima* maxima, size_t* blocks, size_t* stations);

/* blocks*stations buffer; invalid cells come back as NaN. */
extnet_status extnet_maxima_values(const extnet_maxima* maxima, double* out);

/* length-blocks buffer. */
extnet_status extnet_maxima_labels(const extnet_maxima* maxima, long long* out);

extnet_status extnet_maxima_station_id(const extnet_maxima* maxima, size_t index,
                                       const char** out);

/* Rows [first, first+count) as a new panel (used to slice one long
 * simulation into Monte Carlo replicates). */
extnet_status extnet_maxima_slice(const extnet_maxima* maxima, size_t first, size_t count,
                                  extnet_maxima** out);

void extnet_maxima_free(extnet_maxima* maxima);

/* ---------- Brown-Resnick simulator ---------- */

/* Closed-form pairwise upper-tail dependence at distance h >= 0 for range
 * rho > 0 and smoothness kappa in (0,2]: 2 - 2*Phi(sqrt(h^kappa/(2 rho))). */
extnet_status extnet_br_true_chi(double h, double rho, double kappa, double* out);

/* `blocks` independent replicates at the given planar stations on the unit
 * Frechet scale; deterministic in `seed` and independent of `threads`.
 * `approximate` nonzero switches from the exact extremal-functions
 * construction to the max of `approx_points` spectral points (cheaper,
 * biased low; `approx_points` is ignored otherwise). */
extnet_status extnet_br_simulate(const extnet_stations* stations, double rho, double kappa,
                                 uint64_t seed, size_t blocks, int approximate,
                                 size_t approx_points, int threads, extnet_maxima** out);

/* d*d matrix of closed-form chi values at the pairwise distances. */
extnet_status extnet_true_chi_matrix(const extnet_stations* stations, double rho, double kappa,
                                     double* out);

/* ---------- ranks and pairwise chi ---------- */

typedef struct extnet_ranks extnet_ranks;
typedef struct extnet_chi extnet_chi;

/* Per-station empirical-CDF ranks with average ranks at ties.
 * `over_m_plus_1` nonzero divides by m+1 (every rank < 1, the convention for
 * threshold exceedance networks); zero divides by m. */
extnet_status extnet_ranks_compute(const extnet_maxima* maxima, int over_m_plus_1,
                                   extnet_ranks** out);
extnet_status extnet_ranks_dims(const extnet_ranks* ranks, size_t* blocks, size_t* stations);
/* blocks*stations buffer; invalid cells come back as NaN. */
extnet_status extnet_ranks_values(const extnet_ranks* ranks, double* out);
void extnet_ranks_free(extnet_ranks* ranks);

/* Pairwise chi for every station pair via the F-madogram. `rerank_common`
 * nonzero (the default choice) recomputes ranks on each pair's common valid
 * blocks when data are missing. Pairs with fewer than 2 shared blocks are
 * missing (NaN). */
extnet_status extnet_chi_estimate(const extnet_ranks* ranks, int rerank_common, int threads,
                                  extnet_chi** out);
extnet_status extnet_chi_dims(const extnet_chi* chi, size_t* d);
/* d*d buffer of chi estimates; NaN marks missing pairs; diagonal is 1. */
extnet_status extnet_chi_values(const extnet_chi* chi, double* out);
/* d*d buffer of common-block counts behind each estimate. */
extnet_status extnet_chi_common_counts(const extnet_chi* chi, long long* out);
void extnet_chi_free(extnet_chi* chi);

/* Empirical conditional exceedance curve for one pair: at each threshold u
 * in (0,1), P(rank_j > u | rank_i > u) computed on the pair's common blocks.
 * Thresholds with no conditioning exceedances come back NaN. */
extnet_status extnet_chi_u_curve(const extnet_ranks* ranks, size_t i, size_t j, const double* u,
                                 size_t count, int rerank_common, double* out);

/* ---------- bootstrap ---------- */

typedef struct extnet_boot extnet_boot;

/* Temporal block bootstrap: per-pair standard deviation of the chi estimate
 * across `replicates` resamples of whole block rows. Deterministic in `seed`
 * and independent of `threads`. */
extnet_status extnet_bootstrap_sd(const extnet_maxima* maxima, int over_m_plus_1,
                                  int rerank_common, size_t replicates, uint64_t seed,
                                  int threads, extnet_boot** out);
extnet_status extnet_boot_dims(const extnet_boot* boot, size_t* d);
/* d*d buffer of standard deviations; NaN marks pairs missing in too many
 * replicates; diagonal is 0. */
extnet_status extnet_boot_values(const extnet_boot* boot, double* out);
void extnet_boot_free(extnet_boot* boot);

/* ---------- distance bins, decay curve, tau^2 ---------- */

typedef struct extnet_bins extnet_bins;
typedef struct extnet_curve extnet_curve;
typedef struct extnet_tau2 extnet_tau2;

/* Group estimable pairs into `bins` distance bins over (0, max h]:
 * equal-width by default, `equal_count` nonzero uses distance quantiles.
 * Empty bins are dropped. */
extnet_status extnet_bin_chi(const extnet_chi* chi, const extnet_stations* stations, size_t bins,
                             int equal_count, extnet_bins** out);
extnet_status extnet_bins_count(const extnet_bins* bins, size_t* out);
/* Any out-param may be NULL. */
extnet_status extnet_bins_get(const extnet_bins* bins, size_t index, double* h_mean,
                              double* chi_mean, double* chi_var, size_t* count, double* lo,
                              double* hi);
void extnet_bins_free(extnet_bins* bins);

/* Cubic smoothing spline through the bin summaries. `weighted` nonzero
 * weights bins by pair count. `lambda` < 0 selects the penalty by
 * generalized cross-validation; +infinity gives the weighted least-squares
 * line. Needs >= 4 bins. */
extnet_status extnet_fit_curve(const extnet_bins* bins, int weighted, double lambda,
                               extnet_curve** out);
extnet_status extnet_curve_eval(const extnet_curve* curve, const double* h, size_t count,
                                double* out);
/* Chosen penalty and effective degrees of freedom; either may be NULL. */
extnet_status extnet_curve_info(const extnet_curve* curve, double* lambda, double* edf);
void extnet_curve_free(extnet_curve* curve);

/* Parametric variance function tau^2(h) = a / (1 + exp(-b (h - c))). */
extnet_status extnet_tau2_logistic(double a, double b, double c, extnet_tau2** out);

/* Data-driven variance function: per bin max(0, var(chi) - mean bootstrap
 * variance), spline-smoothed and clamped at 0. */
extnet_status extnet_tau2_estimated(const extnet_bins* bins, const extnet_boot* boot,
                                    const extnet_stations* stations, int weighted, double lambda,
                                    extnet_tau2** out);
extnet_status extnet_tau2_eval(const extnet_tau2* tau2, const double* h, size_t count,
                               double* out);
/* "parametric-logistic" or "estimated"; pointer is static. */
extnet_status extnet_tau2_mode(const extnet_tau2* tau2, const char** out);
void extnet_tau2_free(extnet_tau2* tau2);

/* ---------- empirical-Bayes correction ---------- */

typedef struct extnet_shrunk extnet_shrunk;

/* chi_tilde = lambda*chi_hat + (1-lambda)*curve(h) with
 * lambda = tau2(h) / (tau2(h) + sd^2). Pairs missing a chi estimate or a
 * bootstrap sd stay missing. */
extnet_status extnet_shrink(const extnet_chi* chi, const extnet_curve* curve,
                            const extnet_tau2* tau2, const extnet_boot* boot,
                            const extnet_stations* stations, extnet_shrunk** out);
extnet_status extnet_shrunk_dims(const extnet_shrunk* shrunk, size_t* d);
/* d*d buffers for the corrected estimates and/or the weights; either may be
 * NULL. NaN marks missing pairs. */
extnet_status extnet_shrunk_values(const extnet_shrunk* shrunk, double* chi_tilde,
                                   double* lambda);
void extnet_shrunk_free(extnet_shrunk* shrunk);

/* ---------- networks ---------- */

typedef struct extnet_network extnet_network;

enum {
  EXTNET_TAG_EMPIRICAL = 0,
  EXTNET_TAG_CORRECTED = 1,
  EXTNET_TAG_TRUTH = 2
};

/* Edges are exactly the pairs with chi[i*d+j] > chi_min (strict); NaN cells
 * never connect. `chi` is any d*d symmetric estimate buffer. */
extnet_status extnet_network_threshold(const double* chi, size_t d,
                                       const extnet_stations* stations, double chi_min, int tag,
                                       extnet_network** out);

/* Ground-truth network: pairs whose closed-form chi exceeds chi_min. */
extnet_status extnet_network_true(const extnet_stations* stations, double rho, double kappa,
                                  double chi_min, extnet_network** out);

extnet_status extnet_network_node_count(const extnet_network* network, size_t* out);
extnet_status extnet_network_edge_count(const extnet_network* network, size_t* out);
/* Arrays of length edge_count; any may be NULL. */
extnet_status extnet_network_edges(const extnet_network* network, size_t* i, size_t* j,
                                   double* weight, double* distance);
/* Per-node degrees, length node_count. */
extnet_status extnet_network_degrees(const extnet_network* network, size_t* out);

/* True-positive rate and positive predictive value of `estimated` against
 * `truth`. A rate whose denominator is empty is reported NaN with its
 * defined-flag 0. Any out-param may be NULL. */
extnet_status extnet_network_compare(const extnet_network* estimated,
                                     const extnet_network* truth, double* tpr, double* ppv,
                                     int* tpr_defined, int* ppv_defined, size_t* true_edges,
                                     size_t* estimated_edges, size_t* overlap);
void extnet_network_free(extnet_network* network);

/* ---------- annual networks and long-distance series ---------- */

typedef struct extnet_annual extnet_annual;
typedef struct extnet_longdist extnet_longdist;

/* Per-block co-exceedance networks: i connects j in block t when both ranks
 * exceed u_star in (0,1). */
extnet_status extnet_annual_networks(const extnet_ranks* ranks, double u_star,
                                     extnet_annual** out);
extnet_status extnet_annual_block_count(const extnet_annual* annual, size_t* out);
extnet_status extnet_annual_label(const extnet_annual* annual, size_t block, long long* out);
extnet_status extnet_annual_edge_count(const extnet_annual* annual, size_t block, size_t* out);
/* Arrays of length edge_count for that block; either may be NULL. */
extnet_status extnet_annual_edges(const extnet_annual* annual, size_t block, size_t* i,
                                  size_t* j);
void extnet_annual_free(extnet_annual* annual);

/* Per block: the count of edges longer than min_distance and log(count /
 * eligible-pair total). `per_block_eligible` nonzero (default-style) counts
 * eligible pairs over the stations with data in that block; zero uses all
 * stations. `continuity` nonzero uses log((count+0.5)/eligible) so
 * zero-count blocks stay defined. */
extnet_status extnet_long_distance(const extnet_annual* annual, const extnet_stations* stations,
                                   double min_distance, int per_block_eligible, int continuity,
                                   extnet_longdist** out);
extnet_status extnet_longdist_count(const extnet_longdist* series, size_t* out);
/* log_ratio is NaN when undefined. Any out-param may be NULL. */
extnet_status extnet_longdist_get(const extnet_longdist* series, size_t index, long long* label,
                                  size_t* n_long, size_t* eligible, double* log_ratio);
void extnet_longdist_free(extnet_longdist* series);

/* ---------- regressions ---------- */

enum {
  EXTNET_FAMILY_GAUSSIAN_IDENTITY = 0,
  EXTNET_FAMILY_POISSON_LOG = 1
};

typedef struct {
  int family;
  int has_slope;
  double intercept;
  double slope;
  double se_intercept;
  double se_slope;
  double stat_intercept; /* t (OLS) or z (GLM) */
  double stat_slope;
  double p_intercept;
  double p_slope;
  size_t n;
  int iterations;
} extnet_fit;

/* Simple linear regression with classical t(n-2) inference. Needs n >= 3 and
 * a non-constant covariate. */
extnet_status extnet_ols_fit(const double* x, const double* y, size_t n, extnet_fit* out);

/* Poisson log-linear fit by IRLS with Wald inference. `x` NULL fits an
 * intercept-only model. `log_exposure` (length n) is an optional additive
 * offset on the log scale. Counts must be nonnegative integers, not all
 * zero. */
extnet_status extnet_poisson_fit(const double* x, const double* counts, size_t n,
                                 const double* log_exposure, extnet_fit* out);

/* ---------- daily-precipitation and SST ingestion ---------- */

typedef struct extnet_daily extnet_daily;
typedef struct extnet_sst extnet_sst;

/* Read a daily table: `dly_format` zero parses the canonical CSV
 * (header `station,date,prcp`), nonzero parses GHCN-Daily fixed-width lines
 * (PRCP element, tenths of mm -> mm, quality-flagged or -9999 values
 * missing). Malformed rows are collected, not fatal. */
extnet_status extnet_daily_read(const char* path, int dly_format, extnet_daily** out);
extnet_status extnet_daily_record_count(const extnet_daily* daily, size_t* out);
extnet_status extnet_daily_reject_count(const extnet_daily* daily, size_t* out);
/* Pointers stay valid until the handle is freed. Any out-param may be NULL. */
extnet_status extnet_daily_reject_get(const extnet_daily* daily, size_t index, size_t* line,
                                      const char** content, const char** reason);

/* Keep stations whose non-missing-day fraction reaches min_fraction over the
 * coverage period: the full year range, or (record_span_basis nonzero) the
 * range intersected with the station's own record span. */
extnet_status extnet_daily_filter(const extnet_daily* daily, double min_fraction, int year_first,
                                  int year_last, int record_span_basis, extnet_daily** out);

/* Serialize in the canonical CSV schema. */
extnet_status extnet_daily_write(const extnet_daily* daily, const char* path);

/* Station-by-year maxima over the month window (months are 1..12), blocks
 * labeled by year; a block is valid when the station covered at least
 * `completeness` of the window's days. Stations with < 2 valid blocks are
 * dropped; fewer than 2 survivors is an error. */
extnet_status extnet_seasonal_maxima(const extnet_daily* daily, const int* months,
                                     size_t month_count, int year_first, int year_last,
                                     double completeness, extnet_maxima** out);
void extnet_daily_free(extnet_daily* daily);

/* Area-averaged sea-surface-temperature covariate from a grid CSV (header
 * `lon,lat,year,month,sst`): cosine-latitude-weighted mean over the box per
 * month, then the mean over the 12-month window starting in
 * `window_start_month` of the previous year (7 = July..June, 1 = the
 * calendar year itself), labeled by the window's final year. Years with an
 * incomplete window are dropped. */
extnet_status extnet_sst_read(const char* path, double lon_min, double lon_max, double lat_min,
                              double lat_max, int year_first, int year_last,
                              int window_start_month, extnet_sst** out);
extnet_status extnet_sst_count(const extnet_sst* sst, size_t* out);
extnet_status extnet_sst_get(const extnet_sst* sst, size_t index, long long* year,
                             double* value);
extnet_status extnet_sst_reject_count(const extnet_sst* sst, size_t* out);
extnet_status extnet_sst_reject_get(const extnet_sst* sst, size_t index, size_t* line,
                                    const char** content, const char** reason);
void extnet_sst_free(extnet_sst* sst);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EXTNET_H */
