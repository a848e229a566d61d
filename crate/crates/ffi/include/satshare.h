#ifndef SATSHARE_H
#define SATSHARE_H

#include <stdbool.h>
#include <stdint.h>

typedef enum SatshareBinding {
  SATSHARE_BINDING_INTERIOR = 0,
  SATSHARE_BINDING_QOS_FLOOR = 1,
  SATSHARE_BINDING_INCUMBENT_CAP = 2,
  SATSHARE_BINDING_INFEASIBLE = 3,
} SatshareBinding;

typedef enum SatshareStatus {
  SATSHARE_STATUS_OK = 0,
  SATSHARE_STATUS_NULL_POINTER = 1,
  SATSHARE_STATUS_INVALID_UTF8 = 2,
  SATSHARE_STATUS_CONFIG = 3,
  SATSHARE_STATUS_SIMULATION = 4,
  SATSHARE_STATUS_DOMAIN = 5,
  SATSHARE_STATUS_INVALID_CHAIN = 6,
  SATSHARE_STATUS_PANIC = 7,
} SatshareStatus;

/**
 * Result of a scenario run.
 */
typedef struct SatshareReport SatshareReport;

/**
 * Parsed and validated scenario.
 */
typedef struct SatshareScenario SatshareScenario;

typedef struct SatsharePricing {
  double pi_star;
  double u_s_star;
  double expected_payment;
} SatsharePricing;

typedef struct SatshareBestResponse {
  double p_c_star;
  bool feasible;
  enum SatshareBinding binding;
} SatshareBestResponse;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *satshare_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void satshare_string_free(char *s);

/**
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum SatshareStatus satshare_scenario_from_toml(const char *toml, struct SatshareScenario **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SatshareStatus satshare_scenario_from_json(const char *json, struct SatshareScenario **out);

/**
 * # Safety
 * `scenario` must be NULL or a handle from this library, freed once.
 */
void satshare_scenario_free(struct SatshareScenario *scenario);

/**
 * # Safety
 * `scenario` must be a live handle.
 */
enum SatshareStatus satshare_scenario_set_seed(struct SatshareScenario *scenario, uint64_t seed);

/**
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum SatshareStatus satshare_run_scenario(const struct SatshareScenario *scenario,
                                          struct SatshareReport **out);

/**
 * # Safety
 * `report` must be NULL or a handle from this library, freed once.
 */
void satshare_report_free(struct SatshareReport *report);

/**
 * # Safety
 * `handle` must be a live report; `out` must be writable.
 */
enum SatshareStatus satshare_report_chain_height(const struct SatshareReport *handle,
                                                 uint64_t *out);

/**
 * Hex trace hash. Free the string with `satshare_string_free`.
 *
 * # Safety
 * `handle` must be a live report; `out` must be writable.
 */
enum SatshareStatus satshare_report_trace_hash(const struct SatshareReport *handle, char **out);

/**
 * Hex digest of the committed chain.
 *
 * # Safety
 * `handle` must be a live report; `out` must be writable.
 */
enum SatshareStatus satshare_report_chain_digest(const struct SatshareReport *handle, char **out);

/**
 * Full report as JSON.
 *
 * # Safety
 * `handle` must be a live report; `out` must be writable.
 */
enum SatshareStatus satshare_report_json(const struct SatshareReport *handle, char **out);

/**
 * Tab-separated chain dump accepted by `satshare_audit_chain_dump`.
 *
 * # Safety
 * `handle` must be a live report; `out` must be writable.
 */
enum SatshareStatus satshare_report_chain_dump(const struct SatshareReport *handle, char **out);

/**
 * Line-delimited message trace.
 *
 * # Safety
 * `handle` must be a live report; `out` must be writable.
 */
enum SatshareStatus satshare_report_trace(const struct SatshareReport *handle, char **out);

/**
 * Per-epoch summary as CSV with the given ASCII delimiter.
 *
 * # Safety
 * `handle` must be a live report; `out` must be writable.
 */
enum SatshareStatus satshare_report_epochs_csv(const struct SatshareReport *handle,
                                               char delim,
                                               char **out);

/**
 * Reputation table as CSV with the given ASCII delimiter.
 *
 * # Safety
 * `handle` must be a live report; `out` must be writable.
 */
enum SatshareStatus satshare_report_reputation_csv(const struct SatshareReport *handle,
                                                   char delim,
                                                   char **out);

/**
 * Profit-maximising price for the scenario's market.
 *
 * # Safety
 * `handle` must be a live scenario; `out` must be writable.
 */
enum SatshareStatus satshare_optimal_price(const struct SatshareScenario *handle,
                                           struct SatsharePricing *out);

/**
 * Satellite profit at price `pi`.
 *
 * # Safety
 * `handle` must be a live scenario; `out` must be writable.
 */
enum SatshareStatus satshare_satellite_utility(const struct SatshareScenario *handle,
                                               double pi,
                                               double *out);

/**
 * Entrant best response at price `pi` and preference `theta`.
 *
 * # Safety
 * `handle` must be a live scenario; `out` must be writable.
 */
enum SatshareStatus satshare_best_response(const struct SatshareScenario *handle,
                                           double pi,
                                           double theta,
                                           struct SatshareBestResponse *out);

/**
 * Deviation angle in radians between a user and its cell centre line.
 *
 * # Safety
 * `out` must be writable.
 */
enum SatshareStatus satshare_deviation_angle(double cell_to_sat_km,
                                             double user_to_sat_km,
                                             double user_to_center_km,
                                             double earth_radius_km,
                                             double *out);

/**
 * Audits a chain dump. `scenario` may be NULL for a structure-only check.
 * `invalid_height` receives -1 for a valid chain, -2 for a dump that does
 * not parse, else the first invalid height. Anything but a valid chain
 * returns `InvalidChain`.
 *
 * # Safety
 * `dump` must be a NUL-terminated string, `scenario` NULL or a live
 * handle, `invalid_height` writable.
 */
enum SatshareStatus satshare_audit_chain_dump(const char *dump,
                                              const struct SatshareScenario *scenario,
                                              int64_t *invalid_height);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SATSHARE_H */
