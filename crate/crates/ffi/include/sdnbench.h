#ifndef SDNBENCH_H
#define SDNBENCH_H

#include <stdbool.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum SdnStatus {
  SDN_STATUS_OK = 0,
  SDN_STATUS_NULL_ARGUMENT = 1,
  /**
   * Bad UTF-8, unknown key, out-of-range host and similar.
   */
  SDN_STATUS_INVALID_ARGUMENT = 2,
  SDN_STATUS_CONFIG = 3,
  SDN_STATUS_TOPOLOGY = 4,
  SDN_STATUS_SIMULATION = 5,
  SDN_STATUS_IO = 6,
  SDN_STATUS_PANIC = 99,
} SdnStatus;

typedef enum SdnTopologyFormat {
  /**
   * One line per node.
   */
  SDN_TOPOLOGY_FORMAT_DUMP = 0,
  /**
   * One line per link.
   */
  SDN_TOPOLOGY_FORMAT_LINKS = 1,
  /**
   * Graphviz.
   */
  SDN_TOPOLOGY_FORMAT_DOT = 2,
} SdnTopologyFormat;

/**
 * Outcome of a bandwidth run.
 */
typedef enum SdnRunStatus {
  SDN_RUN_STATUS_OK = 0,
  SDN_RUN_STATUS_NO_ROUTE = 1,
  SDN_RUN_STATUS_STORM = 2,
} SdnRunStatus;

/**
 * Experiment knobs, set by key like the CLI flags (`kind`, `hosts`, `k`, ...).
 */
typedef struct SdnOptions SdnOptions;

typedef struct SdnSimulation SdnSimulation;

typedef struct SdnTopology SdnTopology;

/**
 * Ping summary. Missing values are NaN.
 */
typedef struct SdnPingResult {
  double first_rtt_ms;
  double mean_rtt_ms;
  double max_rtt_ms;
  /**
   * Echoes after the first.
   */
  uint32_t sent;
  uint32_t lost;
  /**
   * True when ARP never resolved.
   */
  bool no_route;
} SdnPingResult;

typedef struct SdnBandwidthResult {
  uint64_t transfer_bytes;
  double bandwidth_mbps;
  enum SdnRunStatus status;
} SdnBandwidthResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *sdn_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void sdn_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *sdn_version(void);

struct SdnOptions *sdn_options_new(void);

/**
 * # Safety
 * `opts` must come from [`sdn_options_new`] and not be used afterwards.
 */
void sdn_options_free(struct SdnOptions *opts);

/**
 * Sets one knob, e.g. `("kind", "fat-tree")`, `("duration", "5..115:5")`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum SdnStatus sdn_options_set(struct SdnOptions *opts, const char *key, const char *value);

/**
 * Builds the topology described by `opts`.
 *
 * # Safety
 * `opts` must be valid; `out` must point to writable storage.
 */
enum SdnStatus sdn_topology_new(const struct SdnOptions *opts, struct SdnTopology **out);

/**
 * # Safety
 * `topo` must come from [`sdn_topology_new`] and not be used afterwards.
 */
void sdn_topology_free(struct SdnTopology *topo);

/**
 * Host, switch and link counts. Any out pointer may be null.
 *
 * # Safety
 * `topo` must be valid.
 */
enum SdnStatus sdn_topology_counts(const struct SdnTopology *topo,
                                   uint32_t *hosts,
                                   uint32_t *switches,
                                   uint32_t *links);

/**
 * Renders the topology; free the result with [`sdn_string_free`].
 *
 * # Safety
 * `topo` must be valid; `out` must point to writable storage.
 */
enum SdnStatus sdn_topology_render(const struct SdnTopology *topo,
                                   enum SdnTopologyFormat format,
                                   char **out);

/**
 * Runs the experiment in `opts` (all trials) and writes its CSV to `path`.
 *
 * # Safety
 * `opts` and `path` must be valid.
 */
enum SdnStatus sdn_run_to_file(const struct SdnOptions *opts, const char *path);

/**
 * Same as [`sdn_run_to_file`] but returns the CSV text.
 *
 * # Safety
 * `opts` must be valid; `out` must point to writable storage.
 */
enum SdnStatus sdn_run_to_string(const struct SdnOptions *opts, char **out);

/**
 * Creates a simulation for the topology and link/controller knobs in
 * `opts`, seeded with the resolved seed.
 *
 * # Safety
 * `opts` must be valid; `out` must point to writable storage.
 */
enum SdnStatus sdn_simulation_new(const struct SdnOptions *opts, struct SdnSimulation **out);

/**
 * # Safety
 * `sim` must come from [`sdn_simulation_new`] and not be used afterwards.
 */
void sdn_simulation_free(struct SdnSimulation *sim);

/**
 * Current simulated time in ms.
 *
 * # Safety
 * `sim` must be valid.
 */
double sdn_simulation_now_ms(const struct SdnSimulation *sim);

/**
 * Pings `dst` from `src` (1-based host indices). State carries over between
 * calls, so a second ping finds the flows already installed.
 *
 * # Safety
 * `sim` must be valid; `out` must point to writable storage.
 */
enum SdnStatus sdn_simulation_ping(struct SdnSimulation *sim,
                                   uint32_t src,
                                   uint32_t dst,
                                   struct SdnPingResult *out);

/**
 * Streams from `client` to `server` for `duration_s` simulated seconds.
 *
 * # Safety
 * `sim` must be valid; `out` must point to writable storage.
 */
enum SdnStatus sdn_simulation_bandwidth(struct SdnSimulation *sim,
                                        uint32_t client,
                                        uint32_t server,
                                        double duration_s,
                                        struct SdnBandwidthResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SDNBENCH_H */
