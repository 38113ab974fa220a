/* netflow - curvature-driven evolution of planar networks with triple junctions.
 *
 * C interface to the simulation core. All structured data crosses the boundary
 * as JSON text; handles are opaque. Strings returned through char** are owned
 * by the caller and must be released with nf_string_free().
 */
#ifndef NETFLOW_H
#define NETFLOW_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nf_status {
    NF_OK = 0,
    NF_ERR_DOMAIN = 1,  /* invalid network, infeasible problem, violated precondition */
    NF_ERR_PARSE = 2,   /* malformed JSON or schema violation */
    NF_ERR_NUMERIC = 3, /* solver breakdown or degenerate geometry */
    NF_ERR_ARG = 4      /* null pointer or bad handle */
} nf_status;

typedef struct nf_network nf_network;
typedef struct nf_sim nf_sim;

const char* nf_version(void);

/* Message for the most recent error on this thread. */
const char* nf_last_error(void);

nf_status nf_network_parse(const char* json, nf_network** out);
void nf_network_free(nf_network* net);
nf_status nf_network_to_json(const nf_network* net, char** out);

/* Validation report as JSON. Returns NF_OK when valid, NF_ERR_DOMAIN with a
 * report when violations were found. */
nf_status nf_network_validate(const nf_network* net, char** report_json);

/* Anisotropy-weighted length. window_radius <= 0 requires a bounded network;
 * otherwise the network is clipped to a disc of that radius centered at the
 * bounding-box center. */
nf_status nf_network_energy(const nf_network* net, double window_radius, double* out);

/* Crystalline curvature report: per-segment kappa, minimizing Cahn-Hoffman
 * offsets, stability. */
nf_status nf_curvature(const nf_network* net, char** report_json);

/* Evolution run. config_json keys: mode ("smooth"|"crystalline"), T, dt,
 * dt_safety, tol_herring, resample_every, snapshot_every, picard_check, ...
 * Snapshots are pulled one at a time with nf_sim_next. */
nf_status nf_sim_create(const nf_network* net, const char* config_json, nf_sim** out);
void nf_sim_free(nf_sim* sim);

/* Writes the next snapshot as a JSON line into *snapshot_json, or sets it to
 * NULL when the run is exhausted. */
nf_status nf_sim_next(nf_sim* sim, char** snapshot_json);

/* Final summary: final time, event record, energy range, step counts. */
nf_status nf_sim_summary(const nf_sim* sim, char** summary_json);

/* Renders a network (or an evolve snapshot with "curves") to SVG.
 * options_json keys: width, height, halfline_radius, wulff_inset, arrows. */
nf_status nf_render_svg(const char* network_or_snapshot_json, const char* options_json, char** svg);

void nf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* NETFLOW_H */
