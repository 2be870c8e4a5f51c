#ifndef ANTERIAL_H
#define ANTERIAL_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call. Values are stable across releases.
typedef enum AnterialStatus {
  ANTERIAL_STATUS_OK = 0,
  ANTERIAL_STATUS_NULL_POINTER = 1,
  ANTERIAL_STATUS_INVALID_UTF8 = 2,
  ANTERIAL_STATUS_PARSE = 3,
  ANTERIAL_STATUS_DUPLICATE_LABEL = 10,
  ANTERIAL_STATUS_DUPLICATE_EDGE = 11,
  ANTERIAL_STATUS_SELF_LOOP = 12,
  ANTERIAL_STATUS_UNKNOWN_NODE = 13,
  ANTERIAL_STATUS_NOT_CHAIN_MIXED = 20,
  ANTERIAL_STATUS_NOT_ANTERIAL = 21,
  ANTERIAL_STATUS_NOT_CHAIN_CONNECTED = 22,
  ANTERIAL_STATUS_NOT_CHAIN_CONNECTED_ANTERIAL = 23,
  ANTERIAL_STATUS_NOT_DAG = 24,
  ANTERIAL_STATUS_INVALID_ORDER = 30,
  ANTERIAL_STATUS_OVERLAPPING_SETS = 31,
  ANTERIAL_STATUS_GRAPH_TOO_LARGE = 32,
  ANTERIAL_STATUS_NODE_SET_MISMATCH = 33,
  ANTERIAL_STATUS_INVALID_MODEL = 40,
  ANTERIAL_STATUS_NON_ANTERIAL_RESULT = 41,
  ANTERIAL_STATUS_MISSING_VALUES = 42,
  ANTERIAL_STATUS_SINGULAR_COVARIANCE = 43,
  ANTERIAL_STATUS_TOO_FEW_SAMPLES = 44,
  ANTERIAL_STATUS_CONSTANT_COLUMN = 45,
  ANTERIAL_STATUS_LABEL_MISMATCH = 46,
  ANTERIAL_STATUS_INVALID_PROBLEM = 50,
  ANTERIAL_STATUS_SET_VALUED_TREATMENT = 51,
  ANTERIAL_STATUS_TOO_LARGE_FOR_EXACT_CHECK = 52,
  ANTERIAL_STATUS_INVALID_ARGUMENT = 60,
  ANTERIAL_STATUS_PANIC = 99,
} AnterialStatus;

// Graph operations taking a node set and returning a new graph.
typedef enum AnterialOp {
  ANTERIAL_OP_MARGINALIZE = 0,
  ANTERIAL_OP_CONDITION = 1,
  ANTERIAL_OP_INTERVENE = 2,
  ANTERIAL_OP_COUNTERFACTUAL = 3,
  ANTERIAL_OP_SWAIG = 4,
  // The node set is the ordered treatment sequence; the input must be a DAG.
  ANTERIAL_OP_PARALLEL_WORLDS_SWIG = 5,
} AnterialOp;

// Sampling scheme for [`anterial_model_simulate`].
typedef enum AnterialMode {
  ANTERIAL_MODE_EQUILIBRIUM = 0,
  ANTERIAL_MODE_GIBBS = 1,
  ANTERIAL_MODE_COUPLED = 2,
} AnterialMode;

// Opaque mixed graph.
typedef struct AnterialGraph AnterialGraph;

// Opaque compiled Gaussian equilibrium model.
typedef struct AnterialModel AnterialModel;

// Message of the last failed call on this thread, or null after a success.
// The pointer is valid until the next call into the library on this thread.
const char *anterial_last_error(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void anterial_string_free(char *s);

// Parses graph JSON `{"nodes": [...], "edges": [{"u", "v", "type"}]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum AnterialStatus anterial_graph_from_json(const char *json, struct AnterialGraph **out);

// # Safety
// `g` must be a handle from this library and not have been freed. Null is ignored.
void anterial_graph_free(struct AnterialGraph *g);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle.
uintptr_t anterial_graph_node_count(const struct AnterialGraph *g);

// # Safety
// `g` must be a live handle and `out` writable.
enum AnterialStatus anterial_graph_to_json(const struct AnterialGraph *g, char **out);

// # Safety
// `g` must be a live handle and `out` writable.
enum AnterialStatus anterial_graph_to_dot(const struct AnterialGraph *g, char **out);

// Graph-class report as JSON, with witnesses.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum AnterialStatus anterial_graph_classify(const struct AnterialGraph *g, char **out);

// Whether `z` separates `a` from `b`.
//
// # Safety
// `g` must be a live handle, each label array must hold the given number
// of NUL-terminated strings, and `out` must be writable.
enum AnterialStatus anterial_separated(const struct AnterialGraph *g,
                                       const char *const *a,
                                       uintptr_t a_len,
                                       const char *const *b,
                                       uintptr_t b_len,
                                       const char *const *z,
                                       uintptr_t z_len,
                                       bool *out);

// Applies `op` over the labelled node set and writes a new graph handle.
//
// # Safety
// `g` must be a live handle, `nodes` must hold `len` NUL-terminated
// strings, and `out` must be writable.
enum AnterialStatus anterial_graph_apply(const struct AnterialGraph *g,
                                         enum AnterialOp op,
                                         const char *const *nodes,
                                         uintptr_t len,
                                         struct AnterialGraph **out);

// Maximal supergraph with the same separations.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum AnterialStatus anterial_graph_maximize(const struct AnterialGraph *g,
                                            struct AnterialGraph **out);

// Minimal set `S` with `lower ⊆ S ⊆ upper` separating treatment from
// outcome. Writes the result JSON `{"outcome", "S", "trace"}` and whether
// a set was found. An infeasible problem is a success with `feasible`
// set to false.
//
// # Safety
// `g` must be a live handle, strings NUL-terminated, label arrays of the
// given lengths, and both out-pointers writable.
enum AnterialStatus anterial_adjust(const struct AnterialGraph *g,
                                    const char *treatment,
                                    const char *outcome,
                                    const char *const *lower,
                                    uintptr_t lower_len,
                                    const char *const *upper,
                                    uintptr_t upper_len,
                                    bool *feasible,
                                    char **out);

// Parses, validates and compiles model JSON.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum AnterialStatus anterial_model_from_json(const char *json, struct AnterialModel **out);

// # Safety
// `m` must be a handle from this library and not have been freed. Null is ignored.
void anterial_model_free(struct AnterialModel *m);

// # Safety
// `m` must be a live handle and `out` writable.
enum AnterialStatus anterial_model_graph(const struct AnterialModel *m, struct AnterialGraph **out);

// Draws `n` records as CSV. `treated`/`values` give `len` interventions,
// applied to the whole model for equilibrium and Gibbs sampling and to the
// second world for coupled sampling. `burn_in` is used only by Gibbs.
//
// # Safety
// `m` must be a live handle, `treated` and `values` must hold `len`
// entries, and `out` must be writable.
enum AnterialStatus anterial_model_simulate(const struct AnterialModel *m,
                                            enum AnterialMode mode,
                                            uintptr_t n,
                                            uintptr_t burn_in,
                                            uint64_t seed,
                                            const char *const *treated,
                                            const double *values,
                                            uintptr_t len,
                                            char **out);

// Exact pairwise Markov report of the model against its corresponding
// graph, as a JSON array of rows.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum AnterialStatus anterial_model_markov_report(const struct AnterialModel *m, char **out);

#endif  /* ANTERIAL_H */
