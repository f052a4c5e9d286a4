/* C interface to the rcsp library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every call returns an rcsp_status; on failure rcsp_last_error() describes
 * the problem (thread-local, valid until the next failing call on the same
 * thread). Strings returned through char** are owned by the caller and must
 * be released with rcsp_string_free.
 */
#ifndef RCSP_H
#define RCSP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RCSP_API __declspec(dllexport)
#else
#define RCSP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rcsp_status {
    RCSP_OK = 0,
    RCSP_ERR_INVALID = 1,     /* bad argument or precondition violated */
    RCSP_ERR_PARSE = 2,       /* malformed text; message carries the line */
    RCSP_ERR_UNSUPPORTED = 3, /* outside the supported regime, e.g. k != 2 */
    RCSP_ERR_INTERNAL = 4
} rcsp_status;

/* Solver verdicts; the numeric values double as CLI exit codes. */
enum {
    RCSP_SAT = 10,
    RCSP_UNSAT = 20,
    RCSP_INDETERMINATE = 30
};

enum { RCSP_MODEL_SIMPLE = 0, RCSP_MODEL_HAT = 1 };

typedef struct rcsp_distribution rcsp_distribution;
typedef struct rcsp_instance rcsp_instance;
typedef struct rcsp_hypergraph rcsp_hypergraph;
typedef struct rcsp_target rcsp_target;
typedef struct rcsp_scan rcsp_scan;

RCSP_API const char* rcsp_version(void);
RCSP_API const char* rcsp_last_error(void);
RCSP_API void rcsp_string_free(char* s);

/* Distributions: dkt:d,k,t | ed3 | split5:q | colour:m | prime:q:<spec> |
 * hom | hom:<file or K<m> or C<m>> | file:<path>. target_path may be NULL. */
RCSP_API rcsp_status rcsp_distribution_from_spec(const char* spec, const char* target_path, rcsp_distribution** out);
RCSP_API void rcsp_distribution_free(rcsp_distribution* dist);
RCSP_API rcsp_status rcsp_distribution_info(const rcsp_distribution* dist, int* d, int* k, size_t* templates);
RCSP_API rcsp_status rcsp_distribution_spec(const rcsp_distribution* dist, char** out);
RCSP_API rcsp_status rcsp_distribution_emit(const rcsp_distribution* dist, char** out);

/* Instances. p = c / n^(k-1). */
RCSP_API rcsp_status rcsp_instance_sample(const rcsp_distribution* dist, int model, int n, double c, uint64_t seed,
                                          rcsp_instance** out);
RCSP_API rcsp_status rcsp_instance_parse(const char* text, rcsp_instance** out);
RCSP_API rcsp_status rcsp_instance_read(const char* path, rcsp_instance** out);
RCSP_API void rcsp_instance_free(rcsp_instance* inst);
RCSP_API rcsp_status rcsp_instance_info(const rcsp_instance* inst, int* n, int* d, int* k, size_t* constraints);
/* header_comment may be NULL; each of its lines becomes a '#' line. */
RCSP_API rcsp_status rcsp_instance_emit(const rcsp_instance* inst, const char* header_comment, char** out);
RCSP_API rcsp_status rcsp_instance_evaluate(const rcsp_instance* inst, const int* values, size_t count, int* satisfied);

/* result receives RCSP_SAT, RCSP_UNSAT or RCSP_INDETERMINATE. values, if not
 * NULL, must hold n entries and receives the witness when satisfiable.
 * node_budget 0 means unlimited. */
RCSP_API rcsp_status rcsp_solve(const rcsp_instance* inst, uint64_t node_budget, int* result, int* values,
                                uint64_t* nodes);

/* Hypergraphs and homomorphism targets, text format `hg n k [directed]`. */
RCSP_API rcsp_status rcsp_hypergraph_read(const char* path, rcsp_hypergraph** out);
RCSP_API rcsp_status rcsp_hypergraph_parse(const char* text, rcsp_hypergraph** out);
RCSP_API void rcsp_hypergraph_free(rcsp_hypergraph* h);
RCSP_API rcsp_status rcsp_hypergraph_info(const rcsp_hypergraph* h, int* n, int* k, size_t* edges);
RCSP_API rcsp_status rcsp_target_read(const char* path, rcsp_target** out);
RCSP_API rcsp_status rcsp_target_parse(const char* text, rcsp_target** out);
RCSP_API void rcsp_target_free(rcsp_target* t);
/* found receives 1 or 0; mapping, if not NULL, must hold n(G) entries. */
RCSP_API rcsp_status rcsp_homomorphism(const rcsp_hypergraph* g, const rcsp_target* h, int* found, int* mapping);

/* Criticality report at density c as JSON. */
RCSP_API rcsp_status rcsp_criticality_json(const rcsp_distribution* dist, double c, char** out);

/* Experiment configs are JSON objects; see README for the fields. */
RCSP_API rcsp_status rcsp_preset_configs(const char* name, uint64_t seed, char** json_array);
RCSP_API rcsp_status rcsp_preset_names(char** json_array);
/* Parses and re-serializes a config; fails on missing fields or files. */
RCSP_API rcsp_status rcsp_config_normalize(const char* json, char** out);

RCSP_API rcsp_status rcsp_scan_run(const char* config_json, rcsp_scan** out);
RCSP_API void rcsp_scan_free(rcsp_scan* scan);
RCSP_API rcsp_status rcsp_scan_csv(const rcsp_scan* scan, char** out);
RCSP_API rcsp_status rcsp_scan_json(const rcsp_scan* scan, char** out);
RCSP_API rcsp_status rcsp_scan_svg(const rcsp_scan* scan, char** out);

/* Runs the acceptance criteria behind a verify preset. report receives one
 * line per criterion; all_passed receives 1 or 0. */
RCSP_API rcsp_status rcsp_verify(const char* preset, uint64_t seed, unsigned workers, char** report, int* all_passed);
RCSP_API rcsp_status rcsp_verify_preset_names(char** json_array);

#ifdef __cplusplus
}
#endif

#endif
