/* paikit — photo-anthropometric index toolkit, C interface.
 *
 * All functions return PAIKIT_OK (0) on success or a nonzero error code;
 * paikit_last_error() returns a thread-local description of the most
 * recent failure. Objects returned through out-parameters must be
 * released with the matching *_free function.
 */

#ifndef PAIKIT_H_
#define PAIKIT_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum paikit_status {
  PAIKIT_OK = 0,
  PAIKIT_E_IO = 1,          /* file missing or unwritable */
  PAIKIT_E_PARSE = 2,       /* malformed input bytes */
  PAIKIT_E_SCHEMA = 3,      /* wrong column layout or file format */
  PAIKIT_E_VALIDATION = 4,  /* well-formed but invalid values */
  PAIKIT_E_DEGENERATE = 5,  /* degenerate geometry or sample */
  PAIKIT_E_CONFIG = 6,      /* invalid option or argument */
  PAIKIT_E_INTERNAL = 7
};

const char* paikit_version(void);

/* Thread-local message for the last failed call on this thread. */
const char* paikit_last_error(void);

/* Frees strings returned through char** out-parameters. */
void paikit_string_free(char* s);

/* ---- landmark datasets ---- */

typedef struct paikit_dataset paikit_dataset;

/* Deterministic synthetic dataset: n_per_cell faces for every (sex, age)
 * cell, ages 5..22. */
int paikit_dataset_synth(int n_per_cell, uint64_t seed,
                         paikit_dataset** out);

int paikit_dataset_read_csv(const char* path, paikit_dataset** out);
int paikit_dataset_write_csv(const paikit_dataset* dataset, const char* path);
long paikit_dataset_size(const paikit_dataset* dataset);
void paikit_dataset_free(paikit_dataset* dataset);

/* ---- PAI feature tables ---- */

typedef struct paikit_table paikit_table;

/* Computes the 208 PAIs per record. Records with degenerate geometry are
 * skipped; when rejects_json is non-NULL it receives a JSON array
 * [{"record", "subject_id", "reason"}, ...] (free with
 * paikit_string_free). */
int paikit_table_from_dataset(const paikit_dataset* dataset,
                              paikit_table** out, char** rejects_json);

int paikit_table_read_csv(const char* path, paikit_table** out);
int paikit_table_write_csv(const paikit_table* table, const char* path);
long paikit_table_rows(const paikit_table* table);

/* Copies one row: 208 feature values, the sex token ('F'/'M') and age. */
int paikit_table_get_row(const paikit_table* table, long row,
                         double* features208, char* sex, int* age);
void paikit_table_free(paikit_table* table);

/* ---- PAI definitions ---- */

int paikit_pai_count(void);

/* Writes "index,kind,endpoint_a,endpoint_b,description" for the 1-based
 * definition index. Returns PAIKIT_E_CONFIG for an invalid index or a
 * too-small buffer. */
int paikit_pai_describe(int index, char* buf, size_t bufsize);

/* ---- descriptive statistics ---- */

/* Writes boxplots.csv, shapiro.csv and anova.csv into out_dir. */
int paikit_stats_run(const paikit_table* table, const char* out_dir,
                     double alpha);

/* ---- experiment suites ---- */

typedef struct paikit_run_options {
  uint64_t seed;
  int folds;        /* default 10 when 0 */
  int repeats;      /* default 1 when 0 */
  int epochs;       /* default 500 when 0 */
  int jobs;         /* default 1 when 0 */
  int save_models;  /* nonzero: write model.json per spec */
  int no_timestamp; /* nonzero: omit timestamp from suite.json */
  /* Group A only: comma list or lo..hi range of per-age tests, e.g.
   * "6..22"; NULL = every age present in the table. */
  const char* ages;
} paikit_run_options;

/* group is "A", "B", "C" or "all". Writes one report.json/confusion.csv
 * directory per experiment plus suite.json into out_dir. */
int paikit_run_suite(const paikit_table* table, const char* group,
                     const paikit_run_options* options, const char* out_dir);

/* ---- trained models ---- */

typedef struct paikit_model paikit_model;

int paikit_model_load(const char* path, paikit_model** out);
int paikit_model_input_dim(const paikit_model* model);
int paikit_model_num_classes(const paikit_model* model);

/* Class label written into label_buf; when probs is non-NULL it receives
 * paikit_model_num_classes() probabilities in vocabulary order. */
int paikit_model_predict(const paikit_model* model, const double* features,
                         int n_features, char* label_buf, size_t label_bufsize,
                         double* probs);

/* Vocabulary entry for a class index. */
int paikit_model_class_label(const paikit_model* model, int class_index,
                             char* label_buf, size_t label_bufsize);
void paikit_model_free(paikit_model* model);

#ifdef __cplusplus
}
#endif

#endif /* PAIKIT_H_ */
