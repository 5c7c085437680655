#include "paikit/paikit.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/experiments.hpp"
#include "core/ingest.hpp"
#include "core/mlp.hpp"
#include "core/pai.hpp"
#include "core/stats.hpp"
#include "core/synth.hpp"

using namespace paikit;

struct paikit_dataset {
  Dataset data;
};

struct paikit_table {
  PaiTable data;
};

struct paikit_model {
  MlpModel data;
};

namespace {

thread_local std::string g_last_error;

int to_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return PAIKIT_E_IO;
    case ErrorKind::Parse: return PAIKIT_E_PARSE;
    case ErrorKind::Schema: return PAIKIT_E_SCHEMA;
    case ErrorKind::Validation: return PAIKIT_E_VALIDATION;
    case ErrorKind::DegenerateGeometry:
    case ErrorKind::DegenerateSample: return PAIKIT_E_DEGENERATE;
    case ErrorKind::Config:
    case ErrorKind::Shape:
    case ErrorKind::Unsupported: return PAIKIT_E_CONFIG;
    case ErrorKind::Design:
    case ErrorKind::Optimizer: return PAIKIT_E_VALIDATION;
  }
  return PAIKIT_E_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return PAIKIT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PAIKIT_E_INTERNAL;
  }
}

int require(bool condition, const char* message) {
  if (condition) return PAIKIT_OK;
  g_last_error = message;
  return PAIKIT_E_CONFIG;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int copy_to_buffer(const std::string& s, char* buf, size_t bufsize) {
  if (!buf || bufsize < s.size() + 1) {
    g_last_error = "buffer too small (need " +
                   std::to_string(s.size() + 1) + " bytes)";
    return PAIKIT_E_CONFIG;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return PAIKIT_OK;
}

// "5,7,9" or "6..22"
std::vector<int> parse_age_list(const std::string& text) {
  std::vector<int> ages;
  const auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    const int lo = std::stoi(text.substr(0, range_pos));
    const int hi = std::stoi(text.substr(range_pos + 2));
    if (lo > hi) fail(ErrorKind::Config, "empty age range '" + text + "'");
    for (int a = lo; a <= hi; ++a) ages.push_back(a);
    return ages;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string tok =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (tok.empty()) fail(ErrorKind::Config, "empty age token");
    ages.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ages;
}

}  // namespace

extern "C" {

const char* paikit_version(void) { return "1.0.0"; }

const char* paikit_last_error(void) { return g_last_error.c_str(); }

void paikit_string_free(char* s) { delete[] s; }

int paikit_dataset_synth(int n_per_cell, uint64_t seed,
                         paikit_dataset** out) {
  if (int rc = require(out != nullptr, "out must not be NULL")) return rc;
  return guarded([&] {
    *out = new paikit_dataset{generate_default(seed, n_per_cell)};
  });
}

int paikit_dataset_read_csv(const char* path, paikit_dataset** out) {
  if (int rc = require(path && out, "path and out must not be NULL"))
    return rc;
  return guarded([&] { *out = new paikit_dataset{parse_landmark_csv(path)}; });
}

int paikit_dataset_write_csv(const paikit_dataset* dataset,
                             const char* path) {
  if (int rc = require(dataset && path, "dataset and path must not be NULL"))
    return rc;
  return guarded([&] { write_landmark_csv(dataset->data, path); });
}

long paikit_dataset_size(const paikit_dataset* dataset) {
  return dataset ? static_cast<long>(dataset->data.records.size()) : 0;
}

void paikit_dataset_free(paikit_dataset* dataset) { delete dataset; }

int paikit_table_from_dataset(const paikit_dataset* dataset,
                              paikit_table** out, char** rejects_json) {
  if (int rc = require(dataset && out, "dataset and out must not be NULL"))
    return rc;
  return guarded([&] {
    std::vector<PaiReject> rejects;
    PaiTable table = compute_dataset_pais(dataset->data, &rejects);
    if (rejects_json) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const PaiReject& r : rejects) {
        arr.push_back({{"record", r.record_index},
                       {"subject_id", r.subject_id},
                       {"reason", r.reason}});
      }
      *rejects_json = dup_string(arr.dump());
    }
    *out = new paikit_table{std::move(table)};
  });
}

int paikit_table_read_csv(const char* path, paikit_table** out) {
  if (int rc = require(path && out, "path and out must not be NULL"))
    return rc;
  return guarded([&] { *out = new paikit_table{parse_pai_csv(path)}; });
}

int paikit_table_write_csv(const paikit_table* table, const char* path) {
  if (int rc = require(table && path, "table and path must not be NULL"))
    return rc;
  return guarded([&] { write_pai_csv(table->data, path); });
}

long paikit_table_rows(const paikit_table* table) {
  return table ? static_cast<long>(table->data.rows()) : 0;
}

int paikit_table_get_row(const paikit_table* table, long row,
                         double* features208, char* sex, int* age) {
  if (int rc = require(table != nullptr, "table must not be NULL")) return rc;
  if (row < 0 || row >= static_cast<long>(table->data.rows())) {
    g_last_error = "row index out of range";
    return PAIKIT_E_CONFIG;
  }
  const auto r = static_cast<std::size_t>(row);
  if (features208) {
    std::memcpy(features208, table->data.row(r), kPaiCount * sizeof(double));
  }
  if (sex) *sex = sex_token(table->data.sexes[r]);
  if (age) *age = table->data.ages[r];
  return PAIKIT_OK;
}

void paikit_table_free(paikit_table* table) { delete table; }

int paikit_pai_count(void) { return kPaiCount; }

int paikit_pai_describe(int index, char* buf, size_t bufsize) {
  if (index < 1 || index > kPaiCount) {
    g_last_error = "index must be in 1..208";
    return PAIKIT_E_CONFIG;
  }
  const PaiDefinition& d = pai_definitions()[index - 1];
  char line[256];
  std::snprintf(line, sizeof(line), "%d,%s,%s,%s,%s", d.index,
                std::string(pai_kind_token(d.kind)).c_str(),
                std::string(landmark_token(d.a)).c_str(),
                std::string(landmark_token(d.b)).c_str(),
                d.description.c_str());
  return copy_to_buffer(line, buf, bufsize);
}

int paikit_stats_run(const paikit_table* table, const char* out_dir,
                     double alpha) {
  if (int rc = require(table && out_dir, "table and out_dir must not be NULL"))
    return rc;
  return guarded([&] {
    DescriptivesOptions opts;
    if (alpha > 0.0) opts.alpha = alpha;
    run_descriptives(table->data, out_dir, opts);
  });
}

int paikit_run_suite(const paikit_table* table, const char* group,
                     const paikit_run_options* options, const char* out_dir) {
  if (int rc = require(table && group && options && out_dir,
                       "table, group, options and out_dir must not be NULL"))
    return rc;
  return guarded([&] {
    const std::string g = group;
    std::vector<int> group_a_ages;
    if (options->ages) {
      group_a_ages = parse_age_list(options->ages);
    } else {
      std::set<int> present(table->data.ages.begin(),
                            table->data.ages.end());
      group_a_ages.assign(present.begin(), present.end());
    }

    std::vector<ExperimentSpec> specs;
    const auto append = [&specs](std::vector<ExperimentSpec> more) {
      for (auto& s : more) specs.push_back(std::move(s));
    };
    if (g == "A" || g == "all") append(build_group_a(group_a_ages));
    if (g == "B" || g == "all") append(build_group_b());
    if (g == "C" || g == "all") append(build_group_c());
    if (specs.empty()) {
      fail(ErrorKind::Config, "unknown group '" + g + "' (use A, B, C or all)");
    }

    SuiteOptions sopts;
    sopts.seed = options->seed;
    if (options->folds > 0) sopts.folds = options->folds;
    if (options->repeats > 0) sopts.repeats = options->repeats;
    if (options->epochs > 0) sopts.epochs = options->epochs;
    if (options->jobs > 0) sopts.jobs = options->jobs;
    sopts.save_models = options->save_models != 0;
    sopts.with_timestamp = options->no_timestamp == 0;

    const SuiteResult result = run_suite(table->data, specs, sopts);
    write_suite_reports(result, out_dir);
  });
}

int paikit_model_load(const char* path, paikit_model** out) {
  if (int rc = require(path && out, "path and out must not be NULL"))
    return rc;
  return guarded([&] { *out = new paikit_model{load_model(path)}; });
}

int paikit_model_input_dim(const paikit_model* model) {
  return model ? model->data.config.input_dim : 0;
}

int paikit_model_num_classes(const paikit_model* model) {
  return model ? model->data.config.output_classes : 0;
}

int paikit_model_predict(const paikit_model* model, const double* features,
                         int n_features, char* label_buf,
                         size_t label_bufsize, double* probs) {
  if (int rc = require(model && features, "model and features required"))
    return rc;
  int rc = PAIKIT_OK;
  const int code = guarded([&] {
    Eigen::VectorXd x(n_features);
    for (int i = 0; i < n_features; ++i) x(i) = features[i];
    const auto [label, p] = predict(model->data, x);
    if (probs) {
      for (Eigen::Index i = 0; i < p.size(); ++i) probs[i] = p(i);
    }
    rc = copy_to_buffer(label, label_buf, label_bufsize);
  });
  return code != PAIKIT_OK ? code : rc;
}

int paikit_model_class_label(const paikit_model* model, int class_index,
                             char* label_buf, size_t label_bufsize) {
  if (int rc = require(model != nullptr, "model must not be NULL")) return rc;
  if (class_index < 0 ||
      class_index >= static_cast<int>(model->data.label_vocab.size())) {
    g_last_error = "class index out of range";
    return PAIKIT_E_CONFIG;
  }
  return copy_to_buffer(model->data.label_vocab[class_index], label_buf,
                        label_bufsize);
}

void paikit_model_free(paikit_model* model) { delete model; }

}  // extern "C"
