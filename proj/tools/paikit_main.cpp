// paikit command line: synthetic data generation, PAI extraction,
// descriptive statistics, experiment suites and single-face prediction.
// Links the C API only.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "paikit/paikit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int report_error(const char* what, int code) {
  std::fprintf(stderr, "paikit: %s failed (status %d): %s\n", what, code,
               paikit_last_error());
  return kExitFailure;
}

struct DatasetHandle {
  paikit_dataset* ptr = nullptr;
  ~DatasetHandle() { paikit_dataset_free(ptr); }
};

struct TableHandle {
  paikit_table* ptr = nullptr;
  ~TableHandle() { paikit_table_free(ptr); }
};

struct ModelHandle {
  paikit_model* ptr = nullptr;
  ~ModelHandle() { paikit_model_free(ptr); }
};

int cmd_synth(int n_per_cell, std::uint64_t seed, const std::string& out) {
  DatasetHandle ds;
  if (int rc = paikit_dataset_synth(n_per_cell, seed, &ds.ptr)) {
    return report_error("synth", rc);
  }
  if (int rc = paikit_dataset_write_csv(ds.ptr, out.c_str())) {
    return report_error("write", rc);
  }
  std::fprintf(stderr, "wrote %ld records to %s\n",
               paikit_dataset_size(ds.ptr), out.c_str());
  return kExitOk;
}

int cmd_pai(const std::string& in, const std::string& out) {
  DatasetHandle ds;
  if (int rc = paikit_dataset_read_csv(in.c_str(), &ds.ptr)) {
    return report_error("read", rc);
  }
  TableHandle table;
  char* rejects = nullptr;
  if (int rc = paikit_table_from_dataset(ds.ptr, &table.ptr, &rejects)) {
    return report_error("pai", rc);
  }
  if (rejects) {
    const std::string text = rejects;
    paikit_string_free(rejects);
    if (text != "[]") {
      std::fprintf(stderr, "rejected records: %s\n", text.c_str());
    }
  }
  if (int rc = paikit_table_write_csv(table.ptr, out.c_str())) {
    return report_error("write", rc);
  }
  std::fprintf(stderr, "wrote %ld rows to %s\n",
               paikit_table_rows(table.ptr), out.c_str());
  return kExitOk;
}

int cmd_pai_list() {
  std::printf("index,kind,endpoint_a,endpoint_b,description\n");
  char line[256];
  for (int i = 1; i <= paikit_pai_count(); ++i) {
    if (int rc = paikit_pai_describe(i, line, sizeof(line))) {
      return report_error("pai-list", rc);
    }
    std::printf("%s\n", line);
  }
  return kExitOk;
}

int cmd_stats(const std::string& data, const std::string& out, double alpha) {
  TableHandle table;
  if (int rc = paikit_table_read_csv(data.c_str(), &table.ptr)) {
    return report_error("read", rc);
  }
  if (int rc = paikit_stats_run(table.ptr, out.c_str(), alpha)) {
    return report_error("stats", rc);
  }
  std::fprintf(stderr, "wrote boxplots.csv, shapiro.csv, anova.csv to %s\n",
               out.c_str());
  return kExitOk;
}

int cmd_run(const std::string& data, const std::string& group,
            const paikit_run_options& options, const std::string& out) {
  TableHandle table;
  if (int rc = paikit_table_read_csv(data.c_str(), &table.ptr)) {
    return report_error("read", rc);
  }
  if (int rc =
          paikit_run_suite(table.ptr, group.c_str(), &options, out.c_str())) {
    return report_error("run", rc);
  }
  std::fprintf(stderr, "suite written to %s\n", out.c_str());
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& landmarks,
                long row) {
  ModelHandle model;
  if (int rc = paikit_model_load(model_path.c_str(), &model.ptr)) {
    return report_error("load model", rc);
  }
  DatasetHandle ds;
  if (int rc = paikit_dataset_read_csv(landmarks.c_str(), &ds.ptr)) {
    return report_error("read landmarks", rc);
  }
  TableHandle table;
  if (int rc = paikit_table_from_dataset(ds.ptr, &table.ptr, nullptr)) {
    return report_error("pai", rc);
  }
  if (row < 0 || row >= paikit_table_rows(table.ptr)) {
    std::fprintf(stderr, "paikit: row %ld out of range (file has %ld rows)\n",
                 row, paikit_table_rows(table.ptr));
    return kExitFailure;
  }

  std::vector<double> features(paikit_pai_count());
  char sex = 0;
  int age = 0;
  if (int rc =
          paikit_table_get_row(table.ptr, row, features.data(), &sex, &age)) {
    return report_error("row", rc);
  }
  const int dim = paikit_model_input_dim(model.ptr);
  if (dim == paikit_pai_count() + 1) {
    features.push_back(sex == 'M' ? 1.0 : 0.0);  // sex-as-input models
  } else if (dim != paikit_pai_count()) {
    std::fprintf(stderr, "paikit: model expects %d features\n", dim);
    return kExitFailure;
  }

  const int k = paikit_model_num_classes(model.ptr);
  std::vector<double> probs(k);
  char label[128];
  if (int rc = paikit_model_predict(model.ptr, features.data(),
                                    static_cast<int>(features.size()), label,
                                    sizeof(label), probs.data())) {
    return report_error("predict", rc);
  }

  std::printf("{\"label\": \"%s\", \"probabilities\": {", label);
  for (int i = 0; i < k; ++i) {
    char class_label[128];
    if (int rc = paikit_model_class_label(model.ptr, i, class_label,
                                          sizeof(class_label))) {
      return report_error("label", rc);
    }
    std::printf("%s\"%s\": %.9g", i ? ", " : "", class_label, probs[i]);
  }
  std::printf("}}\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photo-anthropometric index toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic landmark dataset (ages 5-22)");
  int n_per_cell = 10;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--n-per-cell", n_per_cell,
                    "records per (sex, age) cell")->default_val(10);
  synth->add_option("--seed", synth_seed, "generator seed")->required();
  synth->add_option("--out", synth_out, "output landmark CSV")->required();

  // pai
  auto* pai = app.add_subcommand(
      "pai", "compute the 208 PAIs from a landmark CSV");
  std::string pai_in, pai_out;
  pai->add_option("--in", pai_in, "input landmark CSV")->required();
  pai->add_option("--out", pai_out, "output PAI CSV")->required();

  // pai-list
  app.add_subcommand("pai-list",
                     "print the index -> definition table for all 208 PAIs");

  // stats
  auto* stats = app.add_subcommand(
      "stats", "boxplot, normality and two-way anova summaries");
  std::string stats_data, stats_out;
  double alpha = 0.01;
  stats->add_option("--data", stats_data, "input PAI CSV")->required();
  stats->add_option("--out", stats_out, "output directory")->required();
  stats->add_option("--alpha", alpha, "significance level")->default_val(0.01);

  // run
  auto* run = app.add_subcommand(
      "run", "run experiment group A, B, C or all with cross-validation");
  std::string run_data, run_group, run_out, run_ages;
  std::uint64_t run_seed = 0;
  int folds = 10, repeats = 1, epochs = 500, jobs = 1;
  bool save_models = false, no_timestamp = false;
  run->add_option("--data", run_data, "input PAI CSV")->required();
  run->add_option("--group", run_group, "A, B, C or all")->required();
  run->add_option("--seed", run_seed, "cross-validation seed")->required();
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--folds", folds, "cross-validation folds")->default_val(10);
  run->add_option("--repeats", repeats, "shuffled repetitions")
      ->default_val(1);
  run->add_option("--epochs", epochs, "training epochs")->default_val(500);
  run->add_option("--jobs", jobs, "concurrent fold workers")->default_val(1);
  run->add_option("--ages", run_ages,
                  "group A per-age tests, list '5,6,7' or range '6..22'");
  run->add_flag("--save-models", save_models,
                "save a model.json per experiment, trained on all rows");
  run->add_flag("--no-timestamp", no_timestamp,
                "omit the timestamp from suite.json");

  // predict
  auto* predict = app.add_subcommand(
      "predict", "classify one face from a model file and a landmark row");
  std::string model_path, landmark_path;
  long row = 0;
  predict->add_option("--model", model_path, "model.json path")->required();
  predict->add_option("--landmarks", landmark_path,
                      "landmark CSV with the face row")->required();
  predict->add_option("--row", row, "0-based row index")->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (synth->parsed()) return cmd_synth(n_per_cell, synth_seed, synth_out);
  if (pai->parsed()) return cmd_pai(pai_in, pai_out);
  if (app.get_subcommand("pai-list")->parsed()) return cmd_pai_list();
  if (stats->parsed()) return cmd_stats(stats_data, stats_out, alpha);
  if (run->parsed()) {
    paikit_run_options options{};
    options.seed = run_seed;
    options.folds = folds;
    options.repeats = repeats;
    options.epochs = epochs;
    options.jobs = jobs;
    options.save_models = save_models ? 1 : 0;
    options.no_timestamp = no_timestamp ? 1 : 0;
    options.ages = run_ages.empty() ? nullptr : run_ages.c_str();
    return cmd_run(run_data, run_group, options, run_out);
  }
  if (predict->parsed()) return cmd_predict(model_path, landmark_path, row);
  return kExitUsage;
}
