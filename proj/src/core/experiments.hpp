#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/eval.hpp"
#include "core/ingest.hpp"

namespace paikit {

enum class Target { Sex, Age, AgeGroup14, AgeGroup18 };
enum class SexMode { AllWithoutSex, FemaleOnly, MaleOnly, SexAsInput };

std::string_view target_token(Target t);
std::string_view sex_mode_token(SexMode m);

struct ExperimentSpec {
  char group = 'A';
  int test_id = 0;
  std::string id;  // stable slug, used as output directory name
  Target target = Target::Sex;
  std::vector<int> age_filter;  // empty = all ages
  SexMode sex_mode = SexMode::AllWithoutSex;
  std::string description;
};

// Group A (sex estimation): one spec per listed age plus the global
// all-ages spec.
std::vector<ExperimentSpec> build_group_a(const std::vector<int>& ages);

// Group B (age estimation): four age-interval tests, each with the
// no-sex / female-only / male-only variants.
std::vector<ExperimentSpec> build_group_b();

// Group C (age-group thresholds 14 and 18), same three variants each.
std::vector<ExperimentSpec> build_group_c();

struct SuiteOptions {
  std::uint64_t seed = 0;
  int folds = 10;
  int repeats = 1;
  int epochs = 500;
  double learning_rate = 0.01;
  int hidden_neurons = 128;
  int batch_size = 32;
  int jobs = 1;
  bool save_models = false;
  bool with_timestamp = true;
};

struct SpecOutcome {
  ExperimentSpec spec;
  std::optional<EvalReport> report;  // empty when skipped
  std::string error;                 // diagnostic when skipped
  std::size_t rows_used = 0;
  std::vector<std::string> vocab;
  std::optional<MlpModel> final_model;  // trained on all filtered rows
};

struct SuiteResult {
  std::vector<SpecOutcome> outcomes;
  std::string dataset_checksum;
  SuiteOptions options;
  std::string timestamp;  // ISO-8601 UTC, empty when disabled
};

// Rows and target labels for one spec; exposed for oracle-style checks.
struct SpecData {
  Eigen::MatrixXd features;  // rows x (208 or 209)
  std::vector<std::string> labels;
  std::vector<std::string> vocab;
};
SpecData prepare_spec_data(const PaiTable& table, const ExperimentSpec& spec);

SuiteResult run_suite(const PaiTable& table,
                      const std::vector<ExperimentSpec>& specs,
                      const SuiteOptions& options);

// One directory per spec with report.json and confusion.csv (and
// model.json when save_models is set), plus a top-level suite.json.
void write_suite_reports(const SuiteResult& result,
                         const std::string& out_dir);

}  // namespace paikit
