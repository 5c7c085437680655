#include "core/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace paikit {

using json = nlohmann::ordered_json;

std::string_view target_token(Target t) {
  switch (t) {
    case Target::Sex: return "sex";
    case Target::Age: return "age";
    case Target::AgeGroup14: return "age_group_14";
    case Target::AgeGroup18: return "age_group_18";
  }
  return "?";
}

std::string_view sex_mode_token(SexMode m) {
  switch (m) {
    case SexMode::AllWithoutSex: return "all_without_sex";
    case SexMode::FemaleOnly: return "female_only";
    case SexMode::MaleOnly: return "male_only";
    case SexMode::SexAsInput: return "sex_as_input";
  }
  return "?";
}

namespace {

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d", v);
  return buf;
}

std::string mode_suffix(SexMode m) {
  switch (m) {
    case SexMode::AllWithoutSex: return "nosex";
    case SexMode::FemaleOnly: return "female";
    case SexMode::MaleOnly: return "male";
    case SexMode::SexAsInput: return "sexinput";
  }
  return "?";
}

}  // namespace

std::vector<ExperimentSpec> build_group_a(const std::vector<int>& ages) {
  std::vector<ExperimentSpec> specs;
  for (int age : ages) {
    ExperimentSpec s;
    s.group = 'A';
    s.test_id = 1;
    s.id = "A_t1_age" + two_digits(age);
    s.target = Target::Sex;
    s.age_filter = {age};
    s.sex_mode = SexMode::AllWithoutSex;
    s.description = "sex estimation at age " + std::to_string(age);
    specs.push_back(std::move(s));
  }
  ExperimentSpec global;
  global.group = 'A';
  global.test_id = 2;
  global.id = "A_t2_all";
  global.target = Target::Sex;
  global.sex_mode = SexMode::AllWithoutSex;
  global.description = "sex estimation over all ages";
  specs.push_back(std::move(global));
  return specs;
}

std::vector<ExperimentSpec> build_group_b() {
  struct TestDef {
    int id;
    std::vector<int> classes;
    const char* label;
  };
  const std::vector<TestDef> tests = {
      {1, {6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22},
       "1-year intervals"},
      {2, {6, 8, 10, 12, 14, 16, 18, 20, 22}, "2-year intervals"},
      {3, {6, 10, 14, 18, 22}, "4-year intervals"},
      {4, {5, 10, 15, 20}, "5-year intervals"},
  };
  std::vector<ExperimentSpec> specs;
  for (const TestDef& t : tests) {
    for (SexMode m : {SexMode::AllWithoutSex, SexMode::FemaleOnly,
                      SexMode::MaleOnly}) {
      ExperimentSpec s;
      s.group = 'B';
      s.test_id = t.id;
      s.id = "B_t" + std::to_string(t.id) + "_" + mode_suffix(m);
      s.target = Target::Age;
      s.age_filter = t.classes;
      s.sex_mode = m;
      s.description = std::string("age estimation, ") + t.label + ", " +
                      std::string(sex_mode_token(m));
      specs.push_back(std::move(s));
    }
  }
  return specs;
}

std::vector<ExperimentSpec> build_group_c() {
  std::vector<ExperimentSpec> specs;
  for (int threshold : {14, 18}) {
    for (SexMode m : {SexMode::AllWithoutSex, SexMode::FemaleOnly,
                      SexMode::MaleOnly}) {
      ExperimentSpec s;
      s.group = 'C';
      s.test_id = threshold == 14 ? 1 : 2;
      s.id = "C_t" + std::to_string(threshold) + "_" + mode_suffix(m);
      s.target = threshold == 14 ? Target::AgeGroup14 : Target::AgeGroup18;
      s.sex_mode = m;
      s.description = "age group estimation, threshold " +
                      std::to_string(threshold) + " years, " +
                      std::string(sex_mode_token(m));
      specs.push_back(std::move(s));
    }
  }
  return specs;
}

SpecData prepare_spec_data(const PaiTable& table, const ExperimentSpec& spec) {
  if (spec.sex_mode == SexMode::SexAsInput && spec.target == Target::Sex) {
    fail(ErrorKind::Config,
         "sex cannot be both the target and an input feature");
  }

  std::set<int> wanted(spec.age_filter.begin(), spec.age_filter.end());
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (!wanted.empty() && wanted.find(table.ages[r]) == wanted.end()) {
      continue;
    }
    if (spec.sex_mode == SexMode::FemaleOnly &&
        table.sexes[r] != Sex::Female) {
      continue;
    }
    if (spec.sex_mode == SexMode::MaleOnly && table.sexes[r] != Sex::Male) {
      continue;
    }
    rows.push_back(r);
  }

  const bool sex_feature = spec.sex_mode == SexMode::SexAsInput;
  const int dim = kPaiCount + (sex_feature ? 1 : 0);
  SpecData data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), dim);
  data.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    for (int j = 0; j < kPaiCount; ++j) {
      data.features(static_cast<Eigen::Index>(i), j) = table.at(r, j);
    }
    if (sex_feature) {
      data.features(static_cast<Eigen::Index>(i), kPaiCount) =
          table.sexes[r] == Sex::Male ? 1.0 : 0.0;
    }
    switch (spec.target) {
      case Target::Sex:
        data.labels.emplace_back(1, sex_token(table.sexes[r]));
        break;
      case Target::Age:
        data.labels.push_back(two_digits(table.ages[r]));
        break;
      case Target::AgeGroup14:
        data.labels.push_back(table.ages[r] >= 14 ? "ge14" : "lt14");
        break;
      case Target::AgeGroup18:
        data.labels.push_back(table.ages[r] >= 18 ? "ge18" : "lt18");
        break;
    }
  }
  const std::set<std::string> vocab(data.labels.begin(), data.labels.end());
  data.vocab.assign(vocab.begin(), vocab.end());
  return data;
}

namespace {

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string checksum_hex(std::uint64_t checksum) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(checksum));
  return buf;
}

}  // namespace

SuiteResult run_suite(const PaiTable& table,
                      const std::vector<ExperimentSpec>& specs,
                      const SuiteOptions& options) {
  SuiteResult result;
  result.options = options;
  result.dataset_checksum = checksum_hex(table_checksum(table));
  if (options.with_timestamp) result.timestamp = iso8601_utc_now();

  for (const ExperimentSpec& spec : specs) {
    SpecOutcome outcome;
    outcome.spec = spec;
    try {
      const SpecData data = prepare_spec_data(table, spec);
      outcome.rows_used = data.labels.size();
      outcome.vocab = data.vocab;
      if (data.vocab.size() < 2) {
        fail(ErrorKind::Validation,
             "spec requires at least 2 classes, found " +
                 std::to_string(data.vocab.size()));
      }

      MlpConfig config;
      config.input_dim = static_cast<int>(data.features.cols());
      config.hidden_neurons = options.hidden_neurons;
      config.output_classes = static_cast<int>(data.vocab.size());
      config.epochs = options.epochs;
      config.learning_rate = options.learning_rate;
      config.batch_size = options.batch_size;

      CvPlan plan;
      plan.n_folds = options.folds;
      plan.n_repeats = options.repeats;
      plan.seed = options.seed;

      outcome.report = cross_validate(config, data.features, data.labels,
                                      plan, options.jobs);
      if (options.save_models) {
        config.rng_seed = options.seed;
        outcome.final_model =
            train(config, data.features, data.labels).first;
      }
    } catch (const Error& e) {
      outcome.error = e.what();
    }
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

namespace {

json score_report_to_json(const ScoreReport& s) {
  json per_class = json::array();
  for (const ClassScore& c : s.per_class) {
    json item;
    item["label"] = c.label;
    item["support"] = c.support;
    item["precision"] = c.precision;
    item["recall"] = c.recall;
    if (c.defined) {
      item["f1"] = c.f1;
    } else {
      item["f1"] = nullptr;  // undefined: class absent from truth and guesses
    }
    per_class.push_back(std::move(item));
  }
  return json{{"macro_f1", s.macro_f1}, {"per_class", std::move(per_class)}};
}

json confusion_to_json(const ConfusionMatrix& cm) {
  return json{{"labels", cm.labels}, {"counts", cm.counts}};
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
  std::string out = "true_label";
  for (const std::string& l : cm.labels) out += "," + l;
  out += '\n';
  for (std::size_t i = 0; i < cm.labels.size(); ++i) {
    out += cm.labels[i];
    for (std::size_t j = 0; j < cm.labels.size(); ++j) {
      out += ',' + std::to_string(cm.counts[i][j]);
    }
    out += '\n';
  }
  return out;
}

json spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["id"] = spec.id;
  j["group"] = std::string(1, spec.group);
  j["test_id"] = spec.test_id;
  j["target"] = std::string(target_token(spec.target));
  j["sex_mode"] = std::string(sex_mode_token(spec.sex_mode));
  j["age_filter"] = spec.age_filter;
  j["description"] = spec.description;
  return j;
}

json options_to_json(const SuiteOptions& o) {
  json j;
  j["seed"] = o.seed;
  j["folds"] = o.folds;
  j["repeats"] = o.repeats;
  j["epochs"] = o.epochs;
  j["learning_rate"] = o.learning_rate;
  j["hidden_neurons"] = o.hidden_neurons;
  j["batch_size"] = o.batch_size;
  // macro averaging is the reported flavor; recorded here because the
  // choice is not universal
  j["f1_averaging"] = "macro";
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

}  // namespace

void write_suite_reports(const SuiteResult& result,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  json suite;
  suite["dataset_checksum"] = result.dataset_checksum;
  suite["options"] = options_to_json(result.options);
  if (!result.timestamp.empty()) suite["timestamp"] = result.timestamp;
  json spec_index = json::array();

  for (const SpecOutcome& outcome : result.outcomes) {
    const fs::path dir = fs::path(out_dir) / outcome.spec.id;
    fs::create_directories(dir, ec);

    json rep;
    rep["spec"] = spec_to_json(outcome.spec);
    rep["options"] = options_to_json(result.options);
    rep["dataset_checksum"] = result.dataset_checksum;
    rep["rows_used"] = outcome.rows_used;
    rep["vocab"] = outcome.vocab;
    if (outcome.report) {
      const EvalReport& r = *outcome.report;
      rep["status"] = "ok";
      rep["mean_macro_f1"] = r.mean_macro_f1;
      rep["std_macro_f1"] = r.std_macro_f1;
      rep["summed_confusion"] = confusion_to_json(r.summed_confusion);
      rep["aggregate_scores"] = score_report_to_json(
          score_report(r.summed_confusion));
      json folds = json::array();
      for (std::size_t f = 0; f < r.fold_scores.size(); ++f) {
        json fj;
        fj["fold"] = f;
        fj["scores"] = score_report_to_json(r.fold_scores[f]);
        fj["confusion"] = confusion_to_json(r.fold_confusions[f]);
        folds.push_back(std::move(fj));
      }
      rep["folds"] = std::move(folds);
      write_text(dir / "confusion.csv", confusion_to_csv(r.summed_confusion));
    } else {
      rep["status"] = "skipped";
      rep["error"] = outcome.error;
    }
    write_text(dir / "report.json", rep.dump(2) + "\n");
    if (outcome.final_model) {
      save_model(*outcome.final_model, (dir / "model.json").string());
    }

    json entry;
    entry["id"] = outcome.spec.id;
    entry["status"] = outcome.report ? "ok" : "skipped";
    if (outcome.report) {
      entry["mean_macro_f1"] = outcome.report->mean_macro_f1;
    } else {
      entry["error"] = outcome.error;
    }
    spec_index.push_back(std::move(entry));
  }
  suite["specs"] = std::move(spec_index);
  write_text(fs::path(out_dir) / "suite.json", suite.dump(2) + "\n");
}

}  // namespace paikit
