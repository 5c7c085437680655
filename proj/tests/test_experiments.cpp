#include "doctest.h"

#include <filesystem>
#include <map>
#include <set>

#include "core/experiments.hpp"
#include "core/pai.hpp"
#include "core/synth.hpp"
#include "test_util.hpp"

using namespace paikit;
using paikit_test::TempDir;

namespace {

std::vector<int> age_range(int lo, int hi) {
  std::vector<int> v;
  for (int a = lo; a <= hi; ++a) v.push_back(a);
  return v;
}

}  // namespace

TEST_CASE("group A over all ages yields 18 per-age specs plus one global") {
  const auto specs = build_group_a(age_range(5, 22));
  REQUIRE(specs.size() == 19);
  for (std::size_t i = 0; i < 18; ++i) {
    CHECK(specs[i].target == Target::Sex);
    CHECK(specs[i].age_filter.size() == 1);
    CHECK(specs[i].age_filter[0] == 5 + static_cast<int>(i));
    CHECK(specs[i].test_id == 1);
  }
  CHECK(specs.back().age_filter.empty());
  CHECK(specs.back().test_id == 2);
  CHECK(specs.back().target == Target::Sex);
}

TEST_CASE("group A restricted to ages 6..22 matches the 17-test layout") {
  const auto specs = build_group_a(age_range(6, 22));
  int per_age = 0;
  for (const auto& s : specs) {
    if (!s.age_filter.empty()) ++per_age;
  }
  CHECK(per_age == 17);
  CHECK(specs.size() == 18);
}

TEST_CASE("group B has four interval tests in three sex modes") {
  const auto specs = build_group_b();
  REQUIRE(specs.size() == 12);
  std::map<int, std::set<std::size_t>> class_counts;
  std::map<int, int> mode_counts;
  for (const auto& s : specs) {
    CHECK(s.target == Target::Age);
    class_counts[s.test_id].insert(s.age_filter.size());
    mode_counts[s.test_id]++;
  }
  CHECK(class_counts[1] == std::set<std::size_t>{17});
  CHECK(class_counts[2] == std::set<std::size_t>{9});
  CHECK(class_counts[3] == std::set<std::size_t>{5});
  CHECK(class_counts[4] == std::set<std::size_t>{4});
  for (int t = 1; t <= 4; ++t) CHECK(mode_counts[t] == 3);

  // the listed class ages
  CHECK(specs[0].age_filter == age_range(6, 22));
  CHECK(specs[3].age_filter == std::vector<int>{6, 8, 10, 12, 14, 16, 18, 20, 22});
  CHECK(specs[6].age_filter == std::vector<int>{6, 10, 14, 18, 22});
  CHECK(specs[9].age_filter == std::vector<int>{5, 10, 15, 20});
}

TEST_CASE("group C covers both thresholds in three sex modes") {
  const auto specs = build_group_c();
  REQUIRE(specs.size() == 6);
  int t14 = 0, t18 = 0;
  for (const auto& s : specs) {
    if (s.target == Target::AgeGroup14) ++t14;
    if (s.target == Target::AgeGroup18) ++t18;
    CHECK(s.age_filter.empty());
  }
  CHECK(t14 == 3);
  CHECK(t18 == 3);
}

namespace {

PaiTable tiny_table(std::uint64_t seed, int n_per_cell,
                    const std::vector<int>& ages) {
  const Dataset ds = generate(default_growth_model(seed), n_per_cell, ages,
                              {Sex::Female, Sex::Male});
  return compute_dataset_pais(ds);
}

}  // namespace

TEST_CASE("spec data respects age and sex filters exactly") {
  const PaiTable t = tiny_table(3, 4, {6, 14, 20});

  ExperimentSpec spec;
  spec.target = Target::Sex;
  spec.age_filter = {14};
  const SpecData per_age = prepare_spec_data(t, spec);
  CHECK(per_age.labels.size() == 8);  // 4 per sex at age 14
  CHECK(per_age.features.cols() == 208);
  CHECK(per_age.vocab == std::vector<std::string>{"F", "M"});

  ExperimentSpec female;
  female.target = Target::Age;
  female.age_filter = {6, 14, 20};
  female.sex_mode = SexMode::FemaleOnly;
  const SpecData f = prepare_spec_data(t, female);
  CHECK(f.labels.size() == 12);
  CHECK(f.vocab == std::vector<std::string>{"06", "14", "20"});

  // count female rows independently
  long female_rows = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.sexes[r] == Sex::Female) ++female_rows;
  }
  CHECK(static_cast<long>(f.labels.size()) == female_rows);
}

TEST_CASE("threshold labels are a deterministic function of age") {
  const PaiTable t = tiny_table(4, 2, {5, 13, 14, 17, 18, 22});
  ExperimentSpec spec;
  spec.target = Target::AgeGroup14;
  const SpecData d14 = prepare_spec_data(t, spec);
  std::size_t idx = 0;
  for (std::size_t r = 0; r < t.rows(); ++r, ++idx) {
    CHECK(d14.labels[idx] == (t.ages[r] >= 14 ? "ge14" : "lt14"));
  }
  spec.target = Target::AgeGroup18;
  const SpecData d18 = prepare_spec_data(t, spec);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    CHECK(d18.labels[r] == (t.ages[r] >= 18 ? "ge18" : "lt18"));
  }
}

TEST_CASE("sex-as-input adds a 209th feature column") {
  const PaiTable t = tiny_table(5, 3, {6, 12});
  ExperimentSpec spec;
  spec.target = Target::Age;
  spec.age_filter = {6, 12};
  spec.sex_mode = SexMode::SexAsInput;
  const SpecData d = prepare_spec_data(t, spec);
  CHECK(d.features.cols() == 209);
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    const double v = d.features(i, 208);
    CHECK((v == 0.0 || v == 1.0));
  }

  spec.target = Target::Sex;
  CHECK_THROWS_WITH_AS(prepare_spec_data(t, spec),
                       doctest::Contains("target"), Error);
}

TEST_CASE("suite runs, skips impossible specs and stays deterministic") {
  // ages 14..15 only: threshold-14 has a single class -> C specs skip
  const PaiTable t = tiny_table(6, 12, {14, 15});

  std::vector<ExperimentSpec> specs = build_group_c();
  {
    auto a = build_group_a({14, 15});
    specs.insert(specs.end(), a.begin(), a.end());
  }

  SuiteOptions opts;
  opts.seed = 5;
  opts.folds = 4;
  opts.epochs = 8;
  opts.jobs = 2;
  opts.with_timestamp = false;

  const SuiteResult result = run_suite(t, specs, opts);
  REQUIRE(result.outcomes.size() == specs.size());
  int skipped = 0, ok = 0;
  for (const auto& o : result.outcomes) {
    if (o.report) {
      ++ok;
      CHECK(o.report->summed_confusion.total() ==
            static_cast<long>(o.rows_used));
    } else {
      ++skipped;
      CHECK_FALSE(o.error.empty());
    }
  }
  CHECK(skipped == 6);  // every group C spec lacks a second class
  CHECK(ok == 3);       // two per-age sex specs + the global one

  TempDir tmp;
  write_suite_reports(result, tmp.file("run1"));
  const SuiteResult again = run_suite(t, specs, opts);
  write_suite_reports(again, tmp.file("run2"));
  for (const auto& o : result.outcomes) {
    const std::string rel = o.spec.id + "/report.json";
    CHECK(paikit_test::read_file(tmp.file("run1") + "/" + rel) ==
          paikit_test::read_file(tmp.file("run2") + "/" + rel));
  }
  CHECK(paikit_test::read_file(tmp.file("run1") + "/suite.json") ==
        paikit_test::read_file(tmp.file("run2") + "/suite.json"));

  // confusion csv row sums match per-class supports
  const std::string csv =
      paikit_test::read_file(tmp.file("run1") + "/A_t2_all/confusion.csv");
  CHECK(csv.substr(0, 10) == "true_label");
}

TEST_CASE("suite seed changes the outcome") {
  const PaiTable t = tiny_table(7, 10, {6, 20});
  const auto specs = build_group_a({});  // just the global spec
  SuiteOptions a;
  a.seed = 1;
  a.folds = 5;
  a.epochs = 6;
  a.with_timestamp = false;
  SuiteOptions b = a;
  b.seed = 2;
  const SuiteResult ra = run_suite(t, specs, a);
  const SuiteResult rb = run_suite(t, specs, b);
  REQUIRE(ra.outcomes[0].report.has_value());
  REQUIRE(rb.outcomes[0].report.has_value());
  // different fold assignments virtually always shift some fold score
  bool differ = false;
  for (std::size_t f = 0; f < ra.outcomes[0].report->fold_scores.size(); ++f) {
    if (ra.outcomes[0].report->fold_scores[f].macro_f1 !=
        rb.outcomes[0].report->fold_scores[f].macro_f1) {
      differ = true;
    }
  }
  CHECK(differ);
}
