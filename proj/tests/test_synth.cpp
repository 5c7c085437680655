#include "doctest.h"

#include <algorithm>
#include <map>
#include <vector>

#include "core/ingest.hpp"
#include "core/pai.hpp"
#include "core/stats.hpp"
#include "core/synth.hpp"
#include "test_util.hpp"

using namespace paikit;
using paikit_test::TempDir;

namespace {

std::vector<int> all_ages() {
  std::vector<int> v;
  for (int a = kMinAge; a <= kMaxAge; ++a) v.push_back(a);
  return v;
}

int pai_index_of(PaiKind kind, LandmarkName a, LandmarkName b) {
  for (const PaiDefinition& d : pai_definitions()) {
    if (d.kind == kind &&
        ((d.a == a && d.b == b) || (d.a == b && d.b == a))) {
      return d.index;
    }
  }
  return -1;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double cell_median(const PaiTable& t, int pai_index, Sex sex, int age) {
  std::vector<double> vals;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.sexes[r] == sex && t.ages[r] == age) {
      vals.push_back(t.at(r, pai_index - 1));
    }
  }
  return median_of(std::move(vals));
}

}  // namespace

TEST_CASE("generation produces the requested balanced cells") {
  const Dataset ds = generate_default(42, 5);
  CHECK(ds.records.size() == 5 * 18 * 2);
  std::map<std::pair<int, int>, int> cells;
  for (const auto& r : ds.records) {
    cells[{r.sex == Sex::Male ? 1 : 0, r.age}]++;
  }
  CHECK(cells.size() == 36);
  for (const auto& [key, n] : cells) CHECK(n == 5);
}

TEST_CASE("generation is deterministic per seed and varies across seeds") {
  TempDir tmp;
  write_landmark_csv(generate_default(7, 3), tmp.file("a.csv"));
  write_landmark_csv(generate_default(7, 3), tmp.file("b.csv"));
  write_landmark_csv(generate_default(8, 3), tmp.file("c.csv"));
  const std::string a = paikit_test::read_file(tmp.file("a.csv"));
  CHECK(a == paikit_test::read_file(tmp.file("b.csv")));
  CHECK(a != paikit_test::read_file(tmp.file("c.csv")));
}

TEST_CASE("collapsed model makes the sexes identical") {
  GrowthModel m = default_growth_model(1);
  m.noise_std = 0.0;
  m = with_dimorphism_gain(m, 0.0);
  const Dataset ds = generate(m, 1, {9}, {Sex::Female, Sex::Male});
  REQUIRE(ds.records.size() == 2);
  for (int s = 0; s < kLandmarkSlots; ++s) {
    CHECK(ds.records[0].landmarks.at_slot(s).x ==
          ds.records[1].landmarks.at_slot(s).x);
    CHECK(ds.records[0].landmarks.at_slot(s).y ==
          ds.records[1].landmarks.at_slot(s).y);
  }
}

TEST_CASE("generated faces stay inside the 480x640 frame") {
  const Dataset ds = generate_default(3, 3);
  for (const auto& rec : ds.records) {
    for (int s = 0; s < kLandmarkSlots; ++s) {
      const Point p = rec.landmarks.at_slot(s);
      CHECK(p.x > 0.0);
      CHECK(p.x < 480.0);
      CHECK(p.y > 0.0);
      CHECK(p.y < 640.0);
    }
  }
}

TEST_CASE("generated data passes ingest validation with zero rejects") {
  TempDir tmp;
  const Dataset ds = generate_default(4, 4);
  write_landmark_csv(ds, tmp.file("lm.csv"));
  const Dataset parsed = parse_landmark_csv(tmp.file("lm.csv"));
  CHECK(parsed.records.size() == ds.records.size());
  std::vector<PaiReject> rejects;
  const PaiTable t = compute_dataset_pais(parsed, &rejects);
  CHECK(rejects.empty());
  CHECK(t.rows() == ds.records.size());
}

TEST_CASE("alare-gnathion index grows with age and shows widening dimorphism") {
  const int idx = pai_index_of(PaiKind::MidlineBilateral,
                               LandmarkName::Gnathion, LandmarkName::Alare);
  REQUIRE(idx > 0);
  const Dataset ds = generate(default_growth_model(1), 500, {5, 8, 22},
                              {Sex::Female, Sex::Male});
  const PaiTable t = compute_dataset_pais(ds);

  const double male5 = cell_median(t, idx, Sex::Male, 5);
  const double male8 = cell_median(t, idx, Sex::Male, 8);
  const double male22 = cell_median(t, idx, Sex::Male, 22);
  const double female8 = cell_median(t, idx, Sex::Female, 8);
  const double female22 = cell_median(t, idx, Sex::Female, 22);

  CHECK(male22 > male5);
  CHECK(male22 - female22 > male8 - female8);
  CHECK(male8 - female8 > 0.0);
}

TEST_CASE("within-eye iridion index self-normalizes to exactly one") {
  const int idx = pai_index_of(PaiKind::SameSide, LandmarkName::IridionLaterale,
                               LandmarkName::IridionMediale);
  REQUIRE(idx > 0);
  const PaiTable t = compute_dataset_pais(generate_default(11, 4));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    CHECK(t.at(r, idx - 1) == 1.0);
  }
}

TEST_CASE("embedded effects register as significant in the anova") {
  const int idx = pai_index_of(PaiKind::MidlineBilateral,
                               LandmarkName::Gnathion, LandmarkName::Alare);
  const PaiTable t = compute_dataset_pais(generate_default(2, 50));
  const AnovaTable a = two_way_anova(t, idx);
  CHECK(a.sex.p < 0.01);
  CHECK(a.age.p < 0.01);
  CHECK(a.interaction.p < 0.01);
}

TEST_CASE("degenerate growth model is rejected") {
  GrowthModel m = default_growth_model(1);
  // collapse both irides
  for (Side side : {Side::Left, Side::Right}) {
    m.tracks[LandmarkSet::slot(LandmarkName::IridionLaterale, side)] =
        m.tracks[LandmarkSet::slot(LandmarkName::IridionMediale, side)];
  }
  CHECK_THROWS_WITH_AS(generate(m, 1, {10}, {Sex::Female}),
                       doctest::Contains("degenerate"), Error);
  CHECK_THROWS_AS(generate(default_growth_model(1), 0, {10}, {Sex::Female}),
                  Error);
}
