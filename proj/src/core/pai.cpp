#include "core/pai.hpp"

namespace paikit {

std::string_view pai_kind_token(PaiKind k) {
  switch (k) {
    case PaiKind::MidlineMidline: return "midline-midline";
    case PaiKind::MidlineBilateral: return "midline-bilateral";
    case PaiKind::SameSide: return "bilateral-same-side";
    case PaiKind::CrossSide: return "bilateral-cross-side";
    case PaiKind::LeftRight: return "bilateral-left-right";
  }
  return "?";
}

namespace {

std::string describe(PaiKind kind, LandmarkName a, LandmarkName b) {
  const std::string ta(landmark_token(a));
  const std::string tb(landmark_token(b));
  switch (kind) {
    case PaiKind::MidlineMidline:
      return ta + " - " + tb;
    case PaiKind::MidlineBilateral:
      return ta + " - " + tb + " (left/right mean)";
    case PaiKind::SameSide:
      return ta + " - " + tb + " (same side mean)";
    case PaiKind::CrossSide:
      return ta + " - " + tb + " (cross side mean)";
    case PaiKind::LeftRight:
      return ta + " left - " + ta + " right";
  }
  return {};
}

std::vector<PaiDefinition> build_definitions() {
  std::vector<PaiDefinition> defs;
  defs.reserve(kPaiCount);
  int index = 1;
  const auto add = [&](PaiKind kind, int a, int b) {
    const auto la = static_cast<LandmarkName>(a);
    const auto lb = static_cast<LandmarkName>(b);
    defs.push_back({index++, kind, la, lb, describe(kind, la, lb)});
  };

  for (int a = 0; a < kMidlineCount; ++a)
    for (int b = a + 1; b < kMidlineCount; ++b)
      add(PaiKind::MidlineMidline, a, b);

  for (int a = 0; a < kMidlineCount; ++a)
    for (int b = kMidlineCount; b < 18; ++b)
      add(PaiKind::MidlineBilateral, a, b);

  for (int a = kMidlineCount; a < 18; ++a)
    for (int b = a + 1; b < 18; ++b)
      add(PaiKind::SameSide, a, b);

  for (int a = kMidlineCount; a < 18; ++a)
    for (int b = a + 1; b < 18; ++b)
      add(PaiKind::CrossSide, a, b);

  for (int a = kMidlineCount; a < 18; ++a)
    add(PaiKind::LeftRight, a, a);

  return defs;
}

}  // namespace

const std::vector<PaiDefinition>& pai_definitions() {
  static const std::vector<PaiDefinition> defs = build_definitions();
  return defs;
}

double iris_ratio(const LandmarkSet& lm) {
  const double left = euclidean_distance(
      lm.at(LandmarkName::IridionMediale, Side::Left),
      lm.at(LandmarkName::IridionLaterale, Side::Left));
  const double right = euclidean_distance(
      lm.at(LandmarkName::IridionMediale, Side::Right),
      lm.at(LandmarkName::IridionLaterale, Side::Right));
  if (left == 0.0 || right == 0.0) {
    fail(ErrorKind::DegenerateGeometry,
         "zero iris diameter (coincident iridion points)");
  }
  return (left + right) / 2.0;
}

std::array<double, kPaiCount> compute_pai_vector(const LandmarkSet& lm) {
  const double ratio = iris_ratio(lm);
  std::array<double, kPaiCount> out{};
  const auto& defs = pai_definitions();
  for (std::size_t i = 0; i < defs.size(); ++i) {
    const PaiDefinition& d = defs[i];
    double dist = 0.0;
    switch (d.kind) {
      case PaiKind::MidlineMidline:
        dist = euclidean_distance(lm.at(d.a), lm.at(d.b));
        break;
      case PaiKind::MidlineBilateral:
        dist = (euclidean_distance(lm.at(d.a), lm.at(d.b, Side::Left)) +
                euclidean_distance(lm.at(d.a), lm.at(d.b, Side::Right))) /
               2.0;
        break;
      case PaiKind::SameSide:
        dist = (euclidean_distance(lm.at(d.a, Side::Left),
                                   lm.at(d.b, Side::Left)) +
                euclidean_distance(lm.at(d.a, Side::Right),
                                   lm.at(d.b, Side::Right))) /
               2.0;
        break;
      case PaiKind::CrossSide:
        dist = (euclidean_distance(lm.at(d.a, Side::Left),
                                   lm.at(d.b, Side::Right)) +
                euclidean_distance(lm.at(d.a, Side::Right),
                                   lm.at(d.b, Side::Left))) /
               2.0;
        break;
      case PaiKind::LeftRight:
        dist = euclidean_distance(lm.at(d.a, Side::Left),
                                  lm.at(d.a, Side::Right));
        break;
    }
    out[i] = dist / ratio;
  }
  return out;
}

PaiTable compute_dataset_pais(const Dataset& dataset,
                              std::vector<PaiReject>* rejects) {
  PaiTable t;
  t.subject_ids.reserve(dataset.records.size());
  t.features.reserve(dataset.records.size() * kPaiCount);
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const FaceRecord& rec = dataset.records[i];
    std::array<double, kPaiCount> v{};
    try {
      v = compute_pai_vector(rec.landmarks);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateGeometry) throw;
      if (rejects) rejects->push_back({i, rec.subject_id, e.what()});
      continue;
    }
    t.subject_ids.push_back(rec.subject_id);
    t.sexes.push_back(rec.sex);
    t.ages.push_back(rec.age);
    t.features.insert(t.features.end(), v.begin(), v.end());
  }
  return t;
}

}  // namespace paikit
