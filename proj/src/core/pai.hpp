#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/ingest.hpp"
#include "core/landmarks.hpp"

namespace paikit {

enum class PaiKind {
  MidlineMidline,    // 28 definitions
  MidlineBilateral,  // 80, left/right instances averaged
  SameSide,          // 45, left-left and right-right averaged
  CrossSide,         // 45, the two crossings averaged
  LeftRight,         // 10, one landmark against its own mirror
};

std::string_view pai_kind_token(PaiKind k);

struct PaiDefinition {
  int index = 0;  // 1..208
  PaiKind kind = PaiKind::MidlineMidline;
  LandmarkName a = LandmarkName::Glabella;
  LandmarkName b = LandmarkName::Glabella;
  std::string description;
};

// The canonical ordered list of all 208 PAI definitions. Deterministic:
// categories in the order midline-midline, midline-bilateral, same-side,
// cross-side, left-right; within a category, lexicographic by canonical
// landmark numbering.
const std::vector<PaiDefinition>& pai_definitions();

// Mean of the two within-eye iris diameters, in pixels.
// Throws Error(DegenerateGeometry) when either eye has zero diameter.
double iris_ratio(const LandmarkSet& landmarks);

// All 208 iris-ratio-normalized indexes for one face, canonical order.
std::array<double, kPaiCount> compute_pai_vector(const LandmarkSet& landmarks);

struct PaiReject {
  std::size_t record_index = 0;
  std::string subject_id;
  std::string reason;
};

// One table row per record, in input order; records with degenerate
// geometry are skipped and reported through `rejects`.
PaiTable compute_dataset_pais(const Dataset& dataset,
                              std::vector<PaiReject>* rejects = nullptr);

}  // namespace paikit
