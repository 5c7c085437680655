#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/landmarks.hpp"

namespace paikit {

inline constexpr int kPaiCount = 208;

// Labeled feature table: one row per subject, kPaiCount features in
// canonical index order plus sex and age labels.
struct PaiTable {
  std::vector<std::string> subject_ids;
  std::vector<Sex> sexes;
  std::vector<int> ages;
  std::vector<double> features;  // row-major, rows() x kPaiCount

  std::size_t rows() const { return subject_ids.size(); }
  double at(std::size_t row, int pai_index_zero_based) const {
    return features[row * kPaiCount + pai_index_zero_based];
  }
  const double* row(std::size_t r) const {
    return features.data() + r * kPaiCount;
  }
  void validate() const;
};

// Landmark dataset CSV. One row per face:
//   subject_id, sex, age, then 56 coordinate columns in canonical order
//   (midline landmarks as <name>_x,<name>_y; bilateral landmarks as
//   <name>_left_x,<name>_left_y,<name>_right_x,<name>_right_y).
// Header row required, comma-delimited, '\n' line endings.
Dataset parse_landmark_csv(const std::string& path);
void write_landmark_csv(const Dataset& dataset, const std::string& path);
std::string landmark_csv_header();

// PAI feature table CSV: subject_id, sex, age, pai_001..pai_208.
// Feature values are serialized with 9 significant digits; identical
// tables produce identical bytes.
PaiTable parse_pai_csv(const std::string& path);
void write_pai_csv(const PaiTable& table, const std::string& path);
std::string serialize_pai_csv(const PaiTable& table);

// FNV-1a over the canonical CSV serialization; used as dataset checksum
// in reports.
std::uint64_t table_checksum(const PaiTable& table);
std::uint64_t fnv1a64(const void* data, std::size_t size);

// Fixed-precision float formatting shared by every CSV writer.
std::string format_value(double v);

}  // namespace paikit
