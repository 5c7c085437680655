#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "core/landmarks.hpp"

namespace paikit {

// Linear growth model for one landmark coordinate pair:
//   position(age, sex) = base + age_slope*age + sex_offset*[male]
//                        + interaction_slope*[male]*age + noise
// with age in years and independent Gaussian noise per coordinate.
struct GrowthModel {
  struct Track {
    Point base;
    Point age_slope;          // pixels per year
    Point sex_offset;         // pixels, added for males
    Point interaction_slope;  // pixels per year, added for males
  };

  std::array<Track, kLandmarkSlots> tracks{};
  double noise_std = 0.0;  // pixels, per coordinate
  std::uint64_t seed = 0;

  void validate() const;
};

// Fixed parameterization within a 480x640 frame: facial distances grow
// with age while the iris diameter stays constant; male jaw and facial
// width exceed female values by a margin that widens with age; within-eye
// iridion geometry is identical on both eyes.
GrowthModel default_growth_model(std::uint64_t seed);

// Scales the male-female separation (sex offsets and interaction slopes).
GrowthModel with_dimorphism_gain(GrowthModel model, double gain);

// Balanced dataset with n_per_cell records per (sex, age) cell, ages and
// sexes iterated in ascending order. Record noise derives from a
// per-record key, so generation is order-independent and reproducible.
Dataset generate(const GrowthModel& model, int n_per_cell,
                 const std::vector<int>& ages, const std::vector<Sex>& sexes);

// All 18 ages, both sexes.
Dataset generate_default(std::uint64_t seed, int n_per_cell);

}  // namespace paikit
