#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/common.hpp"

namespace paikit {

// The 18 cephalometric landmark names in canonical order: 8 midline
// landmarks first, then the 10 bilateral ones.
enum class LandmarkName : int {
  Glabella = 0,
  Nasion,
  Subnasale,
  LabialeSuperius,
  Stomion,
  LabialeInferius,
  Gnathion,
  Midnasal,
  Entocanthion,
  Exocanthion,
  IridionLaterale,
  IridionMediale,
  Pupil,
  Zygion,
  Alare,
  Gonion,
  Cheilion,
  CristaPhiltri,
};

inline constexpr int kMidlineCount = 8;
inline constexpr int kBilateralCount = 10;
inline constexpr int kLandmarkSlots = kMidlineCount + 2 * kBilateralCount;  // 28

enum class Side { Midline, Left, Right };

constexpr bool is_midline(LandmarkName n) {
  return static_cast<int>(n) < kMidlineCount;
}

// "glabella", "iridion_laterale", ... lower_snake identifiers used in CSV
// headers and definition listings.
std::string_view landmark_token(LandmarkName n);

// Caple-Stephan style abbreviation: "g'", "il", ...
std::string_view landmark_abbrev(LandmarkName n);

struct LandmarkId {
  LandmarkName name;
  Side side;
};

// Validates the (name, side) combination; exactly 28 are admissible.
bool landmark_id_valid(LandmarkId id);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double euclidean_distance(Point a, Point b);

// All 28 landmark coordinates of one face, indexed by (name, side).
// Coordinates follow the image convention: x rightward, y downward,
// origin at the top-left corner.
class LandmarkSet {
 public:
  Point at(LandmarkName name, Side side = Side::Midline) const;
  void set(LandmarkName name, Side side, Point p);
  void set(LandmarkName name, Point p) { set(name, Side::Midline, p); }

  Point at_slot(int slot) const { return points_[slot]; }
  void set_slot(int slot, Point p) { points_[slot] = p; }

  // Throws Error(Validation) on non-finite coordinates and
  // Error(DegenerateGeometry) when an eye has coincident iridion points.
  void validate() const;

  static int slot(LandmarkName name, Side side);
  static LandmarkId slot_id(int slot);

 private:
  std::array<Point, kLandmarkSlots> points_{};
};

enum class Sex : std::uint8_t { Female, Male };

inline constexpr int kMinAge = 5;
inline constexpr int kMaxAge = 22;

char sex_token(Sex s);                    // 'F' or 'M'
Sex parse_sex_token(std::string_view t);  // case-insensitive, throws on junk

struct FaceRecord {
  std::string subject_id;
  Sex sex = Sex::Female;
  int age = kMinAge;
  LandmarkSet landmarks;

  void validate() const;
};

struct Provenance {
  std::string source;
  std::uint64_t checksum = 0;
};

struct Dataset {
  std::vector<FaceRecord> records;
  Provenance provenance;
};

}  // namespace paikit
