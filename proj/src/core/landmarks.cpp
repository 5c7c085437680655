#include "core/landmarks.hpp"

#include <cmath>

namespace paikit {

namespace {

constexpr std::string_view kTokens[18] = {
    "glabella",        "nasion",          "subnasale",
    "labiale_superius", "stomion",         "labiale_inferius",
    "gnathion",        "midnasal",        "entocanthion",
    "exocanthion",     "iridion_laterale", "iridion_mediale",
    "pupil",           "zygion",          "alare",
    "gonion",          "cheilion",        "crista_philtri",
};

constexpr std::string_view kAbbrevs[18] = {
    "g'",  "n'",  "sn'", "ls'", "sto'", "li'", "gn'", "m'",  "en'",
    "ex'", "il",  "im",  "pu'", "zy'",  "al'", "go'", "ch'", "cph'",
};

}  // namespace

std::string_view landmark_token(LandmarkName n) {
  return kTokens[static_cast<int>(n)];
}

std::string_view landmark_abbrev(LandmarkName n) {
  return kAbbrevs[static_cast<int>(n)];
}

bool landmark_id_valid(LandmarkId id) {
  if (is_midline(id.name)) return id.side == Side::Midline;
  return id.side == Side::Left || id.side == Side::Right;
}

double euclidean_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

int LandmarkSet::slot(LandmarkName name, Side side) {
  const LandmarkId id{name, side};
  if (!landmark_id_valid(id)) {
    fail(ErrorKind::Validation,
         std::string("invalid landmark side for ") +
             std::string(landmark_token(name)));
  }
  const int n = static_cast<int>(name);
  if (is_midline(name)) return n;
  const int pair = n - kMidlineCount;
  return kMidlineCount + 2 * pair + (side == Side::Right ? 1 : 0);
}

LandmarkId LandmarkSet::slot_id(int slot) {
  if (slot < kMidlineCount) {
    return {static_cast<LandmarkName>(slot), Side::Midline};
  }
  const int pair = (slot - kMidlineCount) / 2;
  const Side side =
      (slot - kMidlineCount) % 2 == 0 ? Side::Left : Side::Right;
  return {static_cast<LandmarkName>(kMidlineCount + pair), side};
}

Point LandmarkSet::at(LandmarkName name, Side side) const {
  return points_[slot(name, side)];
}

void LandmarkSet::set(LandmarkName name, Side side, Point p) {
  points_[slot(name, side)] = p;
}

void LandmarkSet::validate() const {
  for (int s = 0; s < kLandmarkSlots; ++s) {
    const Point p = points_[s];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      const LandmarkId id = slot_id(s);
      fail(ErrorKind::Validation,
           "non-finite coordinate for landmark " +
               std::string(landmark_token(id.name)));
    }
  }
  for (Side side : {Side::Left, Side::Right}) {
    const Point im = at(LandmarkName::IridionMediale, side);
    const Point il = at(LandmarkName::IridionLaterale, side);
    if (euclidean_distance(im, il) == 0.0) {
      fail(ErrorKind::DegenerateGeometry,
           std::string("coincident iridion points on the ") +
               (side == Side::Left ? "left" : "right") + " eye");
    }
  }
}

char sex_token(Sex s) { return s == Sex::Female ? 'F' : 'M'; }

Sex parse_sex_token(std::string_view t) {
  if (t.size() == 1) {
    const char c = t[0];
    if (c == 'F' || c == 'f') return Sex::Female;
    if (c == 'M' || c == 'm') return Sex::Male;
  }
  fail(ErrorKind::Validation,
       "unknown sex token '" + std::string(t) + "' (expected F or M)");
}

void FaceRecord::validate() const {
  if (subject_id.empty()) {
    fail(ErrorKind::Validation, "empty subject_id");
  }
  if (age < kMinAge || age > kMaxAge) {
    fail(ErrorKind::Validation,
         "age " + std::to_string(age) + " outside [" +
             std::to_string(kMinAge) + ", " + std::to_string(kMaxAge) +
             "] for subject " + subject_id);
  }
  landmarks.validate();
}

}  // namespace paikit
