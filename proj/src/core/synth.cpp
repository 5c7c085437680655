#include "core/synth.hpp"

#include <cmath>
#include <cstdio>

#include "core/pai.hpp"
#include "core/rng.hpp"

namespace paikit {

namespace {

// Age-5 template offsets from the face center, image frame 480x640,
// y pointing down. Bilateral entries hold the right-side offset; the
// left side mirrors x.
struct TemplateEntry {
  LandmarkName name;
  double dx;
  double dy;
  double growth_rate;       // fraction of the offset per year
  double sex_const;         // male extra scale, constant part
  double sex_rate;          // male extra scale per year
};

constexpr double kCenterX = 240.0;
constexpr double kCenterY = 310.0;
constexpr double kTemplateAge = 5.0;
constexpr double kDefaultNoiseStd = 2.4;

// Lower face grows fastest and carries most of the sex difference;
// the eye belt is nearly static so iris-relative features stay stable.
constexpr TemplateEntry kTemplate[] = {
    {LandmarkName::Glabella, 0.0, -110.0, 0.009, 0.0005, 0.0009},
    {LandmarkName::Nasion, 0.0, -85.0, 0.009, 0.0004, 0.0003},
    {LandmarkName::Subnasale, 0.0, 8.0, 0.017, 0.0004, 0.0003},
    {LandmarkName::LabialeSuperius, 0.0, 40.0, 0.019, 0.0004, 0.0003},
    {LandmarkName::Stomion, 0.0, 55.0, 0.019, 0.0004, 0.0003},
    {LandmarkName::LabialeInferius, 0.0, 70.0, 0.019, 0.0004, 0.0003},
    {LandmarkName::Gnathion, 0.0, 130.0, 0.027, -0.0115, 0.0065},
    {LandmarkName::Midnasal, 0.0, -48.0, 0.012, 0.0004, 0.0003},
    {LandmarkName::Entocanthion, 30.0, -70.0, 0.005, 0.0003, 0.0002},
    {LandmarkName::Exocanthion, 72.0, -70.0, 0.005, 0.0003, 0.0002},
    // placeholder rows for the eye landmarks tied to the pupil below
    {LandmarkName::IridionLaterale, 67.0, -70.0, 0.005, 0.0003, 0.0002},
    {LandmarkName::IridionMediale, 37.0, -70.0, 0.005, 0.0003, 0.0002},
    {LandmarkName::Pupil, 52.0, -70.0, 0.005, 0.0003, 0.0002},
    {LandmarkName::Zygion, 95.0, -40.0, 0.012, -0.0020, 0.0018},
    {LandmarkName::Alare, 22.0, 6.0, 0.017, 0.0003, 0.0010},
    {LandmarkName::Gonion, 85.0, 75.0, 0.024, -0.0030, 0.0022},
    {LandmarkName::Cheilion, 30.0, 55.0, 0.019, 0.0003, 0.0008},
    {LandmarkName::CristaPhiltri, 9.0, 32.0, 0.019, 0.0004, 0.0003},
};

// Half of the (constant) iris diameter, applied along x around the pupil.
constexpr double kIrisHalfDiameter = 15.0;

GrowthModel::Track track_for(const TemplateEntry& e, double dx, double dy) {
  // template gives position at kTemplateAge:
  //   pos(age) = center + offset*(1 - rate*kTemplateAge + rate*age)
  GrowthModel::Track t;
  const double base_scale = 1.0 - e.growth_rate * kTemplateAge;
  t.base = {kCenterX + dx * base_scale, kCenterY + dy * base_scale};
  t.age_slope = {dx * e.growth_rate, dy * e.growth_rate};
  t.sex_offset = {dx * e.sex_const, dy * e.sex_const};
  t.interaction_slope = {dx * e.sex_rate, dy * e.sex_rate};
  return t;
}

Point eval_track(const GrowthModel::Track& t, double age, bool male) {
  Point p;
  p.x = t.base.x + t.age_slope.x * age;
  p.y = t.base.y + t.age_slope.y * age;
  if (male) {
    p.x += t.sex_offset.x + t.interaction_slope.x * age;
    p.y += t.sex_offset.y + t.interaction_slope.y * age;
  }
  return p;
}

}  // namespace

void GrowthModel::validate() const {
  if (noise_std < 0.0) {
    fail(ErrorKind::Config, "noise_std must be non-negative");
  }
  for (int age : {kMinAge, kMaxAge}) {
    for (bool male : {false, true}) {
      LandmarkSet lm;
      for (int s = 0; s < kLandmarkSlots; ++s) {
        lm.set_slot(s, eval_track(tracks[s], age, male));
      }
      try {
        lm.validate();
        iris_ratio(lm);
      } catch (const Error& e) {
        fail(ErrorKind::Config,
             std::string("degenerate growth model: ") + e.what());
      }
    }
  }
}

GrowthModel default_growth_model(std::uint64_t seed) {
  GrowthModel m;
  m.seed = seed;
  m.noise_std = kDefaultNoiseStd;
  for (const TemplateEntry& e : kTemplate) {
    if (is_midline(e.name)) {
      m.tracks[LandmarkSet::slot(e.name, Side::Midline)] =
          track_for(e, e.dx, e.dy);
      continue;
    }
    if (e.name == LandmarkName::IridionLaterale ||
        e.name == LandmarkName::IridionMediale) {
      continue;  // derived from the pupil track below
    }
    m.tracks[LandmarkSet::slot(e.name, Side::Right)] =
        track_for(e, e.dx, e.dy);
    m.tracks[LandmarkSet::slot(e.name, Side::Left)] =
        track_for(e, -e.dx, e.dy);
  }
  // iridion points ride on the pupil with a fixed +/- x offset, so the
  // iris diameter is age- and sex-invariant
  for (Side side : {Side::Left, Side::Right}) {
    const GrowthModel::Track pupil =
        m.tracks[LandmarkSet::slot(LandmarkName::Pupil, side)];
    const double toward_midline = side == Side::Left ? 1.0 : -1.0;
    GrowthModel::Track medial = pupil;
    medial.base.x += toward_midline * kIrisHalfDiameter;
    GrowthModel::Track lateral = pupil;
    lateral.base.x -= toward_midline * kIrisHalfDiameter;
    m.tracks[LandmarkSet::slot(LandmarkName::IridionMediale, side)] = medial;
    m.tracks[LandmarkSet::slot(LandmarkName::IridionLaterale, side)] = lateral;
  }
  return m;
}

GrowthModel with_dimorphism_gain(GrowthModel model, double gain) {
  for (auto& t : model.tracks) {
    t.sex_offset.x *= gain;
    t.sex_offset.y *= gain;
    t.interaction_slope.x *= gain;
    t.interaction_slope.y *= gain;
  }
  return model;
}

Dataset generate(const GrowthModel& model, int n_per_cell,
                 const std::vector<int>& ages,
                 const std::vector<Sex>& sexes) {
  if (n_per_cell < 1) {
    fail(ErrorKind::Config, "n_per_cell must be >= 1");
  }
  model.validate();
  Dataset ds;
  ds.records.reserve(static_cast<std::size_t>(n_per_cell) * ages.size() *
                     sexes.size());
  const std::uint64_t base = mix64(model.seed);
  for (int age : ages) {
    if (age < kMinAge || age > kMaxAge) {
      fail(ErrorKind::Config, "age " + std::to_string(age) +
                                  " outside supported range");
    }
    for (Sex sex : sexes) {
      const bool male = sex == Sex::Male;
      const std::uint64_t cell = mix64(
          base ^ (static_cast<std::uint64_t>(age) * 2u + (male ? 1u : 0u)));
      for (int k = 0; k < n_per_cell; ++k) {
        Rng rng(mix64(cell ^ static_cast<std::uint64_t>(k)));
        FaceRecord rec;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "syn_%c%02d_%05d",
                      sex_token(sex), age, k);
        rec.subject_id = buf;
        rec.sex = sex;
        rec.age = age;
        for (int s = 0; s < kLandmarkSlots; ++s) {
          Point p = eval_track(model.tracks[s], age, male);
          p.x += rng.normal(0.0, model.noise_std);
          p.y += rng.normal(0.0, model.noise_std);
          rec.landmarks.set_slot(s, p);
        }
        rec.validate();
        ds.records.push_back(std::move(rec));
      }
    }
  }
  ds.provenance.source = "synthetic:seed=" + std::to_string(model.seed);
  return ds;
}

Dataset generate_default(std::uint64_t seed, int n_per_cell) {
  std::vector<int> ages;
  for (int a = kMinAge; a <= kMaxAge; ++a) ages.push_back(a);
  return generate(default_growth_model(seed), n_per_cell, ages,
                  {Sex::Female, Sex::Male});
}

}  // namespace paikit
