#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/ingest.hpp"

namespace paikit {

// Tukey five-number summary with the 1.5*IQR whisker rule. Quantiles use
// linear interpolation between order statistics (the "type 7" rule).
struct BoxplotSummary {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

// Requires at least 5 values.
BoxplotSummary boxplot_summary(std::vector<double> values);

struct ShapiroWilkResult {
  double w = 0.0;
  double p_value = 1.0;
};

// Royston's AS R94 approximation, valid for 3 <= n <= 5000.
// Throws Error(Unsupported) outside that range and
// Error(DegenerateSample) for zero-variance samples.
ShapiroWilkResult shapiro_wilk(std::vector<double> values);

struct AnovaFactor {
  double ss = 0.0;
  int df = 0;
  double f = 0.0;
  double p = 1.0;
};

// Sequential (Type I) decomposition: sex, then age, then sex x age.
// For balanced designs this coincides with Types II/III.
struct AnovaTable {
  int pai_index = 0;  // 1..208
  AnovaFactor sex;
  AnovaFactor age;
  AnovaFactor interaction;
  double ss_residual = 0.0;
  int df_residual = 0;
  double ss_total = 0.0;
};

AnovaTable two_way_anova(const PaiTable& table, int pai_index);

struct DescriptivesOptions {
  double alpha = 0.01;
};

// Writes boxplots.csv, shapiro.csv and anova.csv into out_dir. Constant
// feature columns are reported with status "degenerate" and the sweep
// continues; output bytes are deterministic for identical input.
void run_descriptives(const PaiTable& table, const std::string& out_dir,
                      const DescriptivesOptions& options = {});

}  // namespace paikit
