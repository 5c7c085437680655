#include "core/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "core/special.hpp"

namespace paikit {

namespace {

// type 7 quantile over a sorted vector
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted.back();
  return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BoxplotSummary boxplot_summary(std::vector<double> values) {
  if (values.size() < 5) {
    fail(ErrorKind::DegenerateSample,
         "boxplot requires at least 5 values, got " +
             std::to_string(values.size()));
  }
  std::sort(values.begin(), values.end());
  BoxplotSummary s;
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q3;
  s.whisker_high = s.q1;
  bool any_inlier = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
    } else {
      if (!any_inlier) {
        s.whisker_low = v;
        any_inlier = true;
      }
      s.whisker_high = v;
    }
  }
  if (!any_inlier) {
    // cannot happen: the median always lies inside the fences
    s.whisker_low = s.whisker_high = s.median;
  }
  return s;
}

ShapiroWilkResult shapiro_wilk(std::vector<double> x) {
  const std::size_t n = x.size();
  if (n < 3 || n > 5000) {
    fail(ErrorKind::Unsupported,
         "shapiro_wilk supports 3 <= n <= 5000, got " + std::to_string(n));
  }
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() <= 0.0) {
    fail(ErrorKind::DegenerateSample,
         "shapiro_wilk: sample has zero range");
  }

  // AS R94 polynomial coefficients (Royston 1995), low order first.
  static const double c1[6] = {0.0, 0.221157, -0.147981, -2.071190,
                               4.434685, -2.706056};
  static const double c2[6] = {0.0, 0.042981, -0.293762, -1.752461,
                               5.682633, -3.582633};
  static const double c3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static const double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static const double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static const double c6[3] = {-0.4803, -0.082676, 0.0030302};
  static const double g[2] = {-2.273, 0.459};

  const auto poly = [](const double* c, int nord, double v) {
    double r = c[nord - 1];
    for (int i = nord - 2; i >= 0; --i) r = r * v + c[i];
    return r;
  };

  const double an = static_cast<double>(n);
  const std::size_t n2 = n / 2;
  std::vector<double> a(n2);

  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    double summ2 = 0.0;
    for (std::size_t i = 0; i < n2; ++i) {
      a[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) /
                             (an + 0.25));
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - a[0] / ssumm2;
    std::size_t first_unadjusted;
    double fac;
    if (n > 5) {
      const double a2 = poly(c2, 6, rsn) - a[1] / ssumm2;
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[0] = a1;
      a[1] = a2;
      first_unadjusted = 2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
      a[0] = a1;
      first_unadjusted = 1;
    }
    for (std::size_t i = first_unadjusted; i < n2; ++i) a[i] = -a[i] / fac;
  }

  // W as the squared correlation between sorted data and coefficients;
  // 1 - W is accumulated directly to avoid cancellation near W = 1.
  // The full coefficient vector is antisymmetric, so its mean is zero.
  const double range = x.back() - x.front();
  double sx = 0.0;
  for (double v : x) sx += v / range;
  sx /= an;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double coef;
    if (i < n2) {
      coef = a[i];
    } else if (n - 1 - i < n2) {
      coef = -a[n - 1 - i];
    } else {
      coef = 0.0;  // middle element of an odd-sized sample
    }
    const double xsx = x[i] / range - sx;
    ssa += coef * coef;
    ssx += xsx * xsx;
    sax += coef * xsx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  ShapiroWilkResult res;
  res.w = w;
  if (n == 3) {
    const double pi6 = 1.90985931710274;   // 6/pi
    const double stqr = 1.04719755119660;  // asin(sqrt(3/4))
    res.p_value = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
    return res;
  }
  const double y = std::log(w1);
  const double log_n = std::log(an);
  double m, s;
  if (n <= 11) {
    const double gamma = poly(g, 2, an);
    if (y >= gamma) {
      res.p_value = 1e-99;
      return res;
    }
    const double yt = -std::log(gamma - y);
    m = poly(c3, 4, an);
    s = std::exp(poly(c4, 4, an));
    res.p_value = normal_sf((yt - m) / s);
    return res;
  }
  m = poly(c5, 4, log_n);
  s = std::exp(poly(c6, 3, log_n));
  res.p_value = normal_sf((y - m) / s);
  return res;
}

namespace {

struct Design {
  std::vector<int> age_levels;       // sorted ascending
  Eigen::MatrixXd x_full;            // intercept | sex | age | sex:age
  int cols_intercept = 1;
  int cols_sex = 1;
  int cols_age = 0;
  int cols_interaction = 0;
};

Design build_design(const PaiTable& table) {
  const std::size_t n = table.rows();
  std::set<int> ages(table.ages.begin(), table.ages.end());
  Design d;
  d.age_levels.assign(ages.begin(), ages.end());
  if (d.age_levels.size() < 2) {
    fail(ErrorKind::Design, "two-way anova requires at least 2 age levels");
  }
  std::map<std::pair<int, int>, long> cell_counts;
  for (std::size_t r = 0; r < n; ++r) {
    cell_counts[{table.sexes[r] == Sex::Male ? 1 : 0, table.ages[r]}]++;
  }
  bool both_sexes = false;
  {
    std::set<int> sexes_seen;
    for (Sex s : table.sexes) sexes_seen.insert(s == Sex::Male ? 1 : 0);
    both_sexes = sexes_seen.size() == 2;
  }
  if (!both_sexes) {
    fail(ErrorKind::Design, "two-way anova requires both sexes present");
  }
  for (int sex = 0; sex < 2; ++sex) {
    for (int age : d.age_levels) {
      if (cell_counts.find({sex, age}) == cell_counts.end()) {
        fail(ErrorKind::Design,
             "empty design cell: sex=" + std::string(1, sex ? 'M' : 'F') +
                 " age=" + std::to_string(age));
      }
    }
  }

  const int n_age = static_cast<int>(d.age_levels.size()) - 1;
  d.cols_age = n_age;
  d.cols_interaction = n_age;
  const int p = 2 + 2 * n_age;
  d.x_full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), p);
  for (std::size_t r = 0; r < n; ++r) {
    const double male = table.sexes[r] == Sex::Male ? 1.0 : 0.0;
    d.x_full(r, 0) = 1.0;
    d.x_full(r, 1) = male;
    const auto it = std::lower_bound(d.age_levels.begin(), d.age_levels.end(),
                                     table.ages[r]);
    const int level = static_cast<int>(it - d.age_levels.begin());
    if (level > 0) {
      d.x_full(r, 1 + level) = 1.0;
      d.x_full(r, 1 + n_age + level) = male;
    }
  }
  return d;
}

// residual sum of squares of least squares on the first p columns
double rss_prefix(const Eigen::MatrixXd& x, int p, const Eigen::VectorXd& y,
                  int* rank_out) {
  const Eigen::MatrixXd xp = x.leftCols(p);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xp);
  if (rank_out) *rank_out = static_cast<int>(qr.rank());
  const Eigen::VectorXd beta = qr.solve(y);
  return (y - xp * beta).squaredNorm();
}

}  // namespace

AnovaTable two_way_anova(const PaiTable& table, int pai_index) {
  if (pai_index < 1 || pai_index > kPaiCount) {
    fail(ErrorKind::Config, "pai_index must be in 1..208");
  }
  const std::size_t n = table.rows();
  if (n == 0) fail(ErrorKind::Design, "empty table");

  const Design d = build_design(table);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) y(r) = table.at(r, pai_index - 1);

  const double mean = y.mean();
  const double ss_total = (y.array() - mean).matrix().squaredNorm();

  const int p0 = 1;
  const int p1 = 2;
  const int p2 = 2 + d.cols_age;
  const int p3 = 2 + d.cols_age + d.cols_interaction;

  int rank1 = 0, rank2 = 0, rank3 = 0;
  const double rss0 = ss_total;
  const double rss1 = rss_prefix(d.x_full, p1, y, &rank1);
  const double rss2 = rss_prefix(d.x_full, p2, y, &rank2);
  const double rss3 = rss_prefix(d.x_full, p3, y, &rank3);

  AnovaTable t;
  t.pai_index = pai_index;
  t.ss_total = ss_total;
  t.sex.ss = std::max(0.0, rss0 - rss1);
  t.sex.df = rank1 - p0;
  t.age.ss = std::max(0.0, rss1 - rss2);
  t.age.df = rank2 - rank1;
  t.interaction.ss = std::max(0.0, rss2 - rss3);
  t.interaction.df = rank3 - rank2;
  t.ss_residual = std::max(0.0, rss3);
  t.df_residual = static_cast<int>(n) - rank3;
  if (t.df_residual <= 0) {
    fail(ErrorKind::Design,
         "zero residual degrees of freedom (need replication within cells)");
  }
  const double ms_res = t.ss_residual / t.df_residual;
  for (AnovaFactor* f : {&t.sex, &t.age, &t.interaction}) {
    if (f->df <= 0) {
      fail(ErrorKind::Design, "factor with zero degrees of freedom");
    }
    const double ms = f->ss / f->df;
    if (ms_res > 0.0) {
      f->f = ms / ms_res;
    } else {
      f->f = f->ss > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    f->p = f_sf(f->f, f->df, t.df_residual);
  }
  return t;
}

void run_descriptives(const PaiTable& table, const std::string& out_dir,
                      const DescriptivesOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  std::set<int> age_set(table.ages.begin(), table.ages.end());
  const std::vector<int> ages(age_set.begin(), age_set.end());

  // cell index: rows grouped by (sex, age)
  std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    cells[{table.sexes[r] == Sex::Male ? 1 : 0, table.ages[r]}].push_back(r);
  }

  std::ofstream box(fs::path(out_dir) / "boxplots.csv",
                    std::ios::binary | std::ios::trunc);
  std::ofstream shap(fs::path(out_dir) / "shapiro.csv",
                     std::ios::binary | std::ios::trunc);
  std::ofstream anov(fs::path(out_dir) / "anova.csv",
                     std::ios::binary | std::ios::trunc);
  if (!box || !shap || !anov) {
    fail(ErrorKind::Io, "cannot create output files in " + out_dir);
  }

  box << "pai_index,sex,age,n,q1,median,q3,whisker_low,whisker_high,"
         "n_outliers\n";
  shap << "pai_index,sex,age,n,status,w,p_value,non_normal_at_alpha\n";
  anov << "pai_index,status,ss_sex,df_sex,f_sex,p_sex,sig_sex,"
          "ss_age,df_age,f_age,p_age,sig_age,"
          "ss_interaction,df_interaction,f_interaction,p_interaction,"
          "sig_interaction,ss_residual,df_residual,ss_total\n";

  const auto fmt = [](double v) { return format_value(v); };

  for (int pai = 1; pai <= kPaiCount; ++pai) {
    for (int sex = 0; sex < 2; ++sex) {
      for (int age : ages) {
        const auto it = cells.find({sex, age});
        if (it == cells.end()) continue;
        std::vector<double> vals;
        vals.reserve(it->second.size());
        for (std::size_t r : it->second) vals.push_back(table.at(r, pai - 1));
        const char sex_c = sex ? 'M' : 'F';

        box << pai << ',' << sex_c << ',' << age << ',' << vals.size();
        if (vals.size() >= 5) {
          const BoxplotSummary b = boxplot_summary(vals);
          box << ',' << fmt(b.q1) << ',' << fmt(b.median) << ',' << fmt(b.q3)
              << ',' << fmt(b.whisker_low) << ',' << fmt(b.whisker_high)
              << ',' << b.outliers.size() << '\n';
        } else {
          box << ",,,,,,\n";
        }

        shap << pai << ',' << sex_c << ',' << age << ',' << vals.size();
        try {
          const ShapiroWilkResult sw = shapiro_wilk(vals);
          shap << ",ok," << fmt(sw.w) << ',' << fmt(sw.p_value) << ','
               << (sw.p_value < options.alpha ? 1 : 0) << '\n';
        } catch (const Error&) {
          shap << ",degenerate,,,\n";
        }
      }
    }

    bool constant_column = true;
    for (std::size_t r = 1; r < table.rows() && constant_column; ++r) {
      constant_column = table.at(r, pai - 1) == table.at(0, pai - 1);
    }

    anov << pai;
    try {
      if (constant_column) {
        fail(ErrorKind::DegenerateSample, "constant feature column");
      }
      const AnovaTable a = two_way_anova(table, pai);
      anov << ",ok";
      for (const AnovaFactor* f : {&a.sex, &a.age, &a.interaction}) {
        anov << ',' << fmt(f->ss) << ',' << f->df << ',' << fmt(f->f) << ','
             << fmt(f->p) << ',' << (f->p < options.alpha ? 1 : 0);
      }
      anov << ',' << fmt(a.ss_residual) << ',' << a.df_residual << ','
           << fmt(a.ss_total) << '\n';
    } catch (const Error&) {
      anov << ",degenerate,,,,,,,,,,,,,,,,,,\n";
    }
  }
}

}  // namespace paikit
