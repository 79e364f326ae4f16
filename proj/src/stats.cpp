#include "forksim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace forksim::stats {

namespace {

// Continued fraction for incbeta, modified Lentz. Converges fast for
// x < (a+1)/(a+b+2); the symmetry transform covers the rest.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3.0e-14;
  constexpr double kFpMin = 1.0e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin)
    d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin)
      d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin)
      c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin)
      d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin)
      c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps)
      break;
  }
  return h;
}

} // namespace

double incbeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("incbeta: a, b must be positive");
  if (x <= 0.0)
    return 0.0;
  if (x >= 1.0)
    return 1.0;
  const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const double front =
      std::exp(lbeta + a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double f_pvalue(double f, int df1, int df2) {
  if (df1 < 1 || df2 < 1)
    throw std::domain_error("f_pvalue: degrees of freedom must be >= 1");
  if (!(f >= 0.0))
    throw std::domain_error("f_pvalue: f must be >= 0");
  if (f == 0.0)
    return 1.0;
  const double d1 = df1, d2 = df2;
  const double x = d2 / (d2 + d1 * f);
  double p = incbeta(d2 / 2.0, d1 / 2.0, x);
  return std::clamp(p, 0.0, 1.0);
}

AnovaTable anova_rcbd(const std::vector<std::vector<double>>& data) {
  const size_t b = data.size();
  if (b < 2)
    throw std::invalid_argument("anova_rcbd: need >= 2 blocks");
  const size_t t = data[0].size();
  if (t < 2)
    throw std::invalid_argument("anova_rcbd: need >= 2 treatments");
  for (const auto& row : data)
    if (row.size() != t)
      throw std::invalid_argument("anova_rcbd: ragged matrix");

  double grand = 0.0;
  for (const auto& row : data)
    grand = std::accumulate(row.begin(), row.end(), grand);
  grand /= static_cast<double>(b * t);

  std::vector<double> block_mean(b, 0.0), trt_mean(t, 0.0);
  for (size_t i = 0; i < b; ++i) {
    for (size_t j = 0; j < t; ++j) {
      block_mean[i] += data[i][j];
      trt_mean[j] += data[i][j];
    }
    block_mean[i] /= static_cast<double>(t);
  }
  for (size_t j = 0; j < t; ++j)
    trt_mean[j] /= static_cast<double>(b);

  double ss_rep = 0.0, ss_trt = 0.0, ss_err = 0.0, ss_total = 0.0;
  for (size_t i = 0; i < b; ++i)
    ss_rep += (block_mean[i] - grand) * (block_mean[i] - grand);
  ss_rep *= static_cast<double>(t);
  for (size_t j = 0; j < t; ++j)
    ss_trt += (trt_mean[j] - grand) * (trt_mean[j] - grand);
  ss_trt *= static_cast<double>(b);
  for (size_t i = 0; i < b; ++i)
    for (size_t j = 0; j < t; ++j) {
      const double r = data[i][j] - block_mean[i] - trt_mean[j] + grand;
      ss_err += r * r;
      const double d = data[i][j] - grand;
      ss_total += d * d;
    }

  const int df_rep = static_cast<int>(b) - 1;
  const int df_trt = static_cast<int>(t) - 1;
  const int df_err = df_rep * df_trt;

  AnovaTable out = anova_from_decomposition(df_rep, ss_rep, df_trt, ss_trt,
                                            df_err, ss_err);
  out.total.ss = ss_total;
  return out;
}

AnovaTable anova_from_decomposition(int df_rep, double ss_rep, int df_trt,
                                    double ss_trt, int df_err, double ss_err) {
  if (df_rep < 1 || df_trt < 1 || df_err < 1)
    throw std::invalid_argument("anova: nonpositive degrees of freedom");

  AnovaTable t;
  t.replication = {"Replication", df_rep, ss_rep, ss_rep / df_rep, {}, {}};
  t.treatment = {"Treatment", df_trt, ss_trt, ss_trt / df_trt, {}, {}};
  t.error = {"Error", df_err, ss_err, ss_err / df_err, {}, {}};
  t.total = {"Total", df_rep + df_trt + df_err, ss_rep + ss_trt + ss_err,
             {}, {}, {}};

  const double ms_err = *t.error.ms;
  if (ms_err > 0.0) {
    t.replication.f = *t.replication.ms / ms_err;
    t.treatment.f = *t.treatment.ms / ms_err;
    t.replication.p = f_pvalue(*t.replication.f, df_rep, df_err);
    t.treatment.p = f_pvalue(*t.treatment.f, df_trt, df_err);
  } else if (ss_rep == 0.0 && ss_trt == 0.0) {
    t.degenerate = true;
  } else {
    // Perfect fit: any nonzero effect is infinitely significant, an
    // absent effect (zero SS against zero error) tests as F = 0.
    t.infinite_f = true;
    const double inf = std::numeric_limits<double>::infinity();
    t.replication.f = ss_rep > 0.0 ? inf : 0.0;
    t.replication.p = ss_rep > 0.0 ? 0.0 : 1.0;
    t.treatment.f = ss_trt > 0.0 ? inf : 0.0;
    t.treatment.p = ss_trt > 0.0 ? 0.0 : 1.0;
  }
  return t;
}

std::string format_pvalue(double p) {
  if (p < 1e-4)
    return "< 0.0001";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

namespace {

std::string fmt_num(double v, int prec = 2) {
  if (std::isinf(v))
    return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

void append_row(std::string& out, const AnovaRow& r,
                const std::string& name) {
  char buf[256];
  const std::string ms = r.ms ? fmt_num(*r.ms) : "";
  const std::string f = r.f ? fmt_num(*r.f) : "";
  const std::string p = r.p ? format_pvalue(*r.p) : "";
  std::snprintf(buf, sizeof buf, "%-16s %4d %12s %12s %10s %10s\n",
                name.c_str(), r.df, fmt_num(r.ss).c_str(), ms.c_str(),
                f.c_str(), p.c_str());
  out += buf;
}

} // namespace

std::string format_anova(const AnovaTable& t, const std::string& trt_label) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %4s %12s %12s %10s %10s\n", "SOV",
                "DF", "SS", "MS", "F", "alpha_F");
  out += buf;
  append_row(out, t.replication, "Replication");
  append_row(out, t.treatment, trt_label);
  append_row(out, t.error, "Error");
  append_row(out, t.total, "Total");
  if (t.degenerate)
    out += "(degenerate: all cells equal)\n";
  return out;
}

std::string anova_csv(const AnovaTable& t, const std::string& trt_label) {
  std::string out = "sov,df,ss,ms,f,alpha_f\n";
  auto row = [&out](const AnovaRow& r, const std::string& name) {
    char buf[256];
    const std::string ms = r.ms ? fmt_num(*r.ms, 6) : "";
    const std::string f = r.f ? fmt_num(*r.f, 6) : "";
    const std::string p = r.p ? format_pvalue(*r.p) : "";
    std::snprintf(buf, sizeof buf, "%s,%d,%s,%s,%s,%s\n", name.c_str(), r.df,
                  fmt_num(r.ss, 6).c_str(), ms.c_str(), f.c_str(), p.c_str());
    out += buf;
  };
  row(t.replication, "Replication");
  row(t.treatment, trt_label);
  row(t.error, "Error");
  row(t.total, "Total");
  return out;
}

namespace {

// Duncan significant ranges, alpha = 0.05 (Harter's corrected values, as
// reprinted in standard experimental-design texts). Rows: error df.
// Columns: span p = 2..10. Larger spans reuse the p = 10 column.
constexpr int kDuncanDf[] = {1,  2,  3,  4,  5,  6,  7,  8,  9,  10,
                             11, 12, 13, 14, 15, 16, 17, 18, 19, 20,
                             24, 30, 40, 60, 120};

constexpr double kDuncan05[][9] = {
    {17.97, 17.97, 17.97, 17.97, 17.97, 17.97, 17.97, 17.97, 17.97},
    {6.085, 6.085, 6.085, 6.085, 6.085, 6.085, 6.085, 6.085, 6.085},
    {4.501, 4.516, 4.516, 4.516, 4.516, 4.516, 4.516, 4.516, 4.516},
    {3.927, 4.013, 4.033, 4.033, 4.033, 4.033, 4.033, 4.033, 4.033},
    {3.635, 3.749, 3.797, 3.814, 3.814, 3.814, 3.814, 3.814, 3.814},
    {3.461, 3.587, 3.649, 3.680, 3.694, 3.697, 3.697, 3.697, 3.697},
    {3.344, 3.477, 3.548, 3.588, 3.611, 3.622, 3.626, 3.626, 3.626},
    {3.261, 3.399, 3.475, 3.521, 3.549, 3.566, 3.575, 3.579, 3.579},
    {3.199, 3.339, 3.420, 3.470, 3.502, 3.523, 3.536, 3.544, 3.547},
    {3.151, 3.293, 3.376, 3.430, 3.465, 3.489, 3.505, 3.516, 3.522},
    {3.113, 3.256, 3.342, 3.397, 3.435, 3.462, 3.480, 3.493, 3.501},
    {3.082, 3.225, 3.313, 3.370, 3.410, 3.439, 3.459, 3.474, 3.484},
    {3.055, 3.200, 3.289, 3.348, 3.389, 3.419, 3.442, 3.458, 3.470},
    {3.033, 3.178, 3.268, 3.329, 3.372, 3.403, 3.426, 3.444, 3.457},
    {3.014, 3.160, 3.250, 3.312, 3.356, 3.389, 3.413, 3.432, 3.446},
    {2.998, 3.144, 3.235, 3.298, 3.343, 3.376, 3.402, 3.422, 3.437},
    {2.984, 3.130, 3.222, 3.285, 3.331, 3.366, 3.392, 3.412, 3.429},
    {2.971, 3.118, 3.210, 3.274, 3.321, 3.356, 3.383, 3.405, 3.421},
    {2.960, 3.107, 3.199, 3.264, 3.311, 3.347, 3.375, 3.397, 3.415},
    {2.950, 3.097, 3.190, 3.255, 3.303, 3.339, 3.368, 3.391, 3.409},
    {2.919, 3.066, 3.160, 3.226, 3.276, 3.315, 3.345, 3.370, 3.390},
    {2.888, 3.035, 3.131, 3.199, 3.250, 3.290, 3.322, 3.349, 3.371},
    {2.858, 3.006, 3.102, 3.171, 3.224, 3.266, 3.300, 3.328, 3.352},
    {2.829, 2.976, 3.073, 3.143, 3.198, 3.241, 3.277, 3.307, 3.333},
    {2.800, 2.947, 3.045, 3.116, 3.172, 3.217, 3.254, 3.287, 3.314},
};

constexpr int kDuncanRows = sizeof(kDuncanDf) / sizeof(kDuncanDf[0]);

} // namespace

double duncan_q(int span, int df_err, double alpha) {
  if (std::fabs(alpha - 0.05) > 1e-12)
    throw std::invalid_argument("duncan_q: only alpha = 0.05 is shipped");
  if (span < 2)
    throw std::invalid_argument("duncan_q: span must be >= 2");
  if (df_err < 1)
    throw std::invalid_argument("duncan_q: df must be >= 1");
  const int col = std::min(span, 10) - 2;
  if (df_err >= kDuncanDf[kDuncanRows - 1])
    return kDuncan05[kDuncanRows - 1][col];
  int hi = 0;
  while (kDuncanDf[hi] < df_err)
    ++hi;
  if (kDuncanDf[hi] == df_err)
    return kDuncan05[hi][col];
  const int lo = hi - 1;
  const double w = double(df_err - kDuncanDf[lo]) /
                   double(kDuncanDf[hi] - kDuncanDf[lo]);
  return kDuncan05[lo][col] + w * (kDuncan05[hi][col] - kDuncan05[lo][col]);
}

DmrtGrouping dmrt(const std::vector<double>& means, double ms_err, int df_err,
                  int n_per_mean, double alpha) {
  const size_t k = means.size();
  if (k < 2)
    throw std::invalid_argument("dmrt: need >= 2 treatments");
  if (!(ms_err > 0.0))
    throw std::invalid_argument("dmrt: ms_err must be positive");
  if (n_per_mean < 2)
    throw std::invalid_argument("dmrt: n per mean must be >= 2");

  DmrtGrouping g;
  g.ascending.resize(k);
  std::iota(g.ascending.begin(), g.ascending.end(), size_t{0});
  std::stable_sort(g.ascending.begin(), g.ascending.end(),
                   [&](size_t a, size_t b) { return means[a] < means[b]; });

  const double se = std::sqrt(ms_err / n_per_mean);
  g.critical_ranges.resize(k - 1);
  for (size_t span = 2; span <= k; ++span)
    g.critical_ranges[span - 2] =
        duncan_q(static_cast<int>(span), df_err, alpha) * se;

  // Sweep ascending; each maximal homogeneous run gets the next letter
  // unless it is contained in the previous run.
  g.letters.assign(k, "");
  char letter = 'A';
  size_t prev_hi = 0;
  bool any = false;
  for (size_t i = 0; i < k; ++i) {
    size_t j = i;
    while (j + 1 < k) {
      const size_t span = j + 1 - i + 1;
      const double range = g.critical_ranges[std::min(span, k) - 2];
      if (means[g.ascending[j + 1]] - means[g.ascending[i]] < range)
        ++j;
      else
        break;
    }
    if (!any || j > prev_hi) {
      for (size_t m = i; m <= j; ++m)
        g.letters[g.ascending[m]] += letter;
      if (letter < 'Z')
        ++letter;
      prev_hi = j;
      any = true;
    }
    if (j == k - 1)
      break;
  }
  return g;
}

RegressionFit linear_regression(const std::vector<double>& xs,
                                const std::vector<double>& ys) {
  const size_t n = xs.size();
  if (n != ys.size())
    throw std::invalid_argument("linear_regression: length mismatch");
  if (n < 2)
    throw std::invalid_argument("linear_regression: need >= 2 points");

  const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0, sy2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - xbar;
    const double dy = ys[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
    sy2 += ys[i] * ys[i];
  }
  if (sxx <= 0.0)
    throw std::invalid_argument("linear_regression: xs all equal");

  RegressionFit fit;
  if (syy <= 1e-20 * std::max(1.0, sy2)) {
    fit.slope = 0.0;
    fit.intercept = ybar;
    fit.r_squared = 0.0;
    fit.zero_variance = true;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  const double ss_res = std::max(0.0, syy - fit.slope * sxy);
  fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

std::string format_fit_line(const std::string& yname,
                            const RegressionFit& f) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s = %.4f*x + %.4f (R^2=%.4f)%s",
                yname.c_str(), f.slope, f.intercept, f.r_squared,
                f.zero_variance ? " [zero variance in y]" : "");
  return buf;
}

} // namespace forksim::stats
