#pragma once

#include <optional>
#include <string>
#include <vector>

namespace forksim::stats {

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation, absolute accuracy well under 1e-6 over the F-test range.
double incbeta(double a, double b, double x);

/// Upper-tail probability of the F distribution with (df1, df2) degrees
/// of freedom: P(F >= f) = I_{df2/(df2 + df1 f)}(df2/2, df1/2).
double f_pvalue(double f, int df1, int df2);

/// One line of the decomposition table. ms/f/p are absent where the
/// schema leaves them blank (Total row, degenerate cases).
struct AnovaRow {
  std::string source;
  int df = 0;
  double ss = 0.0;
  std::optional<double> ms;
  std::optional<double> f;
  std::optional<double> p;
};

struct AnovaTable {
  AnovaRow replication;
  AnovaRow treatment;
  AnovaRow error;
  AnovaRow total;
  bool degenerate = false; // all cells equal, every SS zero
  bool infinite_f = false; // ms_err = 0 with nonzero effect
};

/// Randomized-complete-block decomposition. data[b][t] holds the response
/// of treatment t in block (replication) b; the matrix must be complete.
/// F = MS_effect / MS_error for both the treatment and the block source.
AnovaTable anova_rcbd(const std::vector<std::vector<double>>& data);

/// Rebuilds the derived columns (MS, F, p) from an already-known
/// DF/SS decomposition, for cross-checking published tables.
AnovaTable anova_from_decomposition(int df_rep, double ss_rep, int df_trt,
                                    double ss_trt, int df_err, double ss_err);

/// Aligned-text rendering, schema SOV | DF | SS | MS | F | alpha_F.
/// p below 1e-4 prints as "< 0.0001".
std::string format_anova(const AnovaTable& t, const std::string& trt_label);

/// Same table as CSV (header sov,df,ss,ms,f,alpha_f).
std::string anova_csv(const AnovaTable& t, const std::string& trt_label);

std::string format_pvalue(double p);

struct DmrtGrouping {
  std::vector<std::string> letters;      // per input treatment index
  std::vector<size_t> ascending;         // treatment indices, means ascending
  std::vector<double> critical_ranges;   // [0] = span 2, [1] = span 3, ...
};

/// Duncan's multiple range grouping of treatment means. Spans beyond 10
/// reuse the span-10 studentized range; df beyond 120 uses the 120 row.
/// Only alpha = 0.05 is shipped; anything else is an error.
DmrtGrouping dmrt(const std::vector<double>& means, double ms_err, int df_err,
                  int n_per_mean, double alpha = 0.05);

/// Tabulated Duncan significant range q(span, df) at alpha = 0.05,
/// linearly interpolated between tabulated df rows.
double duncan_q(int span, int df_err, double alpha = 0.05);

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool zero_variance = false; // ys constant; slope 0, r_squared 0
};

/// Ordinary least squares of y on x. xs all equal is a degenerate fit
/// (error); ys all equal yields the zero-variance convention above.
RegressionFit linear_regression(const std::vector<double>& xs,
                                const std::vector<double>& ys);

/// "y = a*x + b (R^2=...)" with fixed decimals, for report output.
std::string format_fit_line(const std::string& yname, const RegressionFit& f);

} // namespace forksim::stats
