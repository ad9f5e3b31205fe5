#include "gendet/survey/stats.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "gendet/common/error.h"

namespace gendet::survey {

namespace {

double BetaContinuedFraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  Fail(ErrorKind::kInvalidArgument, "incomplete beta did not converge");
}

struct Moments {
  double mean = 0.0;
  double ss = 0.0;  // sum of squared deviations
};

Moments MomentsOf(std::span<const double> xs) {
  Moments m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  for (double x : xs) m.ss += (x - m.mean) * (x - m.mean);
  return m;
}

double GroupSe(const Moments& m, size_t n) {
  return std::sqrt(m.ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  Require(a > 0.0 && b > 0.0, "incomplete beta needs a, b > 0");
  Require(x >= 0.0 && x <= 1.0, "incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * BetaContinuedFraction(a, b, x) / a;
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTTwoSidedP(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return RegularizedIncompleteBeta(df / 2.0, 0.5, df / (df + t * t));
}

double FUpperP(double f, double d1, double d2) {
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  return RegularizedIncompleteBeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

StatResult TTestIndependent(std::span<const double> a, std::span<const double> b) {
  Require(a.size() >= 2 && b.size() >= 2, "t-test needs at least two observations per sample");
  const Moments ma = MomentsOf(a), mb = MomentsOf(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  StatResult r;
  r.test = StatResult::Test::kStudentT;
  r.df1 = na + nb - 2.0;
  r.means = {ma.mean, mb.mean};
  r.sizes = {a.size(), b.size()};
  r.standard_errors = {GroupSe(ma, a.size()), GroupSe(mb, b.size())};
  const double pooled = (ma.ss + mb.ss) / r.df1;
  const double se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  const double diff = ma.mean - mb.mean;
  r.pairwise = {{0, 1, diff, se}};
  if (se == 0.0) {
    if (diff == 0.0) {
      r.statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
      r.p_value = 0.0;
      r.degenerate = true;
    }
    return r;
  }
  r.statistic = diff / se;
  r.p_value = StudentTTwoSidedP(r.statistic, r.df1);
  return r;
}

StatResult AnovaOneWay(const std::vector<std::vector<double>>& groups) {
  Require(groups.size() >= 2, "ANOVA needs at least two groups");
  StatResult r;
  r.test = StatResult::Test::kAnovaF;
  std::vector<Moments> moments;
  double total = 0.0;
  size_t n = 0;
  for (const auto& g : groups) {
    Require(g.size() >= 2, "ANOVA needs at least two observations per group");
    moments.push_back(MomentsOf(g));
    total += std::accumulate(g.begin(), g.end(), 0.0);
    n += g.size();
  }
  const double grand = total / static_cast<double>(n);
  double ssb = 0.0, ssw = 0.0;
  for (size_t i = 0; i < groups.size(); ++i) {
    const double d = moments[i].mean - grand;
    ssb += static_cast<double>(groups[i].size()) * d * d;
    ssw += moments[i].ss;
    r.means.push_back(moments[i].mean);
    r.sizes.push_back(groups[i].size());
    r.standard_errors.push_back(GroupSe(moments[i], groups[i].size()));
  }
  const size_t k = groups.size();
  r.df1 = static_cast<double>(k - 1);
  r.df2 = static_cast<double>(n - k);
  const double msw = ssw / r.df2;
  if (msw == 0.0) Fail(ErrorKind::kInvalidArgument, "degenerate within-group variance");
  r.statistic = (ssb / r.df1) / msw;
  r.p_value = FUpperP(r.statistic, r.df1, r.df2);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      const double se = std::sqrt(msw * (1.0 / static_cast<double>(groups[i].size()) +
                                         1.0 / static_cast<double>(groups[j].size())));
      r.pairwise.push_back({i, j, r.means[i] - r.means[j], se});
    }
  }
  return r;
}

nlohmann::ordered_json ToJson(const StatResult& r) {
  auto finite_or_null = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::ordered_json doc;
  doc["test"] = r.test == StatResult::Test::kStudentT ? "t" : "F";
  doc["statistic"] = finite_or_null(r.statistic);
  if (r.test == StatResult::Test::kStudentT) {
    doc["df"] = r.df1;
  } else {
    doc["df"] = {r.df1, r.df2};
  }
  doc["p_value"] = r.p_value;
  doc["degenerate"] = r.degenerate;
  doc["means"] = r.means;
  doc["sizes"] = r.sizes;
  doc["standard_errors"] = r.standard_errors;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : r.pairwise) {
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"difference", p.difference},
                     {"standard_error", p.standard_error}});
  }
  doc["pairwise"] = pairs;
  return doc;
}

}  // namespace gendet::survey
