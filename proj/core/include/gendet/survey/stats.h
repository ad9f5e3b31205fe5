#ifndef GENDET_SURVEY_STATS_H_
#define GENDET_SURVEY_STATS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gendet::survey {

struct PairwiseDifference {
  size_t a = 0;
  size_t b = 0;
  double difference = 0.0;      // mean[a] - mean[b]
  double standard_error = 0.0;  // of the difference, from the pooled variance
};

struct StatResult {
  enum class Test { kStudentT, kAnovaF };

  Test test = Test::kStudentT;
  double statistic = 0.0;  // may be +-inf when `degenerate`
  double df1 = 0.0;        // t: n_a + n_b - 2; F: k - 1
  double df2 = 0.0;        // F only: N - k
  double p_value = 1.0;
  // Zero pooled variance with unequal means: the statistic is infinite and
  // p is reported as 0.
  bool degenerate = false;
  std::vector<double> means;
  std::vector<size_t> sizes;
  std::vector<double> standard_errors;  // per group, s / sqrt(n)
  std::vector<PairwiseDifference> pairwise;
};

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// Two-sided p-value of Student's t with `df` degrees of freedom.
double StudentTTwoSidedP(double t, double df);
// Upper-tail p-value of F(d1, d2).
double FUpperP(double f, double d1, double d2);

// Two-sample Student t-test with pooled variance. Each sample needs >= 2
// observations.
StatResult TTestIndependent(std::span<const double> a, std::span<const double> b);

// One-way ANOVA with pairwise mean differences as post-hoc summary. Needs
// >= 2 groups of >= 2 observations; zero within-group variance is an error.
StatResult AnovaOneWay(const std::vector<std::vector<double>>& groups);

nlohmann::ordered_json ToJson(const StatResult& result);

}  // namespace gendet::survey

#endif  // GENDET_SURVEY_STATS_H_
