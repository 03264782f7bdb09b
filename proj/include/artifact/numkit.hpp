#pragma once
#include <cstddef>
#include <functional>
#include <vector>

namespace cr::num {

struct GammaParams {
  double shape = 1.0;
  double scale = 1.0;
  double mean() const { return shape * scale; }
  double variance() const { return shape * scale * scale; }
};

GammaParams gamma_moment_match(double mean, double variance);
double gamma_pdf(const GammaParams& g, double x);
double gamma_cdf(const GammaParams& g, double x);
double gamma_ccdf(const GammaParams& g, double x);
double gamma_quantile(const GammaParams& g, double p);

// Density / cdf of the largest eigenvalue law x^(order-1) e^-x / (order-1)!
double max_eig_pdf(int order, double x);
double max_eig_cdf(int order, double x);

struct TwoSplit {
  std::vector<std::size_t> a;  // cluster seeded at the minimum
  std::vector<std::size_t> b;  // cluster seeded at the maximum
  double mean_a = 0.0;
  double mean_b = 0.0;
  bool degenerate = false;     // all-equal input, arbitrary split
};

// Deterministic 1-D two-cluster k-means, seeds at (min, max), Lloyd to a
// fixed point. Ties go to cluster a.
TwoSplit kmeans_two_split(const std::vector<double>& values);

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;
  double truncation = 1e4;  // integrals run over [0, truncation]
};

double semi_infinite_quadrature(const std::function<double(double)>& f,
                                const QuadratureSpec& spec);

// One summand of an independent weighted-Gamma sum. Negative scale means the
// term enters with a minus sign; shape must stay positive.
struct GammaTerm {
  double shape;
  double scale;
};

// CDF of sum_j Gamma(shape_j, scale_j) by characteristic-function inversion.
double gamma_sum_cdf(const std::vector<GammaTerm>& terms, double x);

// z such that P(|T_dof| <= z) = beta for Student's t.
double student_t_two_sided(double beta, double dof);

double q_function(double x);
double q_inverse(double p);

}  // namespace cr::num
