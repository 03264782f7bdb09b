#include "artifact/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "artifact/errors.hpp"

namespace cr::num {

GammaParams gamma_moment_match(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0))
    throw DomainError("gamma_moment_match: mean and variance must be positive");
  return {mean * mean / variance, variance / mean};
}

static void check_gamma(const GammaParams& g) {
  if (!(g.shape > 0.0) || !(g.scale > 0.0))
    throw DomainError("gamma parameters must be positive");
}

double gamma_pdf(const GammaParams& g, double x) {
  check_gamma(g);
  if (x < 0.0) return 0.0;
  return boost::math::gamma_p_derivative(g.shape, x / g.scale) / g.scale;
}

double gamma_cdf(const GammaParams& g, double x) {
  check_gamma(g);
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(g.shape, x / g.scale);
}

double gamma_ccdf(const GammaParams& g, double x) {
  check_gamma(g);
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(g.shape, x / g.scale);
}

double gamma_quantile(const GammaParams& g, double p) {
  check_gamma(g);
  if (!(p >= 0.0) || !(p < 1.0))
    throw DomainError("gamma_quantile: p must lie in [0, 1)");
  boost::math::gamma_distribution<double> dist(g.shape, g.scale);
  return boost::math::quantile(dist, p);
}

double max_eig_pdf(int order, double x) {
  if (order < 1) throw DomainError("max_eig_pdf: order must be >= 1");
  if (x < 0.0) throw DomainError("max_eig_pdf: x must be >= 0");
  return boost::math::gamma_p_derivative(static_cast<double>(order), x);
}

double max_eig_cdf(int order, double x) {
  if (order < 1) throw DomainError("max_eig_cdf: order must be >= 1");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(order), x);
}

TwoSplit kmeans_two_split(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw DomainError("kmeans_two_split: need at least 2 values");

  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  TwoSplit out;
  if (*mn_it == *mx_it) {
    out.degenerate = true;
    out.a = {0};
    for (std::size_t i = 1; i < n; ++i) out.b.push_back(i);
    out.mean_a = values[0];
    out.mean_b = values[0];
    return out;
  }

  double ca = *mn_it, cb = *mx_it;
  std::vector<char> in_a(n, 0);
  for (int iter = 0; iter < 1000; ++iter) {
    bool changed = false;
    double sa = 0.0, sb = 0.0;
    std::size_t na = 0, nb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const char assign = std::abs(values[i] - ca) <= std::abs(values[i] - cb) ? 1 : 0;
      if (assign != in_a[i]) changed = true;
      in_a[i] = assign;
      if (assign) { sa += values[i]; ++na; } else { sb += values[i]; ++nb; }
    }
    if (na) ca = sa / na;
    if (nb) cb = sb / nb;
    if (!changed && iter > 0) break;
  }
  for (std::size_t i = 0; i < n; ++i) (in_a[i] ? out.a : out.b).push_back(i);
  out.mean_a = ca;
  out.mean_b = cb;
  return out;
}

double semi_infinite_quadrature(const std::function<double(double)>& f,
                                const QuadratureSpec& spec) {
  if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0))
    throw DomainError("semi_infinite_quadrature: tolerances must be positive");
  if (spec.max_subdivisions < 1)
    throw DomainError("semi_infinite_quadrature: max_subdivisions must be >= 1");
  if (!(spec.truncation > 0.0))
    throw DomainError("semi_infinite_quadrature: truncation must be positive");

  using rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Seg {
    double a, b, val, err;
    bool operator<(const Seg& o) const { return err < o.err; }
  };
  auto eval = [&f](double a, double b) {
    Seg s{a, b, 0.0, 0.0};
    s.val = rule::integrate(f, a, b, 0, 0.0, &s.err);
    // Boost reports the Gauss/Kronrod discrepancy on the unit interval;
    // rescale so err is an absolute error for the integral over [a, b].
    s.err *= 0.5 * (b - a);
    return s;
  };

  std::priority_queue<Seg> segs;
  double total = 0.0, total_err = 0.0;
  // Seed with a graded partition so wide ranges start reasonably resolved.
  const double t = spec.truncation;
  const double knots[] = {0.0, t / 1024.0, t / 128.0, t / 16.0, t / 4.0, t};
  for (int i = 0; i + 1 < 6; ++i) {
    Seg s = eval(knots[i], knots[i + 1]);
    total += s.val;
    total_err += s.err;
    segs.push(s);
  }

  int splits = 0;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (splits >= spec.max_subdivisions)
      throw NumericalError("semi_infinite_quadrature: subdivision budget exhausted", total);
    Seg worst = segs.top();
    segs.pop();
    total -= worst.val;
    total_err -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    for (Seg s : {eval(worst.a, mid), eval(mid, worst.b)}) {
      total += s.val;
      total_err += s.err;
      segs.push(s);
    }
    ++splits;
  }
  return total;
}

double gamma_sum_cdf(const std::vector<GammaTerm>& terms, double x) {
  if (terms.empty()) throw DomainError("gamma_sum_cdf: no terms");
  double mean = 0.0, var = 0.0, amax = 0.0;
  bool any_pos = false, any_neg = false;
  for (const auto& t : terms) {
    if (!(t.shape > 0.0) || !std::isfinite(t.scale))
      throw DomainError("gamma_sum_cdf: shapes must be positive and scales finite");
    mean += t.shape * t.scale;
    var += t.shape * t.scale * t.scale;
    amax = std::max(amax, std::abs(t.scale));
    if (t.scale > 0.0) any_pos = true;
    if (t.scale < 0.0) any_neg = true;
  }
  if (amax == 0.0) return x >= 0.0 ? 1.0 : 0.0;  // every term degenerate at 0
  const double sd = std::sqrt(var);
  if (x >= mean + 60.0 * sd) return 1.0;
  if (x <= mean - 60.0 * sd) return 0.0;
  if (!any_neg && x <= 0.0) return 0.0;
  if (!any_pos && x >= 0.0) return 1.0;

  double rate_sum = 0.0, shape_sum = 0.0;  // bound on |d/dt phase|; tail decay order
  for (const auto& t : terms) {
    rate_sum += t.shape * std::abs(t.scale);
    shape_sum += t.shape;
  }
  const double pi = 3.141592653589793238;
  const double omega = std::max({std::abs(x), rate_sum, sd});
  const double seg = pi / omega;

  auto log_env = [&terms](double t) {
    double lm = 0.0;
    for (const auto& g : terms) lm -= 0.5 * g.shape * std::log1p(g.scale * g.scale * t * t);
    return lm;
  };
  auto phase = [&terms, x](double t) {
    double ph = 0.0;
    for (const auto& g : terms) ph += g.shape * std::atan(g.scale * t);
    return ph - t * x;
  };
  auto phase_rate = [&terms, x](double t) {
    double r = 0.0;
    for (const auto& g : terms)
      r += g.shape * g.scale / (1.0 + g.scale * g.scale * t * t);
    return r - x;
  };
  auto integrand = [&terms, x](double t) {
    if (t <= 0.0) {
      double m = 0.0;
      for (const auto& g : terms) m += g.shape * g.scale;
      return m - x;
    }
    double lm = 0.0, ph = 0.0;
    for (const auto& g : terms) {
      lm -= 0.5 * g.shape * std::log1p(g.scale * g.scale * t * t);
      ph += g.shape * std::atan(g.scale * t);
    }
    return std::exp(lm) * std::sin(ph - t * x) / t;
  };

  using rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  double integral = 0.0;
  double lo = 0.0;
  const long max_segs = 500000;
  bool converged = false;
  for (long k = 0; k < max_segs; ++k) {
    const double hi = lo + seg;
    integral += rule::integrate(integrand, lo, hi, 0);
    lo = hi;
    const double lm = log_env(lo);
    if (lm < -37.0) {  // envelope below ~1e-16
      converged = true;
      break;
    }
    // First-order tail estimates: oscillation-dominated (integration by parts)
    // and envelope-dominated (power-law decay of order shape_sum).
    const double env = std::exp(lm) / lo;
    const double rate = phase_rate(lo);
    const double bound_osc = rate != 0.0 ? env / std::abs(rate)
                                         : std::numeric_limits<double>::infinity();
    const double bound_env = std::exp(lm) / shape_sum;
    // The integration-by-parts term itself is an accurate tail value once the
    // second-order remainder (one more derivative of envelope/phase) is
    // negligible, which rescues slowly decaying envelopes (shape sums < 1).
    const double cycles = lo * std::abs(rate);
    const double rem_osc = cycles > 10.0
                               ? bound_osc * (shape_sum + 1.0) * (1.0 + 2.0 / cycles) / cycles
                               : std::numeric_limits<double>::infinity();
    if (std::min({bound_osc, bound_env, rem_osc}) < 5e-10) {
      const double ph = phase(lo);
      if (std::min(bound_osc, rem_osc) <= bound_env)
        integral += env * std::cos(ph) / rate;
      else
        integral += std::sin(ph) * std::exp(lm) / shape_sum;
      converged = true;
      break;
    }
  }
  const double cdf = 0.5 - integral / pi;
  if (!converged)
    throw NumericalError("gamma_sum_cdf: oscillatory tail did not decay",
                         std::clamp(cdf, 0.0, 1.0));
  return std::clamp(cdf, 0.0, 1.0);
}

double student_t_two_sided(double beta, double dof) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw DomainError("student_t_two_sided: beta must lie in (0, 1)");
  if (!(dof > 0.0)) throw DomainError("student_t_two_sided: dof must be positive");
  boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, 0.5 * (1.0 + beta));
}

double q_function(double x) { return 0.5 * std::erfc(x / 1.4142135623730950488); }

double q_inverse(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw DomainError("q_inverse: p must lie in (0, 1)");
  return 1.4142135623730950488 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace cr::num
