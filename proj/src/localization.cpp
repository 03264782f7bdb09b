#include "artifact/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "artifact/errors.hpp"
#include "artifact/numkit.hpp"

namespace cr::wcl {

static LocationEstimate weighted_centroid(const std::vector<double>& weights,
                                          const std::vector<scene::Vec2>& positions,
                                          const std::vector<char>& included) {
  double wsum = 0.0, x = 0.0, y = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!included[k]) continue;
    wsum += weights[k];
    x += weights[k] * positions[k][0];
    y += weights[k] * positions[k][1];
  }
  if (!(wsum > 0.0))
    throw DomainError("weighted centroid: weights are all zero");
  LocationEstimate est;
  est.position = {x / wsum, y / wsum};
  est.weights = weights;
  est.included = included;
  return est;
}

LocationEstimate cyclic_wcl(const std::vector<std::complex<double>>& cacs,
                            const std::vector<scene::Vec2>& positions) {
  if (cacs.empty() || cacs.size() != positions.size())
    throw DomainError("cyclic_wcl: need matching, nonempty CACs and positions");
  std::vector<double> w(cacs.size());
  for (std::size_t k = 0; k < cacs.size(); ++k) w[k] = std::norm(cacs[k]);
  return weighted_centroid(w, positions, std::vector<char>(cacs.size(), 1));
}

LocationEstimate classic_wcl(const std::vector<double>& powers,
                             const std::vector<scene::Vec2>& positions) {
  if (powers.empty() || powers.size() != positions.size())
    throw DomainError("classic_wcl: need matching, nonempty powers and positions");
  for (double p : powers)
    if (p < 0.0) throw DomainError("classic_wcl: powers must be nonnegative");
  return weighted_centroid(powers, positions, std::vector<char>(powers.size(), 1));
}

FvcRecord fvc(const std::vector<std::complex<double>>& cac_realizations) {
  const std::size_t m = cac_realizations.size();
  if (m < 2) throw DomainError("fvc: need at least 2 realizations");
  std::complex<double> mean{0.0, 0.0};
  double e_s = 0.0;
  for (const auto& z : cac_realizations) {
    mean += z;
    e_s += std::norm(z);
  }
  mean /= static_cast<double>(m);
  e_s /= static_cast<double>(m);
  if (!(e_s > 0.0)) throw DomainError("fvc: all realizations are zero");
  double v_s = 0.0;
  for (const auto& z : cac_realizations) v_s += std::norm(z - mean);
  v_s /= static_cast<double>(m - 1);

  FvcRecord rec;
  rec.fvc_raw = v_s / e_s;
  rec.fvc = std::clamp(rec.fvc_raw, 0.0, 1.0);
  rec.realizations = static_cast<int>(m);
  rec.last_cac = cac_realizations.back();
  rec.mean_power = e_s;
  return rec;
}

LocationEstimate improved_cyclic_wcl(const std::vector<FvcRecord>& records,
                                     const std::vector<scene::Vec2>& positions,
                                     double phi0, bool average_weights) {
  if (records.empty() || records.size() != positions.size())
    throw DomainError("improved_cyclic_wcl: need matching, nonempty records and positions");
  std::vector<char> included(records.size(), 0);
  std::vector<double> w(records.size(), 0.0);
  bool any = false;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (records[k].fvc <= phi0) {
      included[k] = 1;
      w[k] = average_weights ? records[k].mean_power : std::norm(records[k].last_cac);
      any = true;
    }
  }
  if (!any) throw DomainError("improved_cyclic_wcl: no CR passes the FVC threshold");
  return weighted_centroid(w, positions, included);
}

SubThreshold suboptimal_threshold(const std::vector<FvcRecord>& records,
                                  const std::vector<scene::Vec2>& positions) {
  const std::size_t k = records.size();
  if (k < 2 || positions.size() != k)
    throw DomainError("suboptimal_threshold: need at least 2 matching records");

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].fvc < records[b].fvc;
  });

  // Norm of the estimate at each candidate threshold (nested inclusion sets).
  std::vector<double> norms(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double phi0 = records[order[j]].fvc;
    auto est = improved_cyclic_wcl(records, positions, phi0);
    norms[j] = est.position[0] * est.position[0] + est.position[1] * est.position[1];
  }

  num::TwoSplit split = num::kmeans_two_split(norms);
  if (split.degenerate) return {records[order[k - 1]].fvc, true};

  const bool full_in_a =
      std::find(split.a.begin(), split.a.end(), k - 1) != split.a.end();
  const auto& opt = full_in_a ? split.b : split.a;
  double acc = 0.0;
  for (std::size_t j : opt) acc += records[order[j]].fvc;
  return {acc / static_cast<double>(opt.size()), false};
}

FvcStats fvc_stats_at(const FvcMoments& moments, long m) {
  if (m < 2) throw DomainError("fvc_stats_at: need at least 2 realizations");
  const double md = static_cast<double>(m);
  const double var = moments.cac_variance;
  const double mu4 = 2.0 * var * var;  // central fourth moment, Gaussian CAC
  FvcStats s;
  s.mu_vs = var;
  s.var_vs = (mu4 - (md - 3.0) / (md - 1.0) * var * var) / md;
  s.mu_es = var + moments.cac_mean_sq;
  s.var_es = moments.power_variance / md;
  const double e_vs_es =
      (md - 1.0) / md * (s.var_vs + var * var + var * (var / md + moments.cac_mean_sq));
  s.cov_vs_es = e_vs_es - s.mu_vs * s.mu_es;
  return s;
}

int required_realizations(double beta, double delta, const FvcMoments& moments,
                          int cap) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw DomainError("required_realizations: beta must lie in (0, 1)");
  if (!(delta > 0.0))
    throw DomainError("required_realizations: delta must be positive");
  if (cap <= 51) throw DomainError("required_realizations: cap must exceed 51");

  for (int m = 51; m <= cap; ++m) {
    const FvcStats s = fvc_stats_at(moments, m);
    const double z = num::student_t_two_sided(beta, static_cast<double>(m - 1));
    const double es2 = s.mu_es * s.mu_es;
    const double q = 1.0 - z * z * s.var_es / es2;
    if (!(q > 0.0)) continue;
    const double ratio = s.mu_vs / s.mu_es;
    double s2 = s.var_vs - 2.0 * ratio * s.cov_vs_es + ratio * ratio * s.var_es -
                z * z * (s.var_es / es2) *
                    (s.var_vs - s.cov_vs_es * s.cov_vs_es / s.var_es);
    s2 /= es2 * q * q;
    if (s2 < 0.0) s2 = 0.0;
    if (z * std::sqrt(s2) < delta) return m;
  }
  throw NumericalError("required_realizations: width target unreachable within cap",
                       static_cast<double>(cap));
}

OpsCount ops_count(long long k, long long n, long long m, long long eta) {
  if (k < 1 || n < 1 || m < 1 || eta < 0)
    throw DomainError("ops_count: arguments must be positive (eta nonnegative)");
  OpsCount c;
  c.wcl = 11 * k * n + 23 * k + 26;
  c.cyclic = 21 * k * n + 23 * k + 36;
  c.improved = 21 * m * k * n + 24 * m * k + 19 * m + (71 + eta) * k + 17;
  return c;
}

}  // namespace cr::wcl
