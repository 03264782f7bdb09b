#pragma once
#include <array>
#include <complex>
#include <vector>

#include "artifact/cr_scene.hpp"

namespace cr::wcl {

struct LocationEstimate {
  std::array<double, 2> position{0.0, 0.0};
  std::vector<double> weights;  // per CR, zero when excluded
  std::vector<char> included;
};

struct FvcRecord {
  double fvc = 0.0;      // clamped to [0, 1]
  double fvc_raw = 0.0;  // unclamped sample value
  int realizations = 0;
  std::complex<double> last_cac{0.0, 0.0};  // M-th realization
  double mean_power = 0.0;                  // e_s, mean of |CAC|^2 over M
};

LocationEstimate cyclic_wcl(const std::vector<std::complex<double>>& cacs,
                            const std::vector<scene::Vec2>& positions);

// Traditional WCL: weights are the received powers themselves.
LocationEstimate classic_wcl(const std::vector<double>& powers,
                             const std::vector<scene::Vec2>& positions);

FvcRecord fvc(const std::vector<std::complex<double>>& cac_realizations);

// Weighted centroid over CRs with fvc <= phi0; weights follow the M-th CAC
// realization, or the per-CR mean power when average_weights is set.
LocationEstimate improved_cyclic_wcl(const std::vector<FvcRecord>& records,
                                     const std::vector<scene::Vec2>& positions,
                                     double phi0, bool average_weights = false);

struct SubThreshold {
  double phi0 = 0.0;
  bool degenerate = false;  // k-means fallback: include every CR
};

SubThreshold suboptimal_threshold(const std::vector<FvcRecord>& records,
                                  const std::vector<scene::Vec2>& positions);

// M-independent moments of one CR's CAC estimator, for realization planning.
struct FvcMoments {
  double cac_variance = 0.0;   // var(R)
  double cac_mean_sq = 0.0;    // |E R|^2
  double power_variance = 0.0; // var(|R|^2)
};

// The five confidence-interval statistics at a given realization count.
struct FvcStats {
  double mu_vs = 0.0;
  double var_vs = 0.0;
  double mu_es = 0.0;
  double var_es = 0.0;
  double cov_vs_es = 0.0;
};

FvcStats fvc_stats_at(const FvcMoments& moments, long m);

// Smallest M > 50 whose two-sided confidence half-width z*S stays below
// delta; throws when no M up to cap qualifies.
int required_realizations(double beta, double delta, const FvcMoments& moments,
                          int cap = 200000);

struct OpsCount {
  long long wcl = 0;
  long long cyclic = 0;
  long long improved = 0;
};

OpsCount ops_count(long long k, long long n, long long m, long long eta = 25);

}  // namespace cr::wcl
