#pragma once
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace cr::mimo {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

struct DownlinkConfig {
  int antennas = 64;   // M
  int sus = 20;        // K
  int pu_pairs = 4;    // L
  double cell_radius = 2000.0;  // meters
  double min_distance = 100.0;
  double path_loss_exponent = 3.8;
  double shadowing_std_db = 8.0;
  double noise_power = dbm_to_watts(-100.0);
  double pt_power = dbm_to_watts(20.0);       // P_p
  double power_budget = dbm_to_watts(40.0);   // P0
  double interference_cap = dbm_to_watts(-106.0);  // I0
  double rate_target = 1.0;      // R0, bits/s/Hz
  double uniform_rate_max = 0.0; // > 0 draws per-SU targets from (0, max]
  // Negative values resolve to the reciprocal-channel defaults
  // sigma_Delta2 = noise/P_p, sigma_delta2 = noise/P0,
  // epsilon1 = sigma_Delta2, epsilon2 = P0 * sigma_delta2.
  double sigma_delta2 = -1.0;
  double sigma_Delta2 = -1.0;
  double epsilon1 = -1.0;
  double epsilon2 = -1.0;
};

struct DownlinkScenario {
  int antennas = 0;  // M
  int sus = 0;       // K
  int pu_pairs = 0;  // L
  Eigen::MatrixXcd su_channels;    // M x K, true h_k
  Eigen::MatrixXcd su_estimates;   // M x K
  Eigen::MatrixXcd pr_channels;    // M x L, true h_l0
  Eigen::MatrixXcd pr_estimates;   // M x L
  Eigen::MatrixXcd pt_su_channels; // L x K, true h_lk
  Eigen::VectorXd su_beta;         // K
  Eigen::VectorXd pr_beta;         // L
  Eigen::MatrixXd pt_su_beta;      // L x K
  Eigen::VectorXd rate_targets;    // K
  double noise_power = 0.0;
  double pt_power = 0.0;
  double power_budget = 0.0;
  double interference_cap = 0.0;
  double sigma_delta2 = 0.0;
  double sigma_Delta2 = 0.0;
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;

  // min(I0/epsilon1, P0); the interference cap drops out when epsilon1 = 0.
  double power_cap() const;
  // I_k = sum_l P_p |h_lk|^2, measured from the true PT channels.
  Eigen::VectorXd reverse_interference() const;
};

struct SelectionResult {
  std::vector<int> selected;   // ascending SU indices
  std::vector<double> powers;  // aligned with selected
  Eigen::MatrixXcd vectors;    // M x |selected| ZF vectors, aligned
  std::vector<int> dropped;    // iteration trace, in drop order
  int achieved = 0;            // SUs meeting their rate target (K**)
  double total_power() const;
};

DownlinkScenario draw_scenario(const DownlinkConfig& config, std::mt19937_64& rng);

// Fresh fading and estimation errors on fixed geometry/slow fading.
void redraw_channels(DownlinkScenario& sc, std::mt19937_64& rng);

// Unit-norm ZF vectors for the first `wanted` columns of `channels`
// (SU estimates first, then PR estimates); every vector is orthogonal to
// all other columns.
Eigen::MatrixXcd zf_vectors(const Eigen::MatrixXcd& channels, int wanted);

// QoS powers P_k = (2^R0 - 1)(noise + I_k + eps2) / |hhat_k^H v_k|^2.
std::vector<double> qos_power(const std::vector<int>& set,
                              const Eigen::MatrixXcd& vectors,
                              const DownlinkScenario& sc);

SelectionResult dmp_select(const DownlinkScenario& sc, bool update_vectors = true);
SelectionResult mdml_select(const DownlinkScenario& sc);
SelectionResult optimal_select(const DownlinkScenario& sc, int cap = 12);

std::vector<double> realized_rate(const SelectionResult& result,
                                  const DownlinkScenario& sc);
std::vector<double> realized_interference(const SelectionResult& result,
                                          const DownlinkScenario& sc);

double sinr_loss(double interference, double noise_power);

// Water level mu with sum_k (mu - 1/lambda_k)^+ equal to the budget.
double water_level(const std::vector<double>& lambdas, double budget);

}  // namespace cr::mimo
