#pragma once
#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "artifact/cr_scene.hpp"
#include "artifact/localization.hpp"
#include "artifact/waveforms.hpp"

namespace cr::wcl_theory {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using PowerMatrix = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// Mean and covariance of the stacked Re/Im vector of
// (CAC(s_t), CAC(s_i), CCC(s_t,s_i), CAC(w), CCC(s_t,w), CCC(s_i,w)).
struct ThetaMoments {
  Vec12 mean = Vec12::Zero();
  Mat12 cov = Mat12::Zero();
  std::array<std::complex<double>, 6> mean_c{};
  long samples = 0;
};

ThetaMoments theta_moments(const wave::SingleCarrierSpec& target,
                           const wave::SingleCarrierSpec& interferer,
                           double sigma_w2, long n, double sample_rate);

// Per-CR coefficient column (p_t, p_i, sqrt(p_t p_i), 1, sqrt(p_t), sqrt(p_i)).
Eigen::Matrix<double, 6, 1> power_vector(const scene::PowerPair& p);
PowerMatrix power_matrix(const std::vector<scene::PowerPair>& powers);

struct QuadraticForms {
  Mat12 ax = Mat12::Zero();
  Mat12 ay = Mat12::Zero();
  Mat12 b = Mat12::Zero();
};

QuadraticForms build_quadratic_forms(const PowerMatrix& p,
                                     const std::vector<scene::Vec2>& positions,
                                     const std::vector<char>* mask = nullptr);

// E[(theta^T A theta / theta^T B theta)^2] for theta ~ N(mean, cov).
double rqgv_second_moment(const Mat12& a, const Mat12& b, const Vec12& mean,
                          const Mat12& cov);

// E[x^2] + E[y^2] of the weighted-centroid estimate (target at the origin).
double error_second_moment(const QuadraticForms& forms, const ThetaMoments& tm);

struct SceneSpec {
  wave::SingleCarrierSpec target;
  wave::SingleCarrierSpec interferer;
  double p_t_dbm = 0.0;
  double p_i_dbm = 0.0;
  double sample_rate = 0.0;
};

double theoretical_rmse(const scene::NodeLayout& layout,
                        const scene::PropagationParams& params,
                        const SceneSpec& spec, long n,
                        const std::vector<char>* mask = nullptr);

// Scale-free FVC closed form in the power ratio rho = p_t/p_i.
struct FvcSummaries {
  double v_t = 0.0;   // var CAC(s_t)
  double e_t = 0.0;   // E|CAC(s_t)|^2
  double e_i = 0.0;   // E|CAC(s_i)|^2
  double e_ti = 0.0;  // E|CCC(s_t,s_i)|^2
};

FvcSummaries fvc_summaries(const ThetaMoments& tm);
double theoretical_fvc(double rho, const FvcSummaries& s);

// Exact per-CR FVC including noise terms.
double theoretical_fvc_exact(const Eigen::Matrix<double, 6, 1>& p,
                             const ThetaMoments& tm);

struct TheoryContext {
  PowerMatrix p;
  std::vector<scene::Vec2> positions;
  ThetaMoments tm;
};

struct ThresholdChoice {
  double phi0 = 0.0;
  double error_second_moment = 0.0;
  int included = 0;  // CRs admitted at the chosen threshold
};

// Predicted error at each sorted sample threshold; thresholds within
// tie_band of the minimum count as ties and resolve to the smallest one.
ThresholdChoice optimum_fvc_threshold(const std::vector<wcl::FvcRecord>& records,
                                      const TheoryContext& ctx,
                                      double tie_band = 0.05);

wcl::FvcMoments fvc_cac_moments(const ThetaMoments& tm,
                                const Eigen::Matrix<double, 6, 1>& p);

wcl::FvcStats fvc_estimator_stats(const ThetaMoments& tm,
                                  const Eigen::Matrix<double, 6, 1>& p, long m);

}  // namespace cr::wcl_theory
