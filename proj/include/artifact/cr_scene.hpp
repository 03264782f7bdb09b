#pragma once
#include <array>
#include <random>
#include <vector>

#include "artifact/waveforms.hpp"

namespace cr::scene {

using Vec2 = std::array<double, 2>;

struct NodeLayout {
  std::vector<Vec2> crs;
  Vec2 target{0.0, 0.0};
  Vec2 interferer{0.0, 0.0};
};

struct PropagationParams {
  double path_loss_exponent = 3.8;
  double reference_distance = 1.0;  // meters
  double shadowing_std_db = 0.0;
  double noise_power = 0.0;         // linear (mW)
};

struct PowerPair {
  double target;      // p_tk, linear
  double interferer;  // p_ik, linear
};

NodeLayout uniform_layout(int k, double side, Vec2 target, Vec2 interferer,
                          std::mt19937_64& rng);

// The fixed 5x10 evaluation grid: x in {-40,...,40}, y in {-45,...,45},
// target at the origin, interferer at (20, 20).
NodeLayout fixed_grid_layout();

std::vector<PowerPair> received_powers(const NodeLayout& layout,
                                       const PropagationParams& params,
                                       double p_t_dbm, double p_i_dbm,
                                       std::mt19937_64& rng);

// Path-loss-only powers (no shadowing draw); the deterministic mean used by
// the closed-form error expressions.
std::vector<PowerPair> mean_received_powers(const NodeLayout& layout,
                                            const PropagationParams& params,
                                            double p_t_dbm, double p_i_dbm);

wave::SampledSignal compose_rx(const wave::SampledSignal& s_t,
                               const wave::SampledSignal& s_i, double p_tk,
                               double p_ik, double sigma_w2,
                               std::mt19937_64& rng);

double db_to_linear(double db);
double dbm_to_mw(double dbm);
double distance(const Vec2& a, const Vec2& b);

}  // namespace cr::scene
