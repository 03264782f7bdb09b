#include "artifact/cr_scene.hpp"

#include <cmath>

#include "artifact/errors.hpp"
#include "artifact/rng.hpp"

namespace cr::scene {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

NodeLayout uniform_layout(int k, double side, Vec2 target, Vec2 interferer,
                          std::mt19937_64& rng) {
  if (k < 1) throw DomainError("uniform_layout: need at least one CR");
  if (!(side > 0.0)) throw DomainError("uniform_layout: side must be positive");
  if (target == interferer)
    throw DomainError("uniform_layout: target and interferer must differ");
  NodeLayout out;
  out.target = target;
  out.interferer = interferer;
  out.crs.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double x = target[0] + side * (uniform_double(rng) - 0.5);
    const double y = target[1] + side * (uniform_double(rng) - 0.5);
    out.crs.push_back({x, y});
  }
  return out;
}

NodeLayout fixed_grid_layout() {
  NodeLayout out;
  out.target = {0.0, 0.0};
  out.interferer = {20.0, 20.0};
  for (int ix = 0; ix < 5; ++ix) {
    const double x = -40.0 + 20.0 * ix;
    for (int iy = 0; iy < 10; ++iy) {
      const double y = -45.0 + 10.0 * iy;
      out.crs.push_back({x, y});
    }
  }
  return out;
}

std::vector<PowerPair> received_powers(const NodeLayout& layout,
                                       const PropagationParams& params,
                                       double p_t_dbm, double p_i_dbm,
                                       std::mt19937_64& rng) {
  if (!(params.path_loss_exponent > 0.0))
    throw DomainError("received_powers: path-loss exponent must be positive");
  if (!(params.reference_distance > 0.0))
    throw DomainError("received_powers: reference distance must be positive");
  if (params.shadowing_std_db < 0.0)
    throw DomainError("received_powers: shadowing std must be nonnegative");

  std::vector<PowerPair> out;
  out.reserve(layout.crs.size());
  for (const auto& cr : layout.crs) {
    const double dt = distance(cr, layout.target);
    const double di = distance(cr, layout.interferer);
    if (dt == 0.0 || di == 0.0)
      throw DomainError("received_powers: CR coincides with a source");
    const double qt = params.shadowing_std_db * normal(rng);
    const double qi = params.shadowing_std_db * normal(rng);
    const double pt_db = p_t_dbm -
        10.0 * params.path_loss_exponent * std::log10(dt / params.reference_distance) - qt;
    const double pi_db = p_i_dbm -
        10.0 * params.path_loss_exponent * std::log10(di / params.reference_distance) - qi;
    out.push_back({dbm_to_mw(pt_db), dbm_to_mw(pi_db)});
  }
  return out;
}

std::vector<PowerPair> mean_received_powers(const NodeLayout& layout,
                                            const PropagationParams& params,
                                            double p_t_dbm, double p_i_dbm) {
  PropagationParams flat = params;
  flat.shadowing_std_db = 0.0;
  std::mt19937_64 unused(0);
  return received_powers(layout, flat, p_t_dbm, p_i_dbm, unused);
}

wave::SampledSignal compose_rx(const wave::SampledSignal& s_t,
                               const wave::SampledSignal& s_i, double p_tk,
                               double p_ik, double sigma_w2,
                               std::mt19937_64& rng) {
  if (s_t.samples.size() != s_i.samples.size())
    throw DomainError("compose_rx: signals must have equal length");
  if (s_t.sample_period != s_i.sample_period)
    throw DomainError("compose_rx: signals must share the sampling period");
  if (p_tk < 0.0 || p_ik < 0.0 || sigma_w2 < 0.0)
    throw DomainError("compose_rx: powers must be nonnegative");

  const double at = std::sqrt(p_tk);
  const double ai = std::sqrt(p_ik);
  wave::SampledSignal out;
  out.sample_period = s_t.sample_period;
  out.cyclic_frequency = s_t.cyclic_frequency;
  out.samples.resize(s_t.samples.size());
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    std::complex<double> w{0.0, 0.0};
    if (sigma_w2 > 0.0) w = complex_normal(rng, sigma_w2);
    out.samples[n] = at * s_t.samples[n] + ai * s_i.samples[n] + w;
  }
  return out;
}

}  // namespace cr::scene
