#include "artifact/localization_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "artifact/errors.hpp"

namespace cr::wcl_theory {

namespace {

constexpr double kPi = 3.141592653589793238;

struct Taps {
  long off_min = 0;                // sample offset of values[0]
  std::vector<double> values;
};

long integer_sps(double symbol_period, double sample_rate, const char* who) {
  const double sps = symbol_period * sample_rate;
  const long isps = std::lround(sps);
  if (isps < 2 || std::abs(sps - static_cast<double>(isps)) > 1e-9 * sps)
    throw ConfigError(std::string(who) +
                      ": closed-form moments need an integer number of samples per symbol");
  return isps;
}

Taps make_taps(const wave::SingleCarrierSpec& spec, long sps, const char* who) {
  if (spec.carrier_offset != 0.0)
    throw ConfigError(std::string(who) +
                      ": closed-form moments assume equal carriers (zero baseband offset)");
  Taps t;
  if (spec.pulse == wave::Pulse::rectangular) {
    if (!(spec.duty > 0.0) || spec.duty > 1.0)
      throw ConfigError(std::string(who) + ": duty must lie in (0, 1]");
    const long w = static_cast<long>(
        std::ceil(static_cast<double>(sps) * spec.duty - 1e-9));
    t.off_min = 0;
    t.values.assign(static_cast<std::size_t>(w),
                    spec.unit_power ? 1.0 / std::sqrt(spec.duty) : 1.0);
  } else {
    if (spec.rolloff < 0.0 || spec.rolloff > 1.0)
      throw ConfigError(std::string(who) + ": rolloff must lie in [0, 1]");
    const long span = spec.span_symbols;
    t.off_min = -span * sps;
    t.values.resize(static_cast<std::size_t>(2 * span * sps + 1));
    double sumsq = 0.0;
    for (long j = -span * sps; j <= span * sps; ++j) {
      const double g =
          wave::rrc_value(static_cast<double>(j) / static_cast<double>(sps), spec.rolloff);
      t.values[static_cast<std::size_t>(j + span * sps)] = g;
      sumsq += g * g;
    }
    if (spec.unit_power) {
      const double scale = std::sqrt(static_cast<double>(sps) / sumsq);
      for (auto& v : t.values) v *= scale;
    }
  }
  return t;
}

Eigen::MatrixXd tap_matrix(const Taps& taps, long sps, long n) {
  const long off_max = taps.off_min + static_cast<long>(taps.values.size()) - 1;
  const long l_min = static_cast<long>(std::floor(
                         static_cast<double>(0 - off_max) / static_cast<double>(sps))) - 1;
  const long l_max = static_cast<long>(std::ceil(
                         static_cast<double>(n - 1 - taps.off_min) / static_cast<double>(sps))) + 1;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, l_max - l_min + 1);
  for (long l = l_min; l <= l_max; ++l) {
    for (long nn = 0; nn < n; ++nn) {
      const long o = nn - l * sps;
      if (o >= taps.off_min && o <= off_max)
        g(nn, l - l_min) = taps.values[static_cast<std::size_t>(o - taps.off_min)];
    }
  }
  return g;
}

struct Kernels {
  Eigen::VectorXd hp;   // E|s(n)|^2
  Eigen::MatrixXd cov;  // cov(|s(n)|^2, |s(m)|^2)
  Eigen::MatrixXd c;    // E[s(n) s*(m)]
};

Kernels signal_kernels(const wave::SingleCarrierSpec& spec, double sample_rate,
                       long n, const char* who) {
  const long sps = integer_sps(spec.symbol_period, sample_rate, who);
  const Taps taps = make_taps(spec, sps, who);
  const Eigen::MatrixXd g = tap_matrix(taps, sps, n);
  const double kappa4 = wave::constellation_kurtosis(spec.constellation);
  Kernels k;
  k.c = g * g.transpose();
  const Eigen::MatrixXd g2 = g.cwiseProduct(g);
  const Eigen::MatrixXd d = g2 * g2.transpose();
  k.hp = g2.rowwise().sum();
  k.cov = (kappa4 - 2.0) * d + k.c.cwiseProduct(k.c);
  return k;
}

Eigen::Matrix2d reim_block(const Eigen::MatrixXd& cov, double omega) {
  const long n = cov.rows();
  Eigen::VectorXd u1(n), u2(n);
  for (long i = 0; i < n; ++i) {
    u1(i) = std::cos(omega * static_cast<double>(i)) / static_cast<double>(n);
    u2(i) = -std::sin(omega * static_cast<double>(i)) / static_cast<double>(n);
  }
  Eigen::Matrix2d b;
  const Eigen::VectorXd cu1 = cov * u1;
  const Eigen::VectorXd cu2 = cov * u2;
  b << u1.dot(cu1), u1.dot(cu2), u2.dot(cu1), u2.dot(cu2);
  b(1, 0) = b(0, 1);
  return b;
}

Eigen::Matrix2d diag_block(const Eigen::VectorXd& kdiag, double omega) {
  const long n = kdiag.size();
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  for (long i = 0; i < n; ++i) {
    const double u1 = std::cos(omega * static_cast<double>(i)) / static_cast<double>(n);
    const double u2 = -std::sin(omega * static_cast<double>(i)) / static_cast<double>(n);
    b(0, 0) += kdiag(i) * u1 * u1;
    b(0, 1) += kdiag(i) * u1 * u2;
    b(1, 1) += kdiag(i) * u2 * u2;
  }
  b(1, 0) = b(0, 1);
  return b;
}

Mat12 block_embed(const Eigen::Matrix<double, 6, 6>& q) {
  Mat12 out = Mat12::Zero();
  out.topLeftCorner<6, 6>() = q;
  out.bottomRightCorner<6, 6>() = q;
  return out;
}

}  // namespace

ThetaMoments theta_moments(const wave::SingleCarrierSpec& target,
                           const wave::SingleCarrierSpec& interferer,
                           double sigma_w2, long n, double sample_rate) {
  if (n < 1) throw DomainError("theta_moments: need at least one sample");
  if (sigma_w2 < 0.0) throw DomainError("theta_moments: noise power must be nonnegative");
  if (!(sample_rate > 0.0)) throw ConfigError("theta_moments: sample rate must be positive");

  const double ts = 1.0 / sample_rate;
  const double alpha_t = 1.0 / target.symbol_period;
  const double omega = 2.0 * kPi * alpha_t * ts;

  const Kernels kt = signal_kernels(target, sample_rate, n, "theta_moments(target)");
  const Kernels ki = signal_kernels(interferer, sample_rate, n, "theta_moments(interferer)");

  ThetaMoments tm;
  tm.samples = n;

  std::complex<double> m_t{0.0, 0.0}, m_i{0.0, 0.0};
  for (long i = 0; i < n; ++i) {
    const double ang = -omega * static_cast<double>(i);
    const std::complex<double> e{std::cos(ang), std::sin(ang)};
    m_t += kt.hp(i) * e;
    m_i += ki.hp(i) * e;
  }
  tm.mean_c[0] = m_t / static_cast<double>(n);
  tm.mean_c[1] = m_i / static_cast<double>(n);
  // Noise CAC mean: a Dirichlet kernel that vanishes when alpha*N*Ts is integer.
  const double ant = alpha_t * static_cast<double>(n) * ts;
  if (std::abs(ant - std::round(ant)) > 1e-9 && sigma_w2 > 0.0) {
    const double num = std::sin(kPi * alpha_t * static_cast<double>(n) * ts);
    const double den = std::sin(kPi * alpha_t * ts);
    const double ang = -kPi * alpha_t * static_cast<double>(n - 1) * ts;
    tm.mean_c[3] = (sigma_w2 / static_cast<double>(n)) * (num / den) *
                   std::complex<double>(std::cos(ang), std::sin(ang));
  }

  std::array<Eigen::Matrix2d, 6> blocks;
  blocks[0] = reim_block(kt.cov, omega);
  blocks[1] = reim_block(ki.cov, omega);
  blocks[2] = reim_block(2.0 * kt.c.cwiseProduct(ki.c), omega);
  blocks[3] = diag_block(Eigen::VectorXd::Constant(n, sigma_w2 * sigma_w2), omega);
  blocks[4] = diag_block(2.0 * sigma_w2 * kt.hp, omega);
  blocks[5] = diag_block(2.0 * sigma_w2 * ki.hp, omega);

  for (int b = 0; b < 6; ++b) {
    tm.mean(b) = tm.mean_c[b].real();
    tm.mean(b + 6) = tm.mean_c[b].imag();
    tm.cov(b, b) = blocks[b](0, 0);
    tm.cov(b, b + 6) = blocks[b](0, 1);
    tm.cov(b + 6, b) = blocks[b](0, 1);
    tm.cov(b + 6, b + 6) = blocks[b](1, 1);
  }
  return tm;
}

Eigen::Matrix<double, 6, 1> power_vector(const scene::PowerPair& p) {
  Eigen::Matrix<double, 6, 1> v;
  v << p.target, p.interferer, std::sqrt(p.target * p.interferer), 1.0,
      std::sqrt(p.target), std::sqrt(p.interferer);
  return v;
}

PowerMatrix power_matrix(const std::vector<scene::PowerPair>& powers) {
  PowerMatrix p(6, powers.size());
  for (std::size_t k = 0; k < powers.size(); ++k) p.col(k) = power_vector(powers[k]);
  return p;
}

QuadraticForms build_quadratic_forms(const PowerMatrix& p,
                                     const std::vector<scene::Vec2>& positions,
                                     const std::vector<char>* mask) {
  const long k = p.cols();
  if (k < 1 || positions.size() != static_cast<std::size_t>(k))
    throw DomainError("build_quadratic_forms: need matching powers and positions");

  Eigen::VectorXd sel = Eigen::VectorXd::Ones(k);
  if (mask) {
    if (mask->size() != static_cast<std::size_t>(k))
      throw DomainError("build_quadratic_forms: mask size mismatch");
    bool any = false;
    for (long i = 0; i < k; ++i) {
      sel(i) = (*mask)[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
      any = any || sel(i) > 0.0;
    }
    if (!any) throw DomainError("build_quadratic_forms: empty mask");
  }

  const PowerMatrix ps = p * sel.asDiagonal();
  Eigen::VectorXd x(k), y(k);
  for (long i = 0; i < k; ++i) {
    x(i) = positions[static_cast<std::size_t>(i)][0];
    y(i) = positions[static_cast<std::size_t>(i)][1];
  }
  QuadraticForms out;
  out.ax = block_embed(ps * x.asDiagonal() * ps.transpose());
  out.ay = block_embed(ps * y.asDiagonal() * ps.transpose());
  out.b = block_embed(ps * ps.transpose());
  return out;
}

double rqgv_second_moment(const Mat12& a, const Mat12& b, const Vec12& mean,
                          const Mat12& cov) {
  const Mat12 sig = cov + 1e-12 * cov.trace() * Mat12::Identity();
  Eigen::LLT<Mat12> llt(sig);
  if (llt.info() != Eigen::Success)
    throw NumericalError("rqgv_second_moment: covariance not positive definite", 0.0);
  const Mat12 c = llt.matrixL();

  Mat12 s = c.transpose() * b * c;
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat12> es(s);
  Eigen::Matrix<double, 12, 1> lam = es.eigenvalues();
  const Mat12 v = es.eigenvectors();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0))
    throw DomainError("rqgv_second_moment: denominator form is zero");
  double lmin_pos = lmax;
  for (int i = 0; i < 12; ++i) {
    if (lam(i) < 1e-14 * lmax) lam(i) = 0.0;
    if (lam(i) > 0.0) lmin_pos = std::min(lmin_pos, lam(i));
  }

  const Mat12 astar = v.transpose() * c.transpose() * a * c * v;
  const Vec12 mu = v.transpose() * c.triangularView<Eigen::Lower>().solve(mean);
  const double mu2 = std::max(mu.squaredNorm(), 1.0);

  const double t_lo = 1e-6 / (lmax * mu2);
  const double t_hi = 1e10 / lmin_pos;
  constexpr int kSegments = 240;
  const double ratio = std::pow(t_hi / t_lo, 1.0 / (kSegments - 1.0));

  using gl = boost::math::quadrature::gauss<double, 16>;
  const auto& xg = gl::abscissa();  // positive half of the nodes
  const auto& wg = gl::weights();

  auto integrand = [&](double t) {
    Vec12 w, iw, zeta;
    double lndet = 0.0, expo = 0.0;
    for (int i = 0; i < 12; ++i) {
      w(i) = 1.0 + 2.0 * t * lam(i);
      lndet -= 0.5 * std::log(w(i));
      expo -= 0.5 * mu(i) * mu(i) * (2.0 * t * lam(i)) / w(i);
      iw(i) = 1.0 / std::sqrt(w(i));
      zeta(i) = mu(i) * iw(i);
    }
    const Mat12 r = iw.asDiagonal() * astar * iw.asDiagonal();
    const Vec12 rz = r * zeta;
    const double tr_r = r.trace();
    const double tr_r2 = r.cwiseProduct(r).sum();
    const double val =
        2.0 * (tr_r2 + 2.0 * rz.squaredNorm()) + std::pow(tr_r + zeta.dot(rz), 2);
    return t * std::exp(lndet + expo) * val;
  };

  double total = 0.0;
  double lo = 0.0, hi = t_lo;
  for (int seg = 0; seg < kSegments; ++seg) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t j = 0; j < xg.size(); ++j) {
      acc += wg[j] * integrand(mid + half * xg[j]);
      acc += wg[j] * integrand(mid - half * xg[j]);
    }
    total += half * acc;
    lo = hi;
    hi *= ratio;
  }
  if (!std::isfinite(total))
    throw NumericalError("rqgv_second_moment: integral diverged", total);
  return total;
}

double error_second_moment(const QuadraticForms& forms, const ThetaMoments& tm) {
  return rqgv_second_moment(forms.ax, forms.b, tm.mean, tm.cov) +
         rqgv_second_moment(forms.ay, forms.b, tm.mean, tm.cov);
}

double theoretical_rmse(const scene::NodeLayout& layout,
                        const scene::PropagationParams& params,
                        const SceneSpec& spec, long n,
                        const std::vector<char>* mask) {
  if (params.shadowing_std_db != 0.0)
    throw ConfigError(
        "theoretical_rmse: closed forms hold per power realization; set shadowing to zero");
  const auto powers =
      scene::mean_received_powers(layout, params, spec.p_t_dbm, spec.p_i_dbm);
  const ThetaMoments tm =
      theta_moments(spec.target, spec.interferer, params.noise_power, n, spec.sample_rate);
  const QuadraticForms forms = build_quadratic_forms(power_matrix(powers), layout.crs, mask);
  return std::sqrt(error_second_moment(forms, tm));
}

FvcSummaries fvc_summaries(const ThetaMoments& tm) {
  FvcSummaries s;
  s.v_t = tm.cov(0, 0) + tm.cov(6, 6);
  s.e_t = s.v_t + std::norm(tm.mean_c[0]);
  s.e_i = tm.cov(1, 1) + tm.cov(7, 7) + std::norm(tm.mean_c[1]);
  s.e_ti = tm.cov(2, 2) + tm.cov(8, 8);
  return s;
}

double theoretical_fvc(double rho, const FvcSummaries& s) {
  if (rho < 0.0) throw DomainError("theoretical_fvc: rho must be nonnegative");
  const double cross = rho * s.e_ti;
  const double den = rho * rho * s.e_t + s.e_i + cross;
  if (!(den > 0.0)) throw DomainError("theoretical_fvc: degenerate denominator");
  return (rho * rho * s.v_t + s.e_i + cross) / den;
}

double theoretical_fvc_exact(const Eigen::Matrix<double, 6, 1>& p,
                             const ThetaMoments& tm) {
  const double var = p.dot((tm.cov.topLeftCorner<6, 6>() +
                            tm.cov.bottomRightCorner<6, 6>()) * p);
  std::complex<double> mu{0.0, 0.0};
  for (int i = 0; i < 6; ++i) mu += p(i) * tm.mean_c[i];
  const double e2 = var + std::norm(mu);
  if (!(e2 > 0.0)) throw DomainError("theoretical_fvc_exact: degenerate CAC power");
  return 1.0 - std::norm(mu) / e2;
}

ThresholdChoice optimum_fvc_threshold(const std::vector<wcl::FvcRecord>& records,
                                      const TheoryContext& ctx, double tie_band) {
  const std::size_t k = records.size();
  if (k < 1) throw DomainError("optimum_fvc_threshold: need at least one record");
  if (ctx.positions.size() != k || ctx.p.cols() != static_cast<long>(k))
    throw DomainError("optimum_fvc_threshold: context size mismatch");
  if (tie_band < 0.0) throw DomainError("optimum_fvc_threshold: tie band must be >= 0");

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].fvc < records[b].fvc;
  });

  std::vector<double> eps2(k);
  std::vector<char> mask(k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    mask[order[j]] = 1;
    const QuadraticForms forms = build_quadratic_forms(ctx.p, ctx.positions, &mask);
    eps2[j] = error_second_moment(forms, ctx.tm);
  }

  const double best = *std::min_element(eps2.begin(), eps2.end());
  for (std::size_t j = 0; j < k; ++j) {
    if (eps2[j] <= best * (1.0 + tie_band)) {
      return {records[order[j]].fvc, eps2[j], static_cast<int>(j + 1)};
    }
  }
  return {records[order[k - 1]].fvc, eps2[k - 1], static_cast<int>(k)};
}

wcl::FvcMoments fvc_cac_moments(const ThetaMoments& tm,
                                const Eigen::Matrix<double, 6, 1>& p) {
  const Mat12 a = block_embed(p * p.transpose());
  const double e2 = (a * tm.cov).trace() + tm.mean.dot(a * tm.mean);
  std::complex<double> mu{0.0, 0.0};
  for (int i = 0; i < 6; ++i) mu += p(i) * tm.mean_c[i];
  wcl::FvcMoments m;
  m.cac_mean_sq = std::norm(mu);
  m.cac_variance = e2 - m.cac_mean_sq;
  const Mat12 as = a * tm.cov;
  m.power_variance = 2.0 * (as * as).trace() + 4.0 * tm.mean.dot(as * (a * tm.mean));
  return m;
}

wcl::FvcStats fvc_estimator_stats(const ThetaMoments& tm,
                                  const Eigen::Matrix<double, 6, 1>& p, long m) {
  if (m <= 50)
    throw DomainError("fvc_estimator_stats: Gaussian regime starts above 50 realizations");
  return wcl::fvc_stats_at(fvc_cac_moments(tm, p), m);
}

}  // namespace cr::wcl_theory
