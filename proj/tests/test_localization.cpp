#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "artifact/errors.hpp"
#include "artifact/localization.hpp"
#include "artifact/rng.hpp"

using namespace cr;
using cd = std::complex<double>;

TEST_CASE("cyclic WCL weights positions by squared CAC magnitude") {
  std::vector<cd> cacs{{1.0, 0.0}, {0.0, 2.0}};
  std::vector<scene::Vec2> pos{{0.0, 0.0}, {10.0, 0.0}};
  auto est = wcl::cyclic_wcl(cacs, pos);
  CHECK(est.position[0] == doctest::Approx(8.0));  // (1*0 + 4*10) / 5
  CHECK(est.position[1] == doctest::Approx(0.0));
  CHECK(est.weights[0] == doctest::Approx(1.0));
  CHECK(est.weights[1] == doctest::Approx(4.0));
}

TEST_CASE("cyclic WCL with one nonzero CAC returns that CR's position") {
  std::vector<cd> cacs{{0.0, 0.0}, {0.3, -0.4}, {0.0, 0.0}};
  std::vector<scene::Vec2> pos{{-5.0, 1.0}, {2.0, 7.0}, {9.0, -3.0}};
  auto est = wcl::cyclic_wcl(cacs, pos);
  CHECK(est.position[0] == doctest::Approx(2.0));
  CHECK(est.position[1] == doctest::Approx(7.0));
}

TEST_CASE("cyclic WCL rejects all-zero CACs and size mismatches") {
  std::vector<scene::Vec2> pos{{0.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(wcl::cyclic_wcl({{0.0, 0.0}, {0.0, 0.0}}, pos), DomainError);
  CHECK_THROWS_AS(wcl::cyclic_wcl({{1.0, 0.0}}, pos), DomainError);
  CHECK_THROWS_AS(wcl::cyclic_wcl({}, {}), DomainError);
}

TEST_CASE("classic WCL uses the powers directly as weights") {
  auto est = wcl::classic_wcl({1.0, 3.0}, {{0.0, 0.0}, {4.0, 0.0}});
  CHECK(est.position[0] == doctest::Approx(3.0));
  CHECK(est.position[1] == doctest::Approx(0.0));
  CHECK_THROWS_AS(wcl::classic_wcl({-1.0, 2.0}, {{0.0, 0.0}, {1.0, 0.0}}),
                  DomainError);
  CHECK_THROWS_AS(wcl::classic_wcl({0.0, 0.0}, {{0.0, 0.0}, {1.0, 0.0}}),
                  DomainError);
}

TEST_CASE("classic WCL on squared CAC magnitudes reproduces cyclic WCL") {
  auto rng = trial_rng(11, 0);
  std::vector<cd> cacs;
  std::vector<scene::Vec2> pos;
  std::vector<double> sq;
  for (int k = 0; k < 12; ++k) {
    cacs.push_back(complex_normal(rng, 1.0) + cd{0.5, 0.0});
    pos.push_back({20.0 * uniform_double(rng) - 10.0, 20.0 * uniform_double(rng) - 10.0});
    sq.push_back(std::norm(cacs.back()));
  }
  auto a = wcl::cyclic_wcl(cacs, pos);
  auto b = wcl::classic_wcl(sq, pos);
  CHECK(a.position[0] == doctest::Approx(b.position[0]).epsilon(1e-12));
  CHECK(a.position[1] == doctest::Approx(b.position[1]).epsilon(1e-12));
}

TEST_CASE("WCL estimates are invariant to weight scaling and follow translation") {
  std::vector<double> p{0.5, 2.0, 1.25};
  std::vector<scene::Vec2> pos{{-3.0, 2.0}, {5.0, 5.0}, {1.0, -4.0}};
  auto base = wcl::classic_wcl(p, pos);

  std::vector<double> scaled;
  for (double v : p) scaled.push_back(7.5 * v);
  auto s = wcl::classic_wcl(scaled, pos);
  CHECK(s.position[0] == doctest::Approx(base.position[0]).epsilon(1e-12));
  CHECK(s.position[1] == doctest::Approx(base.position[1]).epsilon(1e-12));

  std::vector<scene::Vec2> shifted;
  for (const auto& q : pos) shifted.push_back({q[0] + 11.0, q[1] - 2.5});
  auto t = wcl::classic_wcl(p, shifted);
  CHECK(t.position[0] == doctest::Approx(base.position[0] + 11.0));
  CHECK(t.position[1] == doctest::Approx(base.position[1] - 2.5));
}

TEST_CASE("FVC of identical realizations is zero") {
  auto rec = wcl::fvc({{0.7, -0.2}, {0.7, -0.2}, {0.7, -0.2}});
  CHECK(rec.fvc == doctest::Approx(0.0));
  CHECK(rec.mean_power == doctest::Approx(0.53));
  CHECK(rec.realizations == 3);
  CHECK(rec.last_cac == cd{0.7, -0.2});
}

TEST_CASE("FVC clamps the raw ratio into [0, 1]") {
  auto rec = wcl::fvc({{1.0, 0.0}, {-1.0, 0.0}});
  CHECK(rec.fvc_raw == doctest::Approx(2.0));  // v_s = 2, e_s = 1
  CHECK(rec.fvc == doctest::Approx(1.0));
}

TEST_CASE("FVC input guards") {
  CHECK_THROWS_AS(wcl::fvc({{1.0, 0.0}}), DomainError);
  CHECK_THROWS_AS(wcl::fvc({{0.0, 0.0}, {0.0, 0.0}}), DomainError);
}

TEST_CASE("FVC of a zero-mean Gaussian sample concentrates near 1") {
  auto rng = trial_rng(21, 0);
  std::vector<cd> z(10000);
  for (auto& v : z) v = complex_normal(rng, 2.0);
  auto rec = wcl::fvc(z);
  CHECK(rec.fvc_raw > 0.97);
  CHECK(rec.fvc_raw < 1.03);
}

TEST_CASE("FVC shrinks as the deterministic component grows") {
  auto rng = trial_rng(22, 0);
  std::vector<cd> base(5000);
  for (auto& v : base) v = complex_normal(rng, 1.0);
  double prev = 2.0;
  for (double mean : {0.0, 1.0, 3.0, 10.0}) {
    std::vector<cd> z = base;
    for (auto& v : z) v += cd{mean, 0.0};
    auto rec = wcl::fvc(z);
    CHECK(rec.fvc_raw < prev);
    prev = rec.fvc_raw;
  }
}

static std::vector<wcl::FvcRecord> make_records(const std::vector<double>& fvcs,
                                                const std::vector<cd>& cacs) {
  std::vector<wcl::FvcRecord> recs(fvcs.size());
  for (std::size_t k = 0; k < fvcs.size(); ++k) {
    recs[k].fvc = fvcs[k];
    recs[k].fvc_raw = fvcs[k];
    recs[k].realizations = 60;
    recs[k].last_cac = cacs[k];
    recs[k].mean_power = std::norm(cacs[k]);
  }
  return recs;
}

TEST_CASE("improved WCL at threshold 1 equals cyclic WCL on the final CACs") {
  std::vector<cd> cacs{{0.9, 0.1}, {0.2, 0.4}, {-0.5, 0.3}};
  std::vector<scene::Vec2> pos{{0.0, 0.0}, {10.0, -5.0}, {-4.0, 8.0}};
  auto recs = make_records({0.2, 0.8, 0.5}, cacs);
  auto a = wcl::improved_cyclic_wcl(recs, pos, 1.0);
  auto b = wcl::cyclic_wcl(cacs, pos);
  CHECK(a.position[0] == doctest::Approx(b.position[0]).epsilon(1e-12));
  CHECK(a.position[1] == doctest::Approx(b.position[1]).epsilon(1e-12));
}

TEST_CASE("improved WCL keeps only CRs at or below the threshold") {
  std::vector<cd> cacs{{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
  std::vector<scene::Vec2> pos{{0.0, 0.0}, {6.0, 0.0}, {0.0, 9.0}};
  auto recs = make_records({0.1, 0.3, 0.9}, cacs);
  auto est = wcl::improved_cyclic_wcl(recs, pos, 0.3);
  CHECK(est.included[0] == 1);
  CHECK(est.included[1] == 1);
  CHECK(est.included[2] == 0);
  CHECK(est.position[0] == doctest::Approx(3.0));
  CHECK(est.position[1] == doctest::Approx(0.0));
  CHECK(est.weights[2] == doctest::Approx(0.0));
  CHECK_THROWS_AS(wcl::improved_cyclic_wcl(recs, pos, 0.05), DomainError);
}

TEST_CASE("improved WCL can average the per-CR mean power as weights") {
  std::vector<cd> cacs{{2.0, 0.0}, {1.0, 0.0}};
  std::vector<scene::Vec2> pos{{0.0, 0.0}, {5.0, 0.0}};
  auto recs = make_records({0.0, 0.0}, cacs);
  recs[0].mean_power = 1.0;  // decouple from |last_cac|^2 = 4
  auto inst = wcl::improved_cyclic_wcl(recs, pos, 1.0, false);
  auto avg = wcl::improved_cyclic_wcl(recs, pos, 1.0, true);
  CHECK(inst.position[0] == doctest::Approx(1.0));
  CHECK(avg.position[0] == doctest::Approx(2.5));
}

TEST_CASE("tightening the threshold never adds CRs") {
  auto rng = trial_rng(23, 0);
  std::vector<double> fvcs;
  std::vector<cd> cacs;
  std::vector<scene::Vec2> pos;
  for (int k = 0; k < 20; ++k) {
    fvcs.push_back(uniform_double(rng));
    cacs.push_back({1.0 + uniform_double(rng), 0.0});
    pos.push_back({10.0 * uniform_double(rng), 10.0 * uniform_double(rng)});
  }
  auto recs = make_records(fvcs, cacs);
  std::vector<char> prev(20, 1);
  for (double phi0 : {0.95, 0.7, 0.5, 0.3}) {
    auto est = wcl::improved_cyclic_wcl(recs, pos, phi0);
    for (int k = 0; k < 20; ++k) {
      CHECK(est.included[k] <= prev[k]);
    }
    prev = est.included;
  }
}

TEST_CASE("suboptimal threshold picks the low-error cluster") {
  // CR 0 sits on the target; admitting CR 1 drags the centroid far away.
  std::vector<cd> cacs{{1.0, 0.0}, {1.0, 0.0}};
  std::vector<scene::Vec2> pos{{0.0, 0.0}, {10.0, 10.0}};
  auto recs = make_records({0.1, 0.9}, cacs);
  auto sub = wcl::suboptimal_threshold(recs, pos);
  CHECK_FALSE(sub.degenerate);
  CHECK(sub.phi0 == doctest::Approx(0.1));
}

TEST_CASE("suboptimal threshold averages every member of the chosen cluster") {
  std::vector<cd> cacs(4, cd{1.0, 0.0});
  std::vector<scene::Vec2> pos{{0.1, 0.0}, {-0.1, 0.0}, {0.0, 0.1}, {50.0, 50.0}};
  auto recs = make_records({0.05, 0.15, 0.25, 0.95}, cacs);
  auto sub = wcl::suboptimal_threshold(recs, pos);
  CHECK_FALSE(sub.degenerate);
  CHECK(sub.phi0 == doctest::Approx((0.05 + 0.15 + 0.25) / 3.0));
}

TEST_CASE("suboptimal threshold degenerates when every split looks the same") {
  // Equal FVCs: every candidate threshold admits the full set.
  std::vector<cd> cacs{{1.0, 0.0}, {2.0, 0.0}, {0.5, 0.0}};
  std::vector<scene::Vec2> pos{{1.0, 2.0}, {3.0, -1.0}, {0.0, 4.0}};
  auto recs = make_records({0.4, 0.4, 0.4}, cacs);
  auto sub = wcl::suboptimal_threshold(recs, pos);
  CHECK(sub.degenerate);
  CHECK(sub.phi0 == doctest::Approx(0.4));
}

TEST_CASE("FVC estimator statistics at two realizations") {
  wcl::FvcMoments m;
  m.cac_variance = 0.7;
  m.cac_mean_sq = 0.3;
  m.power_variance = 1.1;
  auto s = wcl::fvc_stats_at(m, 2);
  const double mu4 = 2.0 * 0.7 * 0.7;
  CHECK(s.mu_vs == doctest::Approx(0.7));
  CHECK(s.var_vs == doctest::Approx((mu4 + 0.7 * 0.7) / 2.0));
  CHECK(s.mu_es == doctest::Approx(1.0));
  CHECK(s.var_es == doctest::Approx(1.1 / 2.0));
}

TEST_CASE("FVC estimator statistics shrink like 1/M") {
  wcl::FvcMoments m;
  m.cac_variance = 0.5;
  m.cac_mean_sq = 0.25;
  m.power_variance = 0.9;
  auto s1 = wcl::fvc_stats_at(m, 1000);
  auto s4 = wcl::fvc_stats_at(m, 4000);
  CHECK(s1.var_es / s4.var_es == doctest::Approx(4.0));
  CHECK(s1.var_vs / s4.var_vs == doctest::Approx(4.0).epsilon(0.01));
  CHECK(s1.mu_vs == doctest::Approx(s4.mu_vs));
  CHECK(s1.mu_es == doctest::Approx(s4.mu_es));
}

TEST_CASE("FVC estimator statistics against Monte Carlo batches") {
  const double var = 0.8, mean_re = 0.6;
  wcl::FvcMoments m;
  m.cac_variance = var;
  m.cac_mean_sq = mean_re * mean_re;
  // var(|z|^2) for complex Gaussian z: var^2 + 2 var |mu|^2.
  m.power_variance = var * var + 2.0 * var * m.cac_mean_sq;

  const long batch = 100;
  const int n_batches = 20000;
  auto rng = trial_rng(24, 0);
  double s_vs = 0.0, s_vs2 = 0.0, s_es = 0.0, s_es2 = 0.0, s_ves = 0.0;
  for (int b = 0; b < n_batches; ++b) {
    cd mean{0.0, 0.0};
    double es = 0.0;
    std::vector<cd> z(batch);
    for (auto& v : z) {
      v = complex_normal(rng, var) + cd{mean_re, 0.0};
      mean += v;
      es += std::norm(v);
    }
    mean /= static_cast<double>(batch);
    es /= static_cast<double>(batch);
    double vs = 0.0;
    for (const auto& v : z) vs += std::norm(v - mean);
    vs /= static_cast<double>(batch - 1);
    s_vs += vs;
    s_vs2 += vs * vs;
    s_es += es;
    s_es2 += es * es;
    s_ves += vs * es;
  }
  const double mu_vs = s_vs / n_batches;
  const double mu_es = s_es / n_batches;
  const double var_vs = s_vs2 / n_batches - mu_vs * mu_vs;
  const double var_es = s_es2 / n_batches - mu_es * mu_es;
  const double cov = s_ves / n_batches - mu_vs * mu_es;

  auto s = wcl::fvc_stats_at(m, batch);
  CHECK(s.mu_vs == doctest::Approx(mu_vs).epsilon(0.02));
  CHECK(s.mu_es == doctest::Approx(mu_es).epsilon(0.02));
  CHECK(s.var_vs == doctest::Approx(var_vs).epsilon(0.05));
  CHECK(s.var_es == doctest::Approx(var_es).epsilon(0.05));
  CHECK(s.cov_vs_es == doctest::Approx(cov).epsilon(0.08));
}

TEST_CASE("required realizations starts the scan right above 50") {
  wcl::FvcMoments m;
  m.cac_variance = 0.1;
  m.cac_mean_sq = 1.0;
  m.power_variance = 0.05;
  CHECK(wcl::required_realizations(0.9, 100.0, m) == 51);
}

TEST_CASE("required realizations grows as the width target tightens") {
  wcl::FvcMoments m;
  m.cac_variance = 0.4;
  m.cac_mean_sq = 0.8;
  m.power_variance = 0.6;
  const int loose = wcl::required_realizations(0.9, 0.04, m);
  const int tight = wcl::required_realizations(0.9, 0.02, m);
  CHECK(tight > loose);
  // Half-width scales like 1/sqrt(M); quartering delta needs ~16x samples.
  const int tighter = wcl::required_realizations(0.9, 0.01, m);
  CHECK(static_cast<double>(tighter) / loose == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("required realizations enforces its cap") {
  wcl::FvcMoments m;
  m.cac_variance = 1.0;
  m.cac_mean_sq = 1.0;
  m.power_variance = 3.0;
  CHECK_THROWS_AS(wcl::required_realizations(0.9, 1e-6, m, 1000), NumericalError);
  CHECK_THROWS_AS(wcl::required_realizations(1.5, 0.1, m), DomainError);
  CHECK_THROWS_AS(wcl::required_realizations(0.9, -1.0, m), DomainError);
}

TEST_CASE("operation counts at unit sizes") {
  auto c = wcl::ops_count(1, 1, 1, 0);
  CHECK(c.wcl == 60);
  CHECK(c.cyclic == 80);
  CHECK(c.improved == 152);
}

TEST_CASE("operation counts scale with their leading terms") {
  const long long k = 50, n = 500, m = 60;
  auto c = wcl::ops_count(k, n, m);
  CHECK(c.wcl == 11 * k * n + 23 * k + 26);
  CHECK(c.cyclic == 21 * k * n + 23 * k + 36);
  CHECK(c.improved == 21 * m * k * n + 24 * m * k + 19 * m + 96 * k + 17);
  // The improved estimator costs about M times the plain cyclic one.
  const double ratio = static_cast<double>(c.improved) / static_cast<double>(c.cyclic);
  CHECK(ratio == doctest::Approx(static_cast<double>(m)).epsilon(0.1));
  CHECK_THROWS_AS(wcl::ops_count(0, 1, 1), DomainError);
}
