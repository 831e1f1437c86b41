#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "onebit/estimation.hpp"

using namespace onebit;

namespace {

SystemConfig config(std::size_t m, std::size_t k, double rho_p, std::size_t trials = 1) {
  SystemConfig cfg;
  cfg.antennas = m;
  cfg.users = cfg.pilot_length = k;
  cfg.pilot_power = cfg.data_power = rho_p;
  cfg.trials = trials;
  return cfg;
}

const double kS = 1.0 / std::sqrt(2.0);

}  // namespace

TEST(LmmseEstimate, ScalarHandEvaluation) {
  const auto cfg = config(1, 1, 1.0);
  const auto r = QuantizedBlock::from_entries(ComplexMatrix::from_rows({{cplx(kS, kS)}}));
  const auto h = lmmse_estimate(cfg, r, make_pilots(cfg));
  // alpha_p = sqrt(1/pi), so h = sqrt(1/pi) (1 + j) / sqrt(2).
  const double v = 0.39894228040143268;
  EXPECT_NEAR(h(0, 0).real(), v, 1e-15);
  EXPECT_NEAR(h(0, 0).imag(), v, 1e-15);
}

TEST(LmmseEstimate, MatchesKroneckerForm) {
  // Oracle: build Phi_tilde = alpha_p (Phi kron sqrt(rho_p) I_M) explicitly and
  // apply its Hermitian to vec(R_p).
  const auto cfg = config(3, 4, 0.7);
  const auto phi = make_pilots(cfg);
  RandomStream s(41, 0);
  const auto r = quantize(sample_circular_gaussian(s, 3, 4, 1.0));
  const std::size_t m = 3, k = 4;
  const double scale = pilot_gain(cfg).alpha * std::sqrt(cfg.pilot_power);
  ComplexMatrix big(m * k, m * k);
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t i = 0; i < m; ++i) big(t * m + i, u * m + i) = scale * phi.phi(t, u);
  ComplexMatrix vec_r(m * k, 1);
  for (std::size_t i = 0; i < m * k; ++i) vec_r(i, 0) = r.matrix().data()[i];
  const auto vec_h = matmul(hermitian(big), vec_r);
  const auto h = lmmse_estimate(cfg, r, phi);
  for (std::size_t i = 0; i < m * k; ++i) EXPECT_NEAR(std::abs(h.data()[i] - vec_h(i, 0)), 0.0, 1e-14);
}

TEST(LmmseEstimate, EquivariantUnderPilotAndAntennaPermutation) {
  const auto cfg = config(5, 3, 2.0);
  auto phi = make_pilots(cfg);
  RandomStream s(42, 0);
  const auto r = quantize(sample_circular_gaussian(s, 5, 3, 1.0));
  const auto h = lmmse_estimate(cfg, r, phi);

  PilotMatrix swapped = phi;
  for (std::size_t t = 0; t < 3; ++t) std::swap(swapped.phi(t, 0), swapped.phi(t, 2));
  const auto hs = lmmse_estimate(cfg, r, swapped);
  for (std::size_t m = 0; m < 5; ++m) {
    EXPECT_EQ(hs(m, 0), h(m, 2));
    EXPECT_EQ(hs(m, 2), h(m, 0));
    EXPECT_EQ(hs(m, 1), h(m, 1));
  }

  const std::size_t perm[5] = {3, 0, 4, 1, 2};
  ComplexMatrix rp(5, 3);
  for (std::size_t m = 0; m < 5; ++m)
    for (std::size_t t = 0; t < 3; ++t) rp(m, t) = r.matrix()(perm[m], t);
  const auto hp = lmmse_estimate(cfg, QuantizedBlock::from_entries(rp), phi);
  for (std::size_t m = 0; m < 5; ++m)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(hp(m, k), h(perm[m], k));
}

TEST(LmmseEstimate, ShapeErrors) {
  const auto cfg = config(4, 2, 1.0);
  const auto phi = make_pilots(cfg);
  EXPECT_THROW(lmmse_estimate(cfg, quantize(ComplexMatrix(3, 2)), phi), std::invalid_argument);
  auto bad = cfg;
  bad.pilot_length = 3;
  EXPECT_THROW(lmmse_estimate(bad, quantize(ComplexMatrix(4, 3)), phi), std::invalid_argument);
  EXPECT_THROW(ls_estimate(cfg, quantize(ComplexMatrix(4, 3)), phi), std::invalid_argument);
}

TEST(LsEstimate, ScalarCaseAndRatioToLmmse) {
  const auto cfg1 = config(1, 1, 1.0);
  const auto r1 = QuantizedBlock::from_entries(ComplexMatrix::from_rows({{cplx(kS, kS)}}));
  EXPECT_EQ(ls_estimate(cfg1, r1, make_pilots(cfg1))(0, 0), cplx(kS, kS));

  // Both estimators scale R_p Phi^*: H_ls / H_lmmse = 1 / (alpha_p tau rho_p).
  const auto cfg = config(6, 4, 3.0);
  const auto phi = make_pilots(cfg);
  RandomStream s(43, 0);
  const auto r = quantize(sample_circular_gaussian(s, 6, 4, 1.0));
  const auto lm = lmmse_estimate(cfg, r, phi);
  const auto ls = ls_estimate(cfg, r, phi);
  const double ratio = 1.0 / (pilot_gain(cfg).alpha * 4.0 * 3.0);
  EXPECT_LT(max_abs_diff(ls, cplx(ratio, 0) * lm), 1e-14);
}

TEST(EmpiricalMse, TrivialCases) {
  RandomStream s(44, 0);
  const ChannelMatrix h{sample_circular_gaussian(s, 4, 3, 1.0)};
  EXPECT_EQ(empirical_mse(h, h.h), 0.0);
  EXPECT_DOUBLE_EQ(empirical_mse(h, ComplexMatrix(4, 3)), 1.0);
  EXPECT_DOUBLE_EQ(empirical_mse(h, cplx(2, 0) * h.h), 1.0);
  EXPECT_THROW(empirical_mse({ComplexMatrix(4, 3)}, h.h), std::invalid_argument);
  EXPECT_THROW(empirical_mse(h, ComplexMatrix(3, 4)), std::invalid_argument);
}

TEST(AnalyticalMse, KnownValues) {
  EXPECT_NEAR(analytical_mse(1, 1e9), 1.0 - 2.0 / std::numbers::pi, 1e-9);
  EXPECT_NEAR(analytical_mse(8, 1.0), 0.43411575789548325, 1e-15);
  EXPECT_NEAR(analytical_mse(1, 1.0), 0.68169011381620933, 1e-15);
  EXPECT_THROW(analytical_mse(8, 0.0), std::invalid_argument);
}

TEST(AnalyticalMse, StrictlyDecreasingWithFloor) {
  double prev = 1.0;
  for (double db = -30.0; db <= 60.0; db += 0.5) {
    const double v = analytical_mse(8, db_to_linear(db));
    EXPECT_LT(v, prev);
    EXPECT_GT(v, 1.0 - 2.0 / std::numbers::pi);
    prev = v;
  }
}

TEST(SimulateEstimators, EstimateEnergyMatchesOneMinusMse) {
  // E{||h_k||^2} / M = 2 K rho_p / (pi (K rho_p + 1)) = 1 - analytical_mse.
  const auto cfg = config(64, 4, 1.0, 500);
  const auto phi = make_pilots(cfg);
  CompensatedSum e;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    RandomStream s(45, t);
    const auto tr = run_training(cfg, phi, s);
    e.add(frobenius_norm_sq(lmmse_estimate(cfg, tr.quantized, phi)));
  }
  const double per_entry = e.value() / (cfg.trials * 64.0 * 4.0);
  const double expected = 2.0 * 4.0 / (std::numbers::pi * 5.0);
  EXPECT_NEAR(per_entry / expected, 1.0, 0.02);
}

TEST(SimulateEstimators, LmmseTracksAnalyticalAndBeatsLs) {
  for (double db : {-10.0, 0.0, 10.0, 30.0}) {
    const auto cfg = config(32, 4, db_to_linear(db), 800);
    const auto cmp = simulate_estimators(cfg, {1, 9, 0});
    const auto lm = cmp.lmmse.mse();
    const double ref = analytical_mse(4, cfg.pilot_power);
    EXPECT_NEAR(lm.mean / ref, 1.0, 0.02) << db << " dB";
    EXPECT_GE(cmp.ls.mse().mean, lm.mean) << db << " dB";
    for (double v : cmp.lmmse.per_trial_mse) EXPECT_GE(v, 0.0);
    EXPECT_TRUE(cmp.lmmse.h_hat.same_shape(ComplexMatrix(32, 4)));
  }
}

TEST(SimulateEstimators, RatioConventionsAgreeAtPaperScale) {
  const auto cfg = config(128, 8, 1.0, 1000);
  const auto cmp = simulate_estimators(cfg, {7, 9, 1});
  const double eor = cmp.lmmse.mse().mean;
  const double roe = cmp.lmmse.ratio_of_expectations();
  EXPECT_NEAR(eor / roe, 1.0, 0.01);
}

TEST(SimulateEstimators, ThreadCountInvariant) {
  const auto cfg = config(16, 4, 2.0, 64);
  const auto a = simulate_estimators(cfg, {3, 1, 5}, 1);
  const auto b = simulate_estimators(cfg, {3, 1, 5}, 3);
  EXPECT_EQ(a.lmmse.per_trial_mse, b.lmmse.per_trial_mse);
  EXPECT_EQ(a.ls.per_trial_mse, b.ls.per_trial_mse);
  EXPECT_EQ(a.lmmse.h_hat, b.lmmse.h_hat);
}
