#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "onebit/bussgang.hpp"
#include "onebit/estimation.hpp"
#include "onebit/experiments.hpp"
#include "onebit/numerics.hpp"
#include "onebit/receiver_rates.hpp"
#include "onebit/system_model.hpp"

namespace onebit {

// Reduced-scale invariant suite behind `validate`. Everything runs at
// M <= 32, K <= 4 so it finishes in seconds.

using Quantizer = std::function<ComplexMatrix(const ComplexMatrix&)>;

inline Quantizer reference_quantizer() {
  return [](const ComplexMatrix& y) { return quantize(y).matrix(); };
}

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::vector<ValidationCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

inline std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace detail

inline ValidationReport run_validation(std::uint64_t seed,
                                       const Quantizer& quantizer = reference_quantizer()) {
  ValidationReport rep;
  rep.seed = seed;
  const std::uint64_t exp = experiment_id(Experiment::validate);
  std::uint64_t cell = 0;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  // A faulty quantizer may emit values that violate QuantizedBlock; treat
  // that as a failed check rather than aborting the suite.
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(name, false, std::string("threw: ") + e.what());
    }
  };
  auto quantize_checked = [&](const ComplexMatrix& y) {
    return QuantizedBlock::from_entries(quantizer(y));
  };

  // numerics
  {
    RandomStream a(seed, stream_index_for(exp, cell, 0));
    RandomStream b(seed, stream_index_for(exp, cell, 0));
    ++cell;
    const bool same = sample_circular_gaussian(a, 6, 5, 1.0) == sample_circular_gaussian(b, 6, 5, 1.0);
    add("numerics.stream_determinism", same, same ? "identical draws" : "draws differ");
  }
  {
    RandomStream s(seed, stream_index_for(exp, cell++, 0));
    const ComplexMatrix a = sample_circular_gaussian(s, 5, 3, 1.0);
    const bool ok = hermitian(hermitian(a)) == a;
    add("numerics.hermitian_involution", ok, ok ? "exact" : "mismatch");
  }

  // system_model
  {
    double worst = 0.0;
    for (std::size_t k = 1; k <= 64; ++k) {
      SystemConfig cfg;
      cfg.users = cfg.pilot_length = k;
      const PilotMatrix p = make_pilots(cfg);
      const ComplexMatrix g = matmul(transpose(p.phi), conjugate(p.phi));
      ComplexMatrix target = ComplexMatrix::identity(k);
      for (std::size_t i = 0; i < k; ++i) target(i, i) = static_cast<double>(k);
      worst = std::max(worst, max_abs_diff(g, target));
    }
    add("system_model.pilot_orthogonality", worst < 1e-12, detail::fmt("max |Phi^T Phi* - tau I| = %.3e", worst));
  }
  guarded("system_model.quantizer_alphabet", [&] {
    RandomStream s(seed, stream_index_for(exp, cell++, 0));
    const ComplexMatrix y = sample_circular_gaussian(s, 32, 16, 3.0);
    const ComplexMatrix r = quantizer(y);
    bool ok = r.same_shape(y);
    for (std::size_t i = 0; ok && i < r.size(); ++i) ok = QuantizedBlock::in_alphabet(r.data()[i]);
    add("system_model.quantizer_alphabet", ok, ok ? "all entries in R" : "entry outside R");
  });
  guarded("system_model.quantizer_sign_pattern", [&] {
    RandomStream s(seed, stream_index_for(exp, cell++, 0));
    const ComplexMatrix y = sample_circular_gaussian(s, 32, 16, 1.0);
    const ComplexMatrix r = quantizer(y);
    const ComplexMatrix r2 = quantizer(cplx{7.5, 0.0} * y);
    bool ok = r == r2 && r.same_shape(y);
    for (std::size_t i = 0; ok && i < r.size(); ++i) {
      const cplx v = y.data()[i];
      const cplx q = r.data()[i];
      ok = (v.real() >= 0.0) == (q.real() > 0.0) && (v.imag() >= 0.0) == (q.imag() > 0.0);
    }
    add("system_model.quantizer_sign_pattern", ok, ok ? "signs and scale invariance hold" : "sign mismatch");
  });

  // bussgang
  {
    double worst = 0.0;
    for (std::size_t k : {1, 2, 4}) {
      for (double rho : {0.01, 0.1, 1.0, 10.0, 1000.0}) {
        const double a = bussgang_alpha(k, rho).alpha;
        worst = std::max(worst, std::abs(a * std::sqrt(1.0 + k * rho) - std::sqrt(kTwoOverPi)));
      }
    }
    add("bussgang.alpha_scaling", worst < 1e-14, detail::fmt("max |alpha sqrt(1+K rho) - sqrt(2/pi)| = %.3e", worst));
  }
  {
    const QuantNoiseCov q = quant_noise_cov(average_receive_covariance(16, 4, 2.0), bussgang_alpha(4, 2.0));
    double worst = 0.0;
    for (std::size_t j = 0; j < 16; ++j)
      for (std::size_t i = 0; i < 16; ++i)
        worst = std::max(worst, std::abs(q.c_qq(i, j) - cplx{i == j ? kQuantDistortion : 0.0, 0.0}));
    add("bussgang.white_quant_noise", worst < 1e-12, detail::fmt("max |C_qq - (1-2/pi) I| = %.3e", worst));
  }
  guarded("bussgang.residual_uncorrelated", [&] {
    SystemConfig cfg;
    cfg.antennas = 32;
    cfg.users = cfg.pilot_length = 4;
    cfg.pilot_power = 1.0;
    const PilotMatrix phi = make_pilots(cfg);
    const BussgangGain g = pilot_gain(cfg);
    std::vector<double> re, im, pw;
    for (std::size_t t = 0; t < 1000; ++t) {
      RandomStream s(seed, stream_index_for(exp, cell, t));
      const ChannelMatrix h = draw_channel(cfg, s);
      const ComplexMatrix y = training_receive(cfg, h, phi, s);
      const QuantizedBlock r = quantize_checked(y);
      const ComplexMatrix q = decomposition_residual(y, r, g);
      for (std::size_t i = 0; i < y.size(); ++i) {
        const cplx c = q.data()[i] * std::conj(y.data()[i]);
        re.push_back(c.real());
        im.push_back(c.imag());
        pw.push_back(std::norm(r.matrix().data()[i]));
      }
    }
    ++cell;
    const SampleStats sr = sample_stats(re);
    const SampleStats si = sample_stats(im);
    const bool ok = std::abs(sr.mean) < 4.0 * sr.std_error && std::abs(si.mean) < 4.0 * si.std_error;
    add("bussgang.residual_uncorrelated", ok,
        detail::fmt("E{q y*} = %.3e%+.3ej (4 se = %.3e)", sr.mean, si.mean, 4.0 * sr.std_error));
  });

  // estimation
  guarded("estimation.lmmse_matches_analytical", [&] {
    SystemConfig cfg;
    cfg.antennas = 32;
    cfg.users = cfg.pilot_length = 4;
    const PilotMatrix phi = make_pilots(cfg);
    bool all_ok = true;
    bool ordered = true;
    std::string detail;
    for (double snr_db : {-10.0, 0.0, 20.0}) {
      cfg.pilot_power = db_to_linear(snr_db);
      std::vector<double> lm, ls;
      for (std::size_t t = 0; t < 400; ++t) {
        RandomStream s(seed, stream_index_for(exp, cell, t));
        const ChannelMatrix h = draw_channel(cfg, s);
        const QuantizedBlock r = quantize_checked(training_receive(cfg, h, phi, s));
        lm.push_back(empirical_mse(h, lmmse_estimate(cfg, r, phi)));
        ls.push_back(empirical_mse(h, ls_estimate(cfg, r, phi)));
      }
      ++cell;
      const double emp = sample_stats(lm).mean;
      const double ref = analytical_mse(cfg.users, cfg.pilot_power);
      all_ok = all_ok && std::abs(emp - ref) / ref < 0.03;
      ordered = ordered && sample_stats(ls).mean >= emp;
      detail += detail::fmt("%g dB: %.4f vs %.4f; ", snr_db, emp, ref);
    }
    add("estimation.lmmse_matches_analytical", all_ok, detail);
    add("estimation.ls_not_better", ordered, ordered ? "LS >= LMMSE at every point" : "LS beat LMMSE");
  });
  {
    bool ok = true;
    double prev = 2.0;
    for (double db = -20.0; db <= 40.0; db += 1.0) {
      const double v = analytical_mse(4, db_to_linear(db));
      ok = ok && v < prev && v > kQuantDistortion;
      prev = v;
    }
    add("estimation.analytical_monotone", ok, ok ? "strictly decreasing, above 1-2/pi" : "ordering violated");
  }

  // receiver_rates
  guarded("receiver_rates.bound_ordering", [&] {
    SystemConfig cfg = SystemConfig::at_snr_db(32, 4, 0.0);
    const RateEnsemble ens = simulate_rates(cfg, 300, {seed, exp, cell++});
    const RateReport th = theorem1_rate(cfg);
    const bool ok = th.sum_rate <= ens.ergodic.sum_rate + 3.0 * ens.ergodic.sum_rate_std_error &&
                    ens.breakdown_nonnegative;
    add("receiver_rates.bound_ordering", ok,
        detail::fmt("theorem1 %.4f, ergodic %.4f +- %.4f", th.sum_rate, ens.ergodic.sum_rate,
                    ens.ergodic.sum_rate_std_error));
    const double rel = std::abs(ens.lemma1.sum_rate - th.sum_rate) / th.sum_rate;
    add("receiver_rates.lemma1_consistency", rel < 0.05,
        detail::fmt("lemma1 %.4f vs theorem1 %.4f (rel %.3f)", ens.lemma1.sum_rate, th.sum_rate, rel));
  });
  {
    bool ok = true;
    for (double db = -10.0; db <= 10.0; db += 2.0) {
      double prev = -1.0;
      for (std::size_t m : {8, 16, 32}) {
        const double r = theorem1_rate(SystemConfig::at_snr_db(m, 4, db)).sum_rate;
        ok = ok && r > prev;
        prev = r;
      }
    }
    add("receiver_rates.theorem1_monotone_in_m", ok, ok ? "strictly increasing" : "ordering violated");
  }
  return rep;
}

inline void print_report(std::ostream& os, const ValidationReport& rep) {
  os << "validate seed=" << rep.seed << '\n';
  std::size_t failed = 0;
  for (const auto& c : rep.checks) {
    os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    if (!c.passed) ++failed;
  }
  os << rep.checks.size() - failed << '/' << rep.checks.size() << " checks passed\n";
}

}  // namespace onebit
