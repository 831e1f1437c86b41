#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onebit/bussgang.hpp"
#include "onebit/estimation.hpp"
#include "onebit/numerics.hpp"
#include "onebit/parallel.hpp"
#include "onebit/system_model.hpp"

namespace onebit {

// Powers of the five terms making up user k's MRC output.
struct SinrBreakdown {
  double desired = 0.0;
  double user_interference = 0.0;
  double estimate_error = 0.0;
  double awgn = 0.0;
  double quant_noise = 0.0;

  double interference_plus_noise() const noexcept {
    return user_interference + estimate_error + awgn + quant_noise;
  }
  double sinr() const noexcept { return desired / interference_plus_noise(); }
  bool nonnegative() const noexcept {
    return desired >= 0.0 && user_interference >= 0.0 && estimate_error >= 0.0 && awgn >= 0.0 &&
           quant_noise >= 0.0;
  }
};

enum class RateMethod { ergodic_eq20, lemma1_eq23, theorem1_eq26 };

inline std::string_view to_string(RateMethod m) {
  switch (m) {
    case RateMethod::ergodic_eq20: return "ergodic_eq20";
    case RateMethod::lemma1_eq23: return "lemma1_eq23";
    case RateMethod::theorem1_eq26: return "theorem1_eq26";
  }
  return "unknown";
}

// Rates in bits/s/Hz. sum_rate_std_error is the standard error of the
// per-trial sum rate for the ergodic method and 0 otherwise.
struct RateReport {
  RateMethod method;
  std::vector<double> per_user_rates;
  double sum_rate = 0.0;
  double sum_rate_std_error = 0.0;
  std::size_t trials = 0;
};

namespace detail {

inline RateReport make_report(RateMethod method, std::vector<double> per_user, double std_error,
                              std::size_t trials) {
  CompensatedSum s;
  for (double r : per_user) s.add(r);
  return {method, std::move(per_user), s.value(), std_error, trials};
}

}  // namespace detail

/// MRC front end: s_hat = H_hat^H r_d.
inline ComplexMatrix mrc_combine(const ComplexMatrix& h_hat, const QuantizedBlock& r_d) {
  if (r_d.cols() != 1 || r_d.rows() != h_hat.rows()) {
    throw std::invalid_argument("mrc_combine: r_d must be M x 1 with M matching the estimate");
  }
  return matmul(hermitian(h_hat), r_d.matrix());
}

/// Per-user decomposition of the MRC output with A_d = alpha_d I and the
/// quantization noise modelled as Gaussian with covariance c_qq:
///
///   desired            rho_d alpha^2 |h_k^H h_k|^2
///   user_interference  rho_d alpha^2 sum_{i != k} |h_k^H h_i|^2
///   estimate_error     rho_d alpha^2 sum_i |h_k^H e_i|^2
///   awgn               alpha^2 ||h_k||^2
///   quant_noise        h_k^H C_qq h_k
///
/// where h_k are columns of the estimate and e_i columns of H - H_hat.
inline std::vector<SinrBreakdown> sinr_breakdown(const ComplexMatrix& h_hat,
                                                 const ComplexMatrix& error,
                                                 const QuantNoiseCov& c_qq,
                                                 const BussgangGain& gain, double rho_d) {
  detail::require_same_shape(h_hat, error, "sinr_breakdown");
  const std::size_t m = h_hat.rows();
  const std::size_t k = h_hat.cols();
  if (c_qq.c_qq.rows() != m || c_qq.c_qq.cols() != m) {
    throw std::invalid_argument("sinr_breakdown: C_qq is not M x M");
  }
  const ComplexMatrix hh = hermitian(h_hat);
  const ComplexMatrix gram = matmul(hh, h_hat);
  const ComplexMatrix cross = matmul(hh, error);
  const ComplexMatrix cq_h = matmul(c_qq.c_qq, h_hat);
  const double a2 = gain.alpha * gain.alpha;

  std::vector<SinrBreakdown> out(k);
  for (std::size_t u = 0; u < k; ++u) {
    SinrBreakdown& b = out[u];
    const double self = gram(u, u).real();
    b.desired = rho_d * a2 * self * self;
    double ui = 0.0;
    double ee = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != u) ui += std::norm(gram(u, i));
      ee += std::norm(cross(u, i));
    }
    b.user_interference = rho_d * a2 * ui;
    b.estimate_error = rho_d * a2 * ee;
    b.awgn = a2 * self;
    const cplx q = inner(h_hat.col(u), cq_h.col(u));
    if (std::abs(q.imag()) > 1e-10 * std::max(std::abs(q.real()), 1e-300)) {
      throw std::runtime_error("sinr_breakdown: quantization-noise quadratic form is not real");
    }
    b.quant_noise = q.real();
  }
  return out;
}

/// Closed-form lower bound for MRC with the LMMSE estimate:
///   SINR = rho_d a_d^2 a_p^2 K rho_p M / (rho_d a_d^2 K + a_d^2 + 1 - 2/pi),
/// identical for every user.
inline RateReport theorem1_rate(const SystemConfig& cfg) {
  cfg.validate();
  const double ap2 = std::pow(pilot_gain(cfg).alpha, 2);
  const double ad2 = std::pow(data_gain(cfg).alpha, 2);
  const double k = static_cast<double>(cfg.users);
  const double m = static_cast<double>(cfg.antennas);
  const double sinr = cfg.data_power * ad2 * ap2 * k * cfg.pilot_power * m /
                      (cfg.data_power * ad2 * k + ad2 + kQuantDistortion);
  return detail::make_report(RateMethod::theorem1_eq26,
                             std::vector<double>(cfg.users, std::log2(1.0 + sinr)), 0.0, 1);
}

// Which channel knowledge feeds the combiner. `perfect` (H_hat := H) skips
// the quantized training phase and exists for moment checks.
enum class Csi { lmmse, perfect };

// Monte Carlo moments behind the Lemma 1 bound, per user.
struct Lemma1Moments {
  std::vector<cplx> mean_gain;        // E{h_k^H h_k} (estimate vs. true)
  std::vector<double> gain_variance;  // Var(h_k^H h_k)
  std::vector<double> interference;   // sum_{i != k} E{|h_k^H h_i|^2}
  std::vector<double> estimate_norm;  // E{||h_k||^2}
};

struct RateEnsemble {
  RateReport ergodic;
  RateReport lemma1;
  Lemma1Moments moments;
  bool breakdown_nonnegative = true;  // every SinrBreakdown term in every trial
};

inline RateReport lemma1_from_moments(const SystemConfig& cfg, const Lemma1Moments& mo,
                                      std::size_t trials) {
  const double ad2 = std::pow(data_gain(cfg).alpha, 2);
  const double rho = cfg.data_power;
  std::vector<double> rates(cfg.users);
  for (std::size_t u = 0; u < cfg.users; ++u) {
    const double signal = rho * ad2 * std::norm(mo.mean_gain[u]);
    const double ui = rho * ad2 * mo.interference[u];
    const double aqn = (ad2 + kQuantDistortion) * mo.estimate_norm[u];
    rates[u] = std::log2(1.0 + signal / (rho * ad2 * mo.gain_variance[u] + ui + aqn));
  }
  return detail::make_report(RateMethod::lemma1_eq23, std::move(rates), 0.0, trials);
}

/// Simulates `trials` coherence blocks (training phase, LMMSE estimate,
/// data-phase SINR terms) and evaluates the ergodic rate and the Lemma 1
/// bound on the same ensemble.
///
/// C_qq is built from the channel-averaged receive covariance
/// (K rho_d + 1) I through the arcsine law, matching the scalar alpha_d.
inline RateEnsemble simulate_rates(const SystemConfig& cfg, std::size_t trials,
                                   const TrialStreams& streams, unsigned threads = 1,
                                   Csi csi = Csi::lmmse) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("simulate_rates: trials must be >= 1");
  const std::size_t k = cfg.users;
  const PilotMatrix phi = make_pilots(cfg);
  const BussgangGain gain = data_gain(cfg);
  const QuantNoiseCov c_qq = quant_noise_cov(
      average_receive_covariance(cfg.antennas, cfg.users, cfg.data_power), gain);

  struct Slot {
    std::vector<double> rate;       // log2(1 + SINR_k)
    std::vector<cplx> gain;         // h_hat_k^H h_k
    std::vector<double> interf;     // sum_{i != k} |h_hat_k^H h_i|^2
    std::vector<double> norm_sq;    // ||h_hat_k||^2
    bool nonnegative = true;
  };
  std::vector<Slot> slots(trials);

  parallel_for(trials, threads, [&](std::size_t t) {
    RandomStream stream = streams.for_trial(t);
    ComplexMatrix h_true(cfg.antennas, k);
    ComplexMatrix h_hat(cfg.antennas, k);
    if (csi == Csi::lmmse) {
      TrainingRealization tr = run_training(cfg, phi, stream);
      h_hat = lmmse_estimate(cfg, tr.quantized, phi);
      h_true = std::move(tr.channel.h);
    } else {
      h_true = draw_channel(cfg, stream).h;
      h_hat = h_true;
    }
    const ComplexMatrix error = h_true - h_hat;
    const auto terms = sinr_breakdown(h_hat, error, c_qq, gain, cfg.data_power);
    const ComplexMatrix g = matmul(hermitian(h_hat), h_true);

    Slot& s = slots[t];
    s.rate.resize(k);
    s.gain.resize(k);
    s.interf.resize(k);
    s.norm_sq.resize(k);
    for (std::size_t u = 0; u < k; ++u) {
      s.nonnegative = s.nonnegative && terms[u].nonnegative();
      s.rate[u] = std::log2(1.0 + terms[u].sinr());
      s.gain[u] = g(u, u);
      double ui = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        if (i != u) ui += std::norm(g(u, i));
      s.interf[u] = ui;
      s.norm_sq[u] = inner(h_hat.col(u), h_hat.col(u)).real();
    }
  });

  // Fixed-order reduction.
  RateEnsemble out{};
  std::vector<double> per_trial_sum(trials);
  std::vector<double> mean_rate(k);
  Lemma1Moments& mo = out.moments;
  mo.mean_gain.assign(k, cplx{});
  mo.gain_variance.assign(k, 0.0);
  mo.interference.assign(k, 0.0);
  mo.estimate_norm.assign(k, 0.0);
  const double n = static_cast<double>(trials);
  for (std::size_t u = 0; u < k; ++u) {
    CompensatedSum rate, g_re, g_im, g_pow, ui, nrm;
    for (std::size_t t = 0; t < trials; ++t) {
      const Slot& s = slots[t];
      rate.add(s.rate[u]);
      g_re.add(s.gain[u].real());
      g_im.add(s.gain[u].imag());
      g_pow.add(std::norm(s.gain[u]));
      ui.add(s.interf[u]);
      nrm.add(s.norm_sq[u]);
    }
    mean_rate[u] = rate.value() / n;
    mo.mean_gain[u] = {g_re.value() / n, g_im.value() / n};
    mo.gain_variance[u] = std::max(0.0, g_pow.value() / n - std::norm(mo.mean_gain[u]));
    mo.interference[u] = ui.value() / n;
    mo.estimate_norm[u] = nrm.value() / n;
  }
  for (std::size_t t = 0; t < trials; ++t) {
    CompensatedSum s;
    for (double r : slots[t].rate) s.add(r);
    per_trial_sum[t] = s.value();
    out.breakdown_nonnegative = out.breakdown_nonnegative && slots[t].nonnegative;
  }
  const SampleStats st = sample_stats(per_trial_sum);
  out.ergodic = detail::make_report(RateMethod::ergodic_eq20, std::move(mean_rate), st.std_error,
                                    trials);
  out.lemma1 = lemma1_from_moments(cfg, mo, trials);
  return out;
}

// Experiment id used for substreams when callers do not supply their own.
inline constexpr std::uint64_t kRateExperimentId = 2;

/// Monte Carlo ergodic rate with MRC, seeded from cfg.master_seed.
inline RateReport ergodic_rate_mc(const SystemConfig& cfg, std::size_t trials,
                                  unsigned threads = 1) {
  return simulate_rates(cfg, trials, {cfg.master_seed, kRateExperimentId, 0}, threads).ergodic;
}

/// Lemma 1 bound with its expectations replaced by Monte Carlo sample moments.
inline RateReport lemma1_rate(const SystemConfig& cfg, std::size_t trials, unsigned threads = 1,
                              Csi csi = Csi::lmmse) {
  return simulate_rates(cfg, trials, {cfg.master_seed, kRateExperimentId, 0}, threads, csi).lemma1;
}

}  // namespace onebit
