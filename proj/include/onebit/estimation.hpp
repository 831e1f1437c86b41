#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "onebit/bussgang.hpp"
#include "onebit/numerics.hpp"
#include "onebit/parallel.hpp"
#include "onebit/system_model.hpp"

namespace onebit {

namespace detail {

inline void require_training_shapes(const SystemConfig& cfg, const QuantizedBlock& r_p,
                                    const PilotMatrix& phi, const char* what) {
  if (cfg.pilot_length != cfg.users) {
    throw std::invalid_argument(std::string(what) + ": tau must equal K");
  }
  if (r_p.rows() != cfg.antennas || r_p.cols() != cfg.pilot_length) {
    throw std::invalid_argument(std::string(what) + ": quantized block is not M x tau");
  }
  if (phi.phi.rows() != cfg.pilot_length || phi.phi.cols() != cfg.users) {
    throw std::invalid_argument(std::string(what) + ": pilot matrix is not tau x K");
  }
}

// R_p Phi^*, the matched-filter output both estimators scale.
inline ComplexMatrix despread(const QuantizedBlock& r_p, const PilotMatrix& phi) {
  return matmul(r_p.matrix(), conjugate(phi.phi));
}

}  // namespace detail

/// LMMSE channel estimate from one-bit training observations.
///
/// With orthogonal pilots the quantized training block is white with unit
/// power, so the estimator reduces to the scaled matched filter
///   H_hat = alpha_p sqrt(rho_p) R_p Phi^*,
/// which is the unvectorized form of Phi_tilde^H r_p without ever building
/// the MK x MK Kronecker product.
inline ComplexMatrix lmmse_estimate(const SystemConfig& cfg, const QuantizedBlock& r_p,
                                    const PilotMatrix& phi) {
  detail::require_training_shapes(cfg, r_p, phi, "lmmse_estimate");
  const double scale = pilot_gain(cfg).alpha * std::sqrt(cfg.pilot_power);
  return cplx{scale, 0.0} * detail::despread(r_p, phi);
}

/// Least-squares baseline: the pseudo-inverse of the unquantized training
/// map applied to quantized data, H_ls = R_p Phi^* / (tau sqrt(rho_p)).
inline ComplexMatrix ls_estimate(const SystemConfig& cfg, const QuantizedBlock& r_p,
                                 const PilotMatrix& phi) {
  detail::require_training_shapes(cfg, r_p, phi, "ls_estimate");
  const double scale =
      1.0 / (static_cast<double>(cfg.pilot_length) * std::sqrt(cfg.pilot_power));
  return cplx{scale, 0.0} * detail::despread(r_p, phi);
}

/// ||h_hat - h||_F^2 / ||h||_F^2 for one realization.
inline double empirical_mse(const ChannelMatrix& h_true, const ComplexMatrix& h_hat) {
  detail::require_same_shape(h_true.h, h_hat, "empirical_mse");
  const double energy = frobenius_norm_sq(h_true.h);
  if (!(energy > 0.0)) throw std::invalid_argument("empirical_mse: true channel has zero norm");
  return frobenius_norm_sq(h_hat - h_true.h) / energy;
}

/// Closed-form normalized MSE of the LMMSE estimate,
/// 1 - 2 K rho_p / (pi (K rho_p + 1)). Floors at 1 - 2/pi.
inline double analytical_mse(std::size_t users, double rho_p) {
  if (!(rho_p > 0.0)) throw std::invalid_argument("analytical_mse: rho_p must be positive");
  const double krho = static_cast<double>(users) * rho_p;
  return 1.0 - 2.0 * krho / (std::numbers::pi * (krho + 1.0));
}

struct TrainingRealization {
  ChannelMatrix channel;
  ComplexMatrix received;  // Y_p
  QuantizedBlock quantized;
};

// Draws H and N_p from `stream` (in that order) and quantizes Y_p.
inline TrainingRealization run_training(const SystemConfig& cfg, const PilotMatrix& phi,
                                        RandomStream& stream) {
  ChannelMatrix h = draw_channel(cfg, stream);
  ComplexMatrix y = training_receive(cfg, h, phi, stream);
  QuantizedBlock r = quantize(y);
  return {std::move(h), std::move(y), std::move(r)};
}

struct EstimationOutcome {
  ComplexMatrix h_hat;               // estimate from trial 0
  std::vector<double> per_trial_mse;  // normalized, one per trial
  std::vector<double> error_energy;   // ||h_hat - h||^2 per trial
  std::vector<double> channel_energy; // ||h||^2 per trial

  // Mean of per-trial ratios, E{||e||^2 / ||h||^2}.
  SampleStats mse() const { return sample_stats(per_trial_mse); }

  // E{||e||^2} / E{||h||^2}.
  double ratio_of_expectations() const {
    CompensatedSum num;
    CompensatedSum den;
    for (std::size_t i = 0; i < error_energy.size(); ++i) {
      num.add(error_energy[i]);
      den.add(channel_energy[i]);
    }
    return num.value() / den.value();
  }
};

struct EstimatorComparison {
  EstimationOutcome lmmse;
  EstimationOutcome ls;
};

// Runs cfg.trials training phases and scores both estimators on the same
// realizations.
inline EstimatorComparison simulate_estimators(const SystemConfig& cfg, const TrialStreams& streams,
                                               unsigned threads = 1) {
  cfg.validate();
  const PilotMatrix phi = make_pilots(cfg);
  const std::size_t n = cfg.trials;

  struct Slot {
    double lm_err = 0.0;
    double ls_err = 0.0;
    double energy = 0.0;
  };
  std::vector<Slot> slots(n);
  std::optional<ComplexMatrix> first_lm;
  std::optional<ComplexMatrix> first_ls;

  parallel_for(n, threads, [&](std::size_t t) {
    RandomStream stream = streams.for_trial(t);
    const TrainingRealization tr = run_training(cfg, phi, stream);
    ComplexMatrix lm = lmmse_estimate(cfg, tr.quantized, phi);
    ComplexMatrix ls = ls_estimate(cfg, tr.quantized, phi);
    Slot& s = slots[t];
    s.energy = frobenius_norm_sq(tr.channel.h);
    s.lm_err = frobenius_norm_sq(lm - tr.channel.h);
    s.ls_err = frobenius_norm_sq(ls - tr.channel.h);
    if (t == 0) {
      first_lm = std::move(lm);
      first_ls = std::move(ls);
    }
  });

  auto collect = [&](auto member, ComplexMatrix h_hat) {
    EstimationOutcome out{std::move(h_hat), {}, {}, {}};
    out.per_trial_mse.reserve(n);
    out.error_energy.reserve(n);
    out.channel_energy.reserve(n);
    for (const Slot& s : slots) {
      if (!(s.energy > 0.0)) throw std::runtime_error("simulate_estimators: zero-norm channel");
      out.error_energy.push_back(s.*member);
      out.channel_energy.push_back(s.energy);
      out.per_trial_mse.push_back(s.*member / s.energy);
    }
    return out;
  };
  return {collect(&Slot::lm_err, std::move(*first_lm)), collect(&Slot::ls_err, std::move(*first_ls))};
}

}  // namespace onebit
