#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "onebit/numerics.hpp"

namespace onebit {

// One uplink scenario. Powers are linear; noise is unit variance, so they
// double as SNRs.
struct SystemConfig {
  std::size_t antennas = 128;    // M
  std::size_t users = 8;         // K
  std::size_t pilot_length = 8;  // tau, must equal users
  double pilot_power = 1.0;      // rho_p
  double data_power = 1.0;       // rho_d
  std::size_t trials = 2000;
  std::uint64_t master_seed = 1;

  void validate() const {
    if (antennas < 1) throw std::invalid_argument("SystemConfig: antennas must be >= 1");
    if (users < 1) throw std::invalid_argument("SystemConfig: users must be >= 1");
    if (pilot_length != users) {
      throw std::invalid_argument("SystemConfig: pilot length (" + std::to_string(pilot_length) +
                                  ") must equal user count (" + std::to_string(users) + ")");
    }
    if (!(pilot_power > 0.0)) throw std::invalid_argument("SystemConfig: pilot power must be > 0");
    if (!(data_power > 0.0)) throw std::invalid_argument("SystemConfig: data power must be > 0");
    if (trials < 1) throw std::invalid_argument("SystemConfig: trials must be >= 1");
  }

  // Convenience for the usual sweep setting rho_p = rho_d = SNR.
  static SystemConfig at_snr_db(std::size_t m, std::size_t k, double snr_db) {
    SystemConfig cfg;
    cfg.antennas = m;
    cfg.users = k;
    cfg.pilot_length = k;
    cfg.pilot_power = db_to_linear(snr_db);
    cfg.data_power = cfg.pilot_power;
    return cfg;
  }
};

// M x K, i.i.d. CN(0, 1).
struct ChannelMatrix {
  ComplexMatrix h;
};

// tau x K with Phi^T Phi^* = tau I and unit-modulus entries.
struct PilotMatrix {
  ComplexMatrix phi;
};

inline const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// A matrix whose entries are all drawn from (1/sqrt2){+-1 +- j}.
class QuantizedBlock {
public:
  // Checked construction from arbitrary entries; rejects anything outside
  // the four-point alphabet.
  static QuantizedBlock from_entries(ComplexMatrix r) {
    for (const auto& v : r.data()) {
      if (!in_alphabet(v)) {
        throw std::invalid_argument("QuantizedBlock: entry outside the one-bit alphabet");
      }
    }
    return QuantizedBlock(std::move(r));
  }

  static bool in_alphabet(cplx v) noexcept {
    return (v.real() == kInvSqrt2 || v.real() == -kInvSqrt2) &&
           (v.imag() == kInvSqrt2 || v.imag() == -kInvSqrt2);
  }

  const ComplexMatrix& matrix() const noexcept { return r_; }
  std::size_t rows() const noexcept { return r_.rows(); }
  std::size_t cols() const noexcept { return r_.cols(); }

private:
  explicit QuantizedBlock(ComplexMatrix r) : r_{std::move(r)} {}
  friend QuantizedBlock quantize(const ComplexMatrix& y);

  ComplexMatrix r_;
};

// Element-wise one-bit ADC on the real and imaginary rails. sign(0) = +1.
inline QuantizedBlock quantize(const ComplexMatrix& y) {
  ComplexMatrix r(y.rows(), y.cols());
  auto in = y.data();
  auto out = r.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double re = in[i].real();
    const double im = in[i].imag();
    if (std::isnan(re) || std::isnan(im)) {
      throw std::invalid_argument("quantize: NaN input sample");
    }
    out[i] = {re >= 0.0 ? kInvSqrt2 : -kInvSqrt2, im >= 0.0 ? kInvSqrt2 : -kInvSqrt2};
  }
  return QuantizedBlock(std::move(r));
}

// Whether the receive functions add thermal noise. `zeroed` exists so tests
// can check the deterministic part of the signal model.
enum class Noise { sampled, zeroed };

inline ChannelMatrix draw_channel(const SystemConfig& cfg, RandomStream& stream) {
  return {sample_circular_gaussian(stream, cfg.antennas, cfg.users, 1.0)};
}

// K x 1 unit-power circular Gaussian symbols.
inline ComplexMatrix draw_symbols(const SystemConfig& cfg, RandomStream& stream) {
  return sample_circular_gaussian(stream, cfg.users, 1, 1.0);
}

// K x K DFT basis: entry (t, k) = exp(-2 pi j t k / K).
inline PilotMatrix make_pilots(const SystemConfig& cfg) {
  if (cfg.pilot_length != cfg.users) {
    throw std::invalid_argument("make_pilots: orthogonal pilots require tau == K");
  }
  const std::size_t k = cfg.users;
  ComplexMatrix phi(k, k);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t u = 0; u < k; ++u) {
      // Reduce t*u mod K first so the phase argument stays small and exact
      // symmetries (e.g. +-1 for K=2) survive rounding.
      const std::size_t e = (t * u) % k;
      if (e == 0) {
        phi(t, u) = 1.0;
      } else if (2 * e == k) {
        phi(t, u) = -1.0;
      } else {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(e) /
                             static_cast<double>(k);
        phi(t, u) = std::polar(1.0, angle);
      }
    }
  }
  return {std::move(phi)};
}

// Y_p = sqrt(rho_p) H Phi^T + N_p, an M x tau block.
inline ComplexMatrix training_receive(const SystemConfig& cfg, const ChannelMatrix& h,
                                      const PilotMatrix& phi, RandomStream& stream,
                                      Noise noise = Noise::sampled) {
  if (h.h.rows() != cfg.antennas || h.h.cols() != cfg.users) {
    throw std::invalid_argument("training_receive: channel is not M x K");
  }
  if (phi.phi.rows() != cfg.pilot_length || phi.phi.cols() != cfg.users) {
    throw std::invalid_argument("training_receive: pilot matrix is not tau x K");
  }
  ComplexMatrix y = std::sqrt(cfg.pilot_power) * matmul(h.h, transpose(phi.phi));
  if (noise == Noise::sampled) y = y + sample_circular_gaussian(stream, y.rows(), y.cols(), 1.0);
  return y;
}

// y = sqrt(rho_d) H s + n, an M x 1 vector.
inline ComplexMatrix data_receive(const SystemConfig& cfg, const ChannelMatrix& h,
                                  const ComplexMatrix& s, RandomStream& stream,
                                  Noise noise = Noise::sampled) {
  if (h.h.rows() != cfg.antennas || h.h.cols() != cfg.users) {
    throw std::invalid_argument("data_receive: channel is not M x K");
  }
  if (s.rows() != cfg.users || s.cols() != 1) {
    throw std::invalid_argument("data_receive: symbol vector is not K x 1");
  }
  ComplexMatrix y = std::sqrt(cfg.data_power) * matmul(h.h, s);
  if (noise == Noise::sampled) y = y + sample_circular_gaussian(stream, y.rows(), 1, 1.0);
  return y;
}

}  // namespace onebit
