#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

#include "onebit/numerics.hpp"
#include "onebit/system_model.hpp"

namespace onebit {

enum class Phase { pilot, data };

// Scalar Bussgang gain: the linear part of the one-bit quantizer is alpha I.
struct BussgangGain {
  double alpha;
  Phase phase;
};

inline constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

// Residual distortion power of a unit-power one-bit output once the
// linear part has been removed, 1 - 2/pi.
inline constexpr double kQuantDistortion = 1.0 - kTwoOverPi;

// alpha = sqrt(2 / (pi (1 + K rho))). The receive covariance of both phases
// is (K rho + 1) I, so the optimal gain collapses to a scalar.
inline BussgangGain bussgang_alpha(std::size_t users, double rho, Phase phase = Phase::pilot) {
  if (!(rho > 0.0)) throw std::invalid_argument("bussgang_alpha: rho must be positive");
  if (users < 1) throw std::invalid_argument("bussgang_alpha: users must be >= 1");
  return {std::sqrt(kTwoOverPi / (1.0 + static_cast<double>(users) * rho)), phase};
}

inline BussgangGain pilot_gain(const SystemConfig& cfg) {
  return bussgang_alpha(cfg.users, cfg.pilot_power, Phase::pilot);
}

inline BussgangGain data_gain(const SystemConfig& cfg) {
  return bussgang_alpha(cfg.users, cfg.data_power, Phase::data);
}

namespace detail {

inline void require_hermitian(const ComplexMatrix& c, const char* what) {
  if (c.rows() != c.cols()) throw std::invalid_argument(std::string(what) + ": matrix not square");
  double scale = 1.0;
  for (const auto& v : c.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < c.cols(); ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      if (std::abs(c(i, j) - std::conj(c(j, i))) > 1e-12 * scale) {
        throw std::invalid_argument(std::string(what) + ": matrix not Hermitian");
      }
    }
  }
}

}  // namespace detail

// Output covariance of the one-bit quantizer for a circular Gaussian input
// with covariance c_yy (arcsine law, per rail):
//   C_rr = (2/pi) [asin(Re S) + j asin(Im S)],  S = D^-1/2 C_yy D^-1/2.
inline ComplexMatrix arcsine_covariance(const ComplexMatrix& c_yy) {
  detail::require_hermitian(c_yy, "arcsine_covariance");
  const std::size_t n = c_yy.rows();
  std::vector<double> inv_sd(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = c_yy(i, i).real();
    if (!(d > 0.0)) {
      throw std::invalid_argument("arcsine_covariance: diagonal entry " + std::to_string(i) +
                                  " is not positive");
    }
    inv_sd[i] = 1.0 / std::sqrt(d);
  }
  ComplexMatrix corr(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) corr(i, j) = c_yy(i, j) * (inv_sd[i] * inv_sd[j]);
    corr(j, j) = 1.0;
  }
  ComplexMatrix c_rr = elementwise_asin_clipped(corr);
  for (auto& v : c_rr.data()) v *= kTwoOverPi;
  // Quantized samples have unit power by construction.
  for (std::size_t i = 0; i < n; ++i) c_rr(i, i) = 1.0;
  return c_rr;
}

// Hermitian M x M covariance of the quantization noise.
struct QuantNoiseCov {
  ComplexMatrix c_qq;
};

// C_qq = C_rr - alpha^2 C_yy.
inline QuantNoiseCov quant_noise_cov(const ComplexMatrix& c_yy, const BussgangGain& gain) {
  ComplexMatrix c_qq = arcsine_covariance(c_yy) - cplx{gain.alpha * gain.alpha, 0.0} * c_yy;
  for (std::size_t i = 0; i < c_qq.rows(); ++i) c_qq(i, i) = c_qq(i, i).real();
  return {std::move(c_qq)};
}

// Channel-averaged receive covariance (K rho + 1) I_M shared by both phases.
inline ComplexMatrix average_receive_covariance(std::size_t antennas, std::size_t users,
                                                double rho) {
  ComplexMatrix c = ComplexMatrix::identity(antennas);
  const double d = static_cast<double>(users) * rho + 1.0;
  for (std::size_t i = 0; i < antennas; ++i) c(i, i) = d;
  return c;
}

// Realized quantization noise q = r - alpha y.
inline ComplexMatrix decomposition_residual(const ComplexMatrix& y, const QuantizedBlock& r,
                                            const BussgangGain& gain) {
  detail::require_same_shape(y, r.matrix(), "decomposition_residual");
  return r.matrix() - cplx{gain.alpha, 0.0} * y;
}

}  // namespace onebit
