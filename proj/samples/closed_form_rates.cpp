// Prints the closed-form LMMSE MSE and MRC sum-rate bound for K = 8 users
// across SNR, next to a short Monte Carlo check at M = 128.

#include <cstdio>

#include "onebit/onebit.hpp"

int main() {
  std::printf("%8s %10s %12s %12s %12s %14s\n", "snr_db", "mse", "rate(M=32)", "rate(M=64)",
              "rate(M=128)", "ergodic(128)");
  for (double snr = -10.0; snr <= 10.0; snr += 5.0) {
    const auto cfg = onebit::SystemConfig::at_snr_db(128, 8, snr);
    const double mse = onebit::analytical_mse(cfg.users, cfg.pilot_power);
    double rates[3];
    int i = 0;
    for (std::size_t m : {32, 64, 128}) {
      rates[i++] = onebit::theorem1_rate(onebit::SystemConfig::at_snr_db(m, 8, snr)).sum_rate;
    }
    const auto ergodic = onebit::ergodic_rate_mc(cfg, 200);
    std::printf("%8.1f %10.5f %12.4f %12.4f %12.4f %9.4f+-%.3f\n", snr, mse, rates[0], rates[1],
                rates[2], ergodic.sum_rate, ergodic.sum_rate_std_error);
  }
  return 0;
}
