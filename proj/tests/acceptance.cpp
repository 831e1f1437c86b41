// Acceptance suite: runs every exit criterion at full scale and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "onebit/onebit.hpp"
#include "test_support.hpp"

using namespace onebit;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] %s (%.1fs)\n       %s\n", o.passed ? "PASS" : "FAIL", name, secs,
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.passed) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr std::uint64_t kSeed = 1;
constexpr double kFloor = 1.0 - 2.0 / std::numbers::pi;

}  // namespace

int main() {
  criterion("MSE floor: LMMSE at 30 dB within 0.01 of 1 - 2/pi", [] {
    SystemConfig cfg = SystemConfig::at_snr_db(128, 8, 30.0);
    cfg.trials = 10000;
    cfg.master_seed = kSeed;
    const auto mse = simulate_estimators(cfg, {kSeed, 1, 1000}).lmmse.mse();
    const double err = std::abs(mse.mean - kFloor);
    return Outcome{err <= 0.01, fmt("empirical %.6f, floor %.6f, |diff| %.2e (tol 1e-2)", mse.mean,
                                    kFloor, err)};
  });

  criterion("MSE curve: LMMSE within 2% of closed form, LS >= LMMSE, -10:5:30 dB", [] {
    SweepSpec spec = default_mse_spec();
    spec.snr_db_points = db_range(-10.0, 5.0, 30.0);
    spec.fixed.master_seed = kSeed;
    const auto rows = run_mse_sweep(spec);
    bool ok = true;
    std::string detail;
    for (double snr : spec.snr_db_points) {
      double lm = 0, ls = 0, an = 0;
      for (const auto& r : rows) {
        if (r.snr_db != snr) continue;
        if (r.metric == "lmmse_empirical") lm = r.value;
        if (r.metric == "ls_empirical") ls = r.value;
        if (r.metric == "lmmse_analytical") an = r.value;
      }
      const double rel = std::abs(lm - an) / an;
      ok = ok && rel <= 0.02 && ls >= lm;
      detail += fmt("%+g dB: lmmse %.4f an %.4f rel %.1e ls %.4f; ", snr, lm, an, rel, ls);
    }
    return Outcome{ok, detail};
  });

  criterion("Bussgang gain exact and q uncorrelated with y over 1e6 samples", [] {
    const double alpha = bussgang_alpha(8, 1.0).alpha;
    const double ref = std::sqrt(2.0 / (9.0 * std::numbers::pi));
    SystemConfig cfg = SystemConfig::at_snr_db(125, 8, 0.0);
    const auto phi = make_pilots(cfg);
    const auto gain = pilot_gain(cfg);
    test_support::ComplexMean corr;
    for (std::uint64_t t = 0; t < 1000; ++t) {
      RandomStream s(kSeed, stream_index_for(4, 0, t));
      const auto h = draw_channel(cfg, s);
      const auto y = training_receive(cfg, h, phi, s);
      const auto q = decomposition_residual(y, quantize(y), gain);
      for (std::size_t i = 0; i < y.size(); ++i) corr.add(q.data()[i] * std::conj(y.data()[i]));
    }
    const bool ok = std::abs(alpha - ref) <= 1e-12 && corr.consistent_with_zero(3.0);
    return Outcome{ok, fmt("|alpha - sqrt(2/(9pi))| = %.1e; E{q y*}: %s", std::abs(alpha - ref),
                           corr.describe().c_str())};
  });

  criterion("Arcsine law vs Monte Carlo quantization, 10 random 2x2 covariances", [] {
    std::mt19937_64 eng(kSeed);
    std::uniform_real_distribution<double> pw(0.2, 5.0), rho(0.0, 0.95), ph(0.0, 2 * std::numbers::pi);
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 10; ++i) {
      const double p1 = pw(eng), p2 = pw(eng);
      const cplx c = std::polar(rho(eng) * std::sqrt(p1 * p2), ph(eng));
      const auto cov = ComplexMatrix::from_rows({{p1, c}, {std::conj(c), p2}});
      const cplx want = arcsine_covariance(cov)(0, 1);
      const auto mc = test_support::quantized_pair_correlation(cov, 1000000, 500 + i);
      const double zr = std::abs(mc.mean.real() - want.real()) / mc.se_re;
      const double zi = std::abs(mc.mean.imag() - want.imag()) / mc.se_im;
      ok = ok && zr <= 3.0 && zi <= 3.0;
      detail += fmt("#%d z=(%.2f,%.2f) ", i, zr, zi);
    }
    return Outcome{ok, detail};
  });

  std::vector<RateEnsemble> ensembles;
  const std::vector<double> rate_grid = db_range(-10.0, 2.0, 10.0);
  criterion("Rate bound: theorem1 <= ergodic + 3 se on -10:2:10 dB, gap <= 10% at <= 0 dB", [&] {
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rate_grid.size(); ++i) {
      const auto cfg = SystemConfig::at_snr_db(128, 8, rate_grid[i]);
      ensembles.push_back(simulate_rates(cfg, 2000, {kSeed, kRateExperimentId, 5000 + i}));
      const auto& erg = ensembles.back().ergodic;
      const double th = theorem1_rate(cfg).sum_rate;
      const double gap = std::abs(erg.sum_rate - th) / erg.sum_rate;
      const bool below = th <= erg.sum_rate + 3.0 * erg.sum_rate_std_error;
      const bool tight = rate_grid[i] > 0.0 || gap <= 0.10;
      ok = ok && below && tight && ensembles.back().breakdown_nonnegative;
      detail += fmt("%+g dB: th %.3f erg %.3f+-%.3f gap %.1f%%; ", rate_grid[i], th, erg.sum_rate,
                    erg.sum_rate_std_error, 100 * gap);
    }
    return Outcome{ok, detail};
  });

  criterion("Lemma 1 Monte Carlo within 5% of closed form at M=128, K=8, 0 dB", [&] {
    const auto cfg = SystemConfig::at_snr_db(128, 8, 0.0);
    // Same 2000-trial ensemble as the rate-bound criterion when it ran.
    std::optional<RateReport> lemma;
    for (std::size_t i = 0; i < rate_grid.size() && i < ensembles.size(); ++i)
      if (rate_grid[i] == 0.0) lemma = ensembles[i].lemma1;
    if (!lemma) lemma = lemma1_rate(cfg, 2000);
    const double th = theorem1_rate(cfg).sum_rate;
    const double rel = std::abs(lemma->sum_rate - th) / th;
    return Outcome{rel <= 0.05, fmt("lemma1 %.4f theorem1 %.4f rel %.2f%%", lemma->sum_rate, th,
                                    100 * rel)};
  });

  criterion("Monotonicity: theorem1 increasing in M, analytical MSE decreasing in rho_p", [&] {
    bool ok = true;
    for (double snr : rate_grid) {
      const double a = theorem1_rate(SystemConfig::at_snr_db(32, 8, snr)).sum_rate;
      const double b = theorem1_rate(SystemConfig::at_snr_db(64, 8, snr)).sum_rate;
      const double c = theorem1_rate(SystemConfig::at_snr_db(128, 8, snr)).sum_rate;
      ok = ok && a < b && b < c;
    }
    bool mse_ok = true;
    double prev = 1.0;
    for (double db = -30.0; db <= 60.0; db += 0.25) {
      const double v = analytical_mse(8, db_to_linear(db));
      mse_ok = mse_ok && v < prev;
      prev = v;
    }
    return Outcome{ok && mse_ok, fmt("theorem1 ordering %s; MSE ordering %s", ok ? "ok" : "violated",
                                     mse_ok ? "ok" : "violated")};
  });

  criterion("Determinism: full rate-sweep CSV byte-identical for --threads 1 and 4", [] {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("onebit_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto run = [&](unsigned threads) {
      const fs::path out = dir / ("rate_t" + std::to_string(threads) + ".csv");
      const std::string cmd = std::string(ONEBIT_SIM_PATH) + " rate-sweep --seed 7 --threads " +
                              std::to_string(threads) + " --out " + out.string();
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) throw std::runtime_error("rate-sweep failed");
      std::ifstream in(out, std::ios::binary);
      std::ostringstream os;
      os << in.rdbuf();
      return os.str();
    };
    const std::string a = run(1);
    const std::string b = run(4);
    std::size_t lines = 0;
    for (char ch : a) lines += ch == '\n';
    fs::remove_all(dir);
    const bool ok = !a.empty() && a == b && lines == 1 + 3 * 11 * 2;
    return Outcome{ok, fmt("%zu bytes, %zu lines, identical: %s", a.size(), lines,
                           a == b ? "yes" : "no")};
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
