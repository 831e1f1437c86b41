// onebit_sim: sweep driver for one-bit massive MIMO channel estimation and
// uplink rate experiments.
//
//   onebit_sim mse-sweep  [--config f] [--out f] [--seed n] [--trials n] [--threads n]
//   onebit_sim rate-sweep [...same flags...]
//   onebit_sim validate   [--seed n] [--out f]
//
// Every config-file key (m_list, k, snr_db_list, rho_mode, trials, seed,
// out_path) can also be given as a flag of the same name; flags win.
//
// Exit codes: 0 success, 1 invalid configuration, 2 validation failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include "onebit/onebit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;

struct SweepFlags {
  std::string config;
  std::optional<std::string> m_list, k, snr_db_list, rho_mode, trials, seed, out_path;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_sweep_flags(CLI::App& cmd, SweepFlags& f) {
  cmd.add_option("--config", f.config, "flat key = value config file")->check(CLI::ExistingFile);
  cmd.add_option("--out,--out_path", f.out_path, "CSV output path (stdout if omitted)");
  cmd.add_option("--seed", f.seed, "master seed (u64)");
  cmd.add_option("--trials", f.trials, "Monte Carlo trials per sweep point");
  cmd.add_option("--threads", f.threads, "worker threads; never changes results")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--m_list", f.m_list, "antenna counts, e.g. 32,64,128");
  cmd.add_option("--k", f.k, "user count");
  cmd.add_option("--snr_db_list", f.snr_db_list, "SNR grid: a,b,c or start:step:stop");
  cmd.add_option("--rho_mode", f.rho_mode, "equal | fixed_pilot:<dB>");
}

onebit::SweepSpec build_spec(onebit::SweepSpec spec, const SweepFlags& f) {
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw onebit::ConfigError("cannot open config file " + f.config);
    onebit::apply_config(spec, onebit::parse_config_text(in));
  }
  std::map<std::string, std::string> overrides;
  auto put = [&](const char* key, const std::optional<std::string>& v) {
    if (v) overrides[key] = *v;
  };
  put("m_list", f.m_list);
  put("k", f.k);
  put("snr_db_list", f.snr_db_list);
  put("rho_mode", f.rho_mode);
  put("trials", f.trials);
  put("seed", f.seed);
  put("out_path", f.out_path);
  onebit::apply_config(spec, overrides);
  spec.validate();
  return spec;
}

int write_rows(const onebit::SweepSpec& spec, const std::vector<onebit::ResultRow>& rows) {
  if (spec.out_path.empty() || spec.out_path == "-") {
    onebit::write_csv(std::cout, rows);
    return kExitOk;
  }
  std::ofstream out(spec.out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << spec.out_path << '\n';
    return kExitConfig;
  }
  onebit::write_csv(out, rows);
  return out ? kExitOk : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for one-bit massive MIMO uplink estimation and rates"};
  app.require_subcommand(1);

  SweepFlags mse_flags;
  auto* mse = app.add_subcommand("mse-sweep", "normalized MSE of LMMSE/LS estimators vs SNR");
  add_sweep_flags(*mse, mse_flags);

  SweepFlags rate_flags;
  auto* rate = app.add_subcommand("rate-sweep", "MRC sum rate vs SNR: ergodic vs closed form");
  add_sweep_flags(*rate, rate_flags);

  std::uint64_t validate_seed = 1;
  std::string validate_out;
  bool inject_fault = false;
  auto* val = app.add_subcommand("validate", "run the reduced-scale invariant suite");
  val->add_option("--seed", validate_seed, "master seed (u64)");
  val->add_option("--out", validate_out, "also write the report to this file");
  val->add_flag("--inject-fault", inject_fault, "use a deliberately broken quantizer")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*mse) {
      const auto spec = build_spec(onebit::default_mse_spec(), mse_flags);
      return write_rows(spec, onebit::run_mse_sweep(spec, mse_flags.threads));
    }
    if (*rate) {
      const auto spec = build_spec(onebit::default_rate_spec(), rate_flags);
      return write_rows(spec, onebit::run_rate_sweep(spec, rate_flags.threads));
    }
    if (*val) {
      onebit::Quantizer q = onebit::reference_quantizer();
      if (inject_fault) {
        // Imaginary rail inverted.
        q = [](const onebit::ComplexMatrix& y) {
          onebit::ComplexMatrix r = onebit::quantize(y).matrix();
          for (auto& v : r.data()) v = std::conj(v);
          return r;
        };
      }
      const auto report = onebit::run_validation(validate_seed, q);
      onebit::print_report(std::cout, report);
      if (!validate_out.empty()) {
        std::ofstream out(validate_out, std::ios::binary);
        onebit::print_report(out, report);
      }
      return report.passed() ? kExitOk : kExitValidation;
    }
  } catch (const onebit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
