#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "onebit/estimation.hpp"
#include "onebit/receiver_rates.hpp"
#include "onebit/system_model.hpp"

namespace onebit {

enum class Experiment { mse_fig1, rate_fig2, validate };

inline std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::mse_fig1: return "mse_fig1";
    case Experiment::rate_fig2: return "rate_fig2";
    case Experiment::validate: return "validate";
  }
  return "unknown";
}

// Substream experiment ids; part of the seed contract, never renumber.
inline constexpr std::uint64_t experiment_id(Experiment e) {
  switch (e) {
    case Experiment::mse_fig1: return 1;
    case Experiment::rate_fig2: return kRateExperimentId;
    case Experiment::validate: return 3;
  }
  return 0;
}

// How a sweep SNR maps onto the two transmit powers.
struct RhoMode {
  enum class Kind { equal, fixed_pilot } kind = Kind::equal;
  double pilot_db = 0.0;  // used by fixed_pilot only

  std::string str() const {
    if (kind == Kind::equal) return "equal";
    std::ostringstream os;
    os << "fixed_pilot:" << pilot_db;
    return os.str();
  }
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  Experiment experiment = Experiment::mse_fig1;
  std::vector<double> snr_db_points;
  std::vector<std::size_t> m_values;
  SystemConfig fixed;  // users, trials and master_seed are taken from here
  RhoMode rho_mode;
  std::string out_path;

  void validate() const {
    if (snr_db_points.empty()) throw ConfigError("snr_db_list must not be empty");
    for (std::size_t i = 1; i < snr_db_points.size(); ++i) {
      if (!(snr_db_points[i] > snr_db_points[i - 1])) {
        throw ConfigError("snr_db_list must be strictly increasing");
      }
    }
    if (m_values.empty()) throw ConfigError("m_list must not be empty");
    if (fixed.users < 1) throw ConfigError("k must be >= 1");
    for (std::size_t m : m_values) {
      if (m < fixed.users) {
        throw ConfigError("every m in m_list must be >= k (got m=" + std::to_string(m) + ")");
      }
    }
    if (fixed.trials < 1) throw ConfigError("trials must be >= 1");
    if (std::uint64_t(m_values.size()) * snr_db_points.size() >= (1ULL << 24)) {
      throw ConfigError("sweep grid too large");
    }
  }

  SystemConfig config_at(std::size_t m, double snr_db) const {
    SystemConfig cfg = fixed;
    cfg.antennas = m;
    cfg.pilot_length = cfg.users;
    cfg.data_power = db_to_linear(snr_db);
    cfg.pilot_power = rho_mode.kind == RhoMode::Kind::equal ? cfg.data_power
                                                            : db_to_linear(rho_mode.pilot_db);
    return cfg;
  }

  std::uint64_t cell_index(std::size_t m_idx, std::size_t snr_idx) const {
    return std::uint64_t(m_idx) * snr_db_points.size() + snr_idx;
  }
};

// start:step:stop, inclusive of stop when it lands on the grid.
inline std::vector<double> db_range(double start, double step, double stop) {
  if (!(step > 0.0) || stop < start) throw ConfigError("invalid dB range");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(start + step * static_cast<double>(i));
  return out;
}

inline SweepSpec default_mse_spec() {
  SweepSpec s;
  s.experiment = Experiment::mse_fig1;
  s.snr_db_points = db_range(-10.0, 2.0, 30.0);
  s.m_values = {128};
  s.fixed.users = 8;
  s.fixed.pilot_length = 8;
  s.fixed.trials = 10000;
  return s;
}

inline SweepSpec default_rate_spec() {
  SweepSpec s;
  s.experiment = Experiment::rate_fig2;
  s.snr_db_points = db_range(-10.0, 2.0, 10.0);
  s.m_values = {32, 64, 128};
  s.fixed.users = 8;
  s.fixed.pilot_length = 8;
  s.fixed.trials = 2000;
  return s;
}

struct ResultRow {
  std::string experiment;
  std::size_t m = 0;
  std::size_t k = 0;
  double snr_db = 0.0;
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

inline void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.experiment, a.m, a.k, a.snr_db, a.metric) <
           std::tie(b.experiment, b.m, b.k, b.snr_db, b.metric);
  });
}

/// One row per (M, SNR) for each of lmmse_empirical, ls_empirical and
/// lmmse_analytical. Empirical rows report the mean per-trial normalized MSE.
inline std::vector<ResultRow> run_mse_sweep(const SweepSpec& spec, unsigned threads = 1) {
  if (spec.experiment != Experiment::mse_fig1) throw ConfigError("run_mse_sweep: wrong experiment");
  spec.validate();
  std::vector<ResultRow> rows;
  const std::string name{to_string(spec.experiment)};
  for (std::size_t mi = 0; mi < spec.m_values.size(); ++mi) {
    for (std::size_t si = 0; si < spec.snr_db_points.size(); ++si) {
      const double snr = spec.snr_db_points[si];
      const SystemConfig cfg = spec.config_at(spec.m_values[mi], snr);
      const TrialStreams streams{cfg.master_seed, experiment_id(spec.experiment),
                                 spec.cell_index(mi, si)};
      const EstimatorComparison cmp = simulate_estimators(cfg, streams, threads);
      const SampleStats lm = cmp.lmmse.mse();
      const SampleStats ls = cmp.ls.mse();
      auto row = [&](std::string metric, double value, double se) {
        rows.push_back({name, cfg.antennas, cfg.users, snr, std::move(metric), value, se,
                        cfg.trials, cfg.master_seed});
      };
      row("lmmse_empirical", lm.mean, lm.std_error);
      row("ls_empirical", ls.mean, ls.std_error);
      row("lmmse_analytical", analytical_mse(cfg.users, cfg.pilot_power), 0.0);
    }
  }
  sort_rows(rows);
  return rows;
}

/// Sum-rate rows for the Monte Carlo ergodic rate and the closed-form bound
/// at every (M, SNR).
inline std::vector<ResultRow> run_rate_sweep(const SweepSpec& spec, unsigned threads = 1) {
  if (spec.experiment != Experiment::rate_fig2) {
    throw ConfigError("run_rate_sweep: wrong experiment");
  }
  spec.validate();
  std::vector<ResultRow> rows;
  const std::string name{to_string(spec.experiment)};
  for (std::size_t mi = 0; mi < spec.m_values.size(); ++mi) {
    for (std::size_t si = 0; si < spec.snr_db_points.size(); ++si) {
      const double snr = spec.snr_db_points[si];
      const SystemConfig cfg = spec.config_at(spec.m_values[mi], snr);
      const TrialStreams streams{cfg.master_seed, experiment_id(spec.experiment),
                                 spec.cell_index(mi, si)};
      const RateEnsemble ens = simulate_rates(cfg, cfg.trials, streams, threads);
      const RateReport th = theorem1_rate(cfg);
      rows.push_back({name, cfg.antennas, cfg.users, snr, std::string(to_string(ens.ergodic.method)),
                      ens.ergodic.sum_rate, ens.ergodic.sum_rate_std_error, cfg.trials,
                      cfg.master_seed});
      rows.push_back({name, cfg.antennas, cfg.users, snr, std::string(to_string(th.method)),
                      th.sum_rate, 0.0, cfg.trials, cfg.master_seed});
    }
  }
  sort_rows(rows);
  return rows;
}

inline constexpr std::string_view kCsvHeader = "experiment,m,k,snr_db,metric,value,stderr,trials,seed";

inline std::string format_g10(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.10g", v);
  std::string s(buf, static_cast<std::size_t>(n));
  if (s == "-0") s = "0";
  return s;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    os << r.experiment << ',' << r.m << ',' << r.k << ',' << format_g10(r.snr_db) << ','
       << r.metric << ',' << format_g10(r.value) << ',' << format_g10(r.std_error) << ','
       << r.trials << ',' << r.seed << '\n';
  }
}

// ---------------------------------------------------------------------------
// Flat key = value configuration.

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw ConfigError(std::string(key) + ": not a number: '" + t + "'");
  }
  return v;
}

inline std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(std::string(key) + ": not a non-negative integer: '" + t + "'");
  }
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

// "a,b,c" or "start:step:stop".
inline std::vector<double> parse_db_list(std::string_view text) {
  if (text.find(':') != std::string_view::npos) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw ConfigError("snr_db_list: range must be start:step:stop");
    return db_range(detail::parse_double("snr_db_list", parts[0]),
                    detail::parse_double("snr_db_list", parts[1]),
                    detail::parse_double("snr_db_list", parts[2]));
  }
  std::vector<double> out;
  for (const auto& p : detail::split(text, ',')) out.push_back(detail::parse_double("snr_db_list", p));
  return out;
}

inline std::vector<std::size_t> parse_m_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (const auto& p : detail::split(text, ',')) {
    out.push_back(static_cast<std::size_t>(detail::parse_u64("m_list", p)));
  }
  return out;
}

inline RhoMode parse_rho_mode(std::string_view text) {
  const std::string t = detail::trim(text);
  if (t == "equal") return {};
  constexpr std::string_view prefix = "fixed_pilot:";
  if (t.rfind(prefix, 0) == 0) {
    return {RhoMode::Kind::fixed_pilot,
            detail::parse_double("rho_mode", std::string_view(t).substr(prefix.size()))};
  }
  throw ConfigError("rho_mode: expected 'equal' or 'fixed_pilot:<dB>', got '" + t + "'");
}

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"m_list", "k",    "snr_db_list", "rho_mode",
                                             "trials", "seed", "out_path"};
  return keys;
}

// Reads `key = value` lines; '#' starts a comment. Unknown keys and
// duplicate keys are errors.
inline std::map<std::string, std::string> parse_config_text(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  const auto& keys = config_keys();
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = detail::trim(std::string_view(t).substr(0, eq));
    std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

inline void apply_config(SweepSpec& spec, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "m_list") {
      spec.m_values = parse_m_list(value);
    } else if (key == "k") {
      spec.fixed.users = static_cast<std::size_t>(detail::parse_u64(key, value));
      spec.fixed.pilot_length = spec.fixed.users;
    } else if (key == "snr_db_list") {
      spec.snr_db_points = parse_db_list(value);
    } else if (key == "rho_mode") {
      spec.rho_mode = parse_rho_mode(value);
    } else if (key == "trials") {
      spec.fixed.trials = static_cast<std::size_t>(detail::parse_u64(key, value));
    } else if (key == "seed") {
      spec.fixed.master_seed = detail::parse_u64(key, value);
    } else if (key == "out_path") {
      spec.out_path = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
}

}  // namespace onebit
