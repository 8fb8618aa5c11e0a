#pragma once

// twoway-impair command line: outage/SER curves versus transmit power,
// analytic-vs-simulation validation, and impairment-budget inversion.
//
// Exit status: 0 success, 1 validation below the pass threshold, 2 usage or
// configuration error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "twoway/analytic.hpp"
#include "twoway/errors.hpp"
#include "twoway/io.hpp"
#include "twoway/model.hpp"
#include "twoway/montecarlo.hpp"
#include "twoway/parallel.hpp"

namespace twoway::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kCsvMagic = "# twoway-impair v1";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline unsigned lanes_from_env() {
  const char* env = std::getenv("TWOWAY_IMPAIR_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  const auto v = io::parse_double(env);
  if (!v || *v < 1.0 || *v != static_cast<double>(static_cast<unsigned>(*v))) {
    throw UsageError("TWOWAY_IMPAIR_THREADS must be a positive integer");
  }
  return static_cast<unsigned>(*v);
}

inline SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  return io::parse_config(in, path);
}

struct SweepOptions {
  std::string p1_dbw;
  std::size_t points = 41;
  std::string coupling = "p2=p1, p3=p1/2";

  io::SweepSpec build(bool allow_single) const {
    io::SweepSpec spec;
    std::tie(spec.p1_dbw_start, spec.p1_dbw_stop) = io::parse_range(p1_dbw);
    spec.n_points = spec.p1_dbw_start == spec.p1_dbw_stop && allow_single ? 1 : points;
    spec.coupling = io::parse_coupling(coupling);
    if (!allow_single && spec.n_points < 2) throw UsageError("--points must be at least 2");
    spec.validate();
    return spec;
  }
};

struct McOptions {
  bool enabled = false;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t chunks = 64;

  McConfig build(unsigned lanes) const {
    McConfig mc;
    mc.n_samples = samples;
    mc.seed = seed;
    mc.n_chunks = chunks;
    mc.lanes = lanes;
    mc.validate();
    return mc;
  }
};

inline void add_sweep_flags(CLI::App& cmd, SweepOptions& sweep) {
  cmd.add_option("--p1-dbw", sweep.p1_dbw, "P1 range in dBW as start:stop")->required();
  cmd.add_option("--points", sweep.points, "Number of grid points")->capture_default_str();
  cmd.add_option("--coupling", sweep.coupling, "P2 and P3 in terms of P1")->capture_default_str();
}

inline void add_mc_flags(CLI::App& cmd, McOptions& mc) {
  cmd.add_flag("--mc", mc.enabled, "Add Monte-Carlo columns");
  cmd.add_option("--samples", mc.samples, "Monte-Carlo samples per point")->capture_default_str();
  cmd.add_option("--seed", mc.seed, "Monte-Carlo seed")->capture_default_str();
  cmd.add_option("--chunks", mc.chunks, "Independent random sub-streams per estimate")
      ->capture_default_str();
}

struct ModulationOptions {
  std::string name = "bpsk";
  std::optional<double> alpha;
  std::optional<double> beta;

  Modulation build() const {
    if (alpha || beta) {
      if (!alpha || !beta) throw UsageError("--alpha and --beta must be given together");
      Modulation m{*alpha, *beta, "custom"};
      m.validate();
      return m;
    }
    if (name == "bpsk") return Modulation::bpsk();
    throw UsageError("unknown modulation '" + name + "' (known: bpsk)");
  }
};

inline void add_modulation_flags(CLI::App& cmd, ModulationOptions& mod) {
  cmd.add_option("--modulation", mod.name, "Preset modulation")->capture_default_str();
  cmd.add_option("--alpha", mod.alpha, "SER constant alpha (with --beta)");
  cmd.add_option("--beta", mod.beta, "SER constant beta (with --alpha)");
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string csv() const {
    std::string out = std::string(kCsvMagic) + "\n";
    out += join(columns_) + "\n";
    for (const auto& row : rows_) out += join(row) + "\n";
    return out;
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) line += ',';
      line += cells[i];
    }
    return line;
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot write output file '" + path + "'");
  file << text;
  if (!file) throw UsageError("failed writing output file '" + path + "'");
}

inline void append_mc(std::vector<std::string>& row, const McEstimate& est) {
  row.push_back(io::format_double(est.mean));
  row.push_back(io::format_double(est.ci_low));
  row.push_back(io::format_double(est.ci_high));
}

}  // namespace detail

/// Parses argv and runs one subcommand. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-way AF relaying with relay hardware impairments", "twoway-impair"};
  app.require_subcommand(1);

  std::string config_path;
  double x = 0.0;
  int direction = 1;
  std::string out_path;
  detail::SweepOptions sweep;
  detail::McOptions mc_opts;
  detail::ModulationOptions mod_opts;
  std::string mc_route = "expectation";

  auto* op_curve = app.add_subcommand("op-curve", "Outage probability versus P1 (CSV)");
  op_curve->add_option("config", config_path, "Config file")->required();
  op_curve->add_option("--x", x, "SNDR threshold (linear)")->required();
  op_curve->add_option("--direction", direction, "Receiving terminal (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  detail::add_sweep_flags(*op_curve, sweep);
  detail::add_mc_flags(*op_curve, mc_opts);
  op_curve->add_option("--out", out_path, "Output CSV path (default stdout)");

  auto* ser_curve = app.add_subcommand("ser-curve", "Symbol error rate versus P1 (CSV)");
  ser_curve->add_option("config", config_path, "Config file")->required();
  ser_curve->add_option("--direction", direction, "Receiving terminal (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  detail::add_modulation_flags(*ser_curve, mod_opts);
  detail::add_sweep_flags(*ser_curve, sweep);
  detail::add_mc_flags(*ser_curve, mc_opts);
  ser_curve->add_option("--mc-route", mc_route, "expectation or signal")
      ->check(CLI::IsMember({"expectation", "signal"}))
      ->capture_default_str();
  ser_curve->add_option("--out", out_path, "Output CSV path (default stdout)");

  std::string invert_mode;
  double target = 0.0;
  double omega1 = 1.0;
  double omega2 = 1.0;
  auto* invert = app.add_subcommand("invert", "Largest impairment level c meeting a target");
  invert->add_option("mode", invert_mode, "op or ser")
      ->required()
      ->check(CLI::IsMember({"op", "ser"}));
  invert->add_option("--target", target, "Target outage probability or SER")->required();
  invert->add_option("--x", x, "SNDR threshold (op mode)");
  invert->add_option("--omega1", omega1, "Average gain of the T1 link (op mode)");
  invert->add_option("--omega2", omega2, "Average gain of the T2 link (op mode)");
  invert->add_option("--direction", direction, "Receiving terminal (op mode)")
      ->check(CLI::IsMember({1, 2}));
  detail::add_modulation_flags(*invert, mod_opts);

  auto* validate = app.add_subcommand("validate", "Compare exact outage with Monte-Carlo");
  validate->add_option("config", config_path, "Config file")->required();
  validate->add_option("--x", x, "SNDR threshold (linear)")->required();
  validate->add_option("--direction", direction, "Receiving terminal (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  validate->add_option("--p1-dbw", sweep.p1_dbw,
                       "P1 grid as start:stop or a single value (default: config powers)");
  validate->add_option("--points", sweep.points, "Number of grid points")->capture_default_str();
  validate->add_option("--coupling", sweep.coupling, "P2 and P3 in terms of P1")
      ->capture_default_str();
  validate->add_option("--samples", mc_opts.samples, "Samples per point")->capture_default_str();
  validate->add_option("--seed", mc_opts.seed, "Monte-Carlo seed")->capture_default_str();
  validate->add_option("--chunks", mc_opts.chunks, "Random sub-streams per estimate")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const unsigned lanes = detail::lanes_from_env();
    const Direction dir(direction);

    if (op_curve->parsed()) {
      const auto base = detail::load_config(config_path);
      if (!base.gain_matched()) {
        throw UsageError("config sets kappa3r_assumed; the exact curve needs a matched gain");
      }
      if (!(x >= 0.0)) throw UsageError("--x must be nonnegative");
      const auto spec = sweep.build(false);
      const auto grid = spec.grid();
      const auto mc = mc_opts.build(lanes);
      const double c = base.c();
      const double asym = outage_asymptotic(dir.own(base.omega1, base.omega2),
                                            dir.other(base.omega1, base.omega2), c, x);
      std::vector<double> analytic(grid.size());
      parallel_for(grid.size(), lanes, [&](std::size_t k) {
        analytic[k] = outage_probability(spec.apply(base, grid[k]), {x, dir});
      });
      std::vector<std::string> cols = {"p1_dbw", "analytic", "asymptote"};
      if (mc_opts.enabled) cols.insert(cols.end(), {"mc_mean", "mc_ci_low", "mc_ci_high"});
      detail::Table table(cols);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<std::string> row = {io::format_double(grid[k]), io::format_double(analytic[k]),
                                        io::format_double(asym)};
        if (mc_opts.enabled) {
          detail::append_mc(row, mc_outage(spec.apply(base, grid[k]), {x, dir}, mc));
        }
        table.add_row(std::move(row));
      }
      detail::emit(table.csv(), out_path, out);
      return kExitOk;
    }

    if (ser_curve->parsed()) {
      const auto base = detail::load_config(config_path);
      if (!base.gain_matched()) {
        throw UsageError("config sets kappa3r_assumed; the SER curve needs a matched gain");
      }
      const auto mod = mod_opts.build();
      const auto spec = sweep.build(false);
      const auto grid = spec.grid();
      const auto mc = mc_opts.build(lanes);
      if (mc_opts.enabled && mc_route == "signal" && !(mod.alpha == 1.0 && mod.beta == 1.0)) {
        throw UsageError("--mc-route signal simulates BPSK only");
      }
      const double c = base.c();
      std::optional<double> asym;
      std::string asym_column = "asymptote";
      if (c > 0.0) {
        if (base.omega1 == base.omega2) {
          asym = ser_asymptotic(mod, c);
        } else {
          asym = ser_asymptotic_by_quadrature(dir.own(base.omega1, base.omega2),
                                              dir.other(base.omega1, base.omega2), c, mod);
          asym_column = "asymptote_extension";
        }
      }
      std::vector<double> analytic(grid.size());
      parallel_for(grid.size(), lanes, [&](std::size_t k) {
        analytic[k] = ser(spec.apply(base, grid[k]), dir, mod);
      });
      std::vector<std::string> cols = {"p1_dbw", "analytic"};
      if (asym) cols.push_back(asym_column);
      if (mc_opts.enabled) cols.insert(cols.end(), {"mc_mean", "mc_ci_low", "mc_ci_high"});
      detail::Table table(cols);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<std::string> row = {io::format_double(grid[k]), io::format_double(analytic[k])};
        if (asym) row.push_back(io::format_double(*asym));
        if (mc_opts.enabled) {
          const auto cfg = spec.apply(base, grid[k]);
          detail::append_mc(row, mc_route == "signal" ? mc_ser_signal_level(cfg, dir, mc)
                                                      : mc_ser_expectation(cfg, dir, mod, mc));
        }
        table.add_row(std::move(row));
      }
      detail::emit(table.csv(), out_path, out);
      return kExitOk;
    }

    if (invert->parsed()) {
      double c_max = 0.0;
      double forward = 0.0;
      if (invert_mode == "op") {
        if (invert->count("--x") == 0) throw UsageError("invert op requires --x");
        const double omega_own = dir.own(omega1, omega2);
        const double omega_partner = dir.other(omega1, omega2);
        c_max = invert_impairment_for_op(target, x, omega_own, omega_partner);
        forward = outage_asymptotic(omega_own, omega_partner, c_max, x);
      } else {
        const auto mod = mod_opts.build();
        c_max = invert_impairment_for_ser(target, mod);
        forward = ser_asymptotic(mod, c_max);
      }
      const double kappa = equal_split_kappa(c_max);
      out << "c_max=" << io::format_double(c_max) << " kappa3t=" << io::format_double(kappa)
          << " kappa3r=" << io::format_double(kappa) << " forward=" << io::format_double(forward)
          << " target=" << io::format_double(target) << "\n";
      return kExitOk;
    }

    if (validate->parsed()) {
      const auto base = detail::load_config(config_path);
      if (!(x >= 0.0)) throw UsageError("--x must be nonnegative");
      const auto mc = mc_opts.build(lanes);
      std::vector<std::pair<std::string, SystemConfig>> points;
      if (sweep.p1_dbw.empty()) {
        points.emplace_back(io::format_double(10.0 * std::log10(base.p1)), base);
      } else {
        const auto spec = sweep.build(true);
        for (double p : spec.grid()) points.emplace_back(io::format_double(p), spec.apply(base, p));
      }
      // PASS iff the exact value lies inside the 3-sigma Wilson interval.
      constexpr double kThreeSigma = 3.0;
      detail::Table table({"p1_dbw", "analytic", "mc_mean", "mc_ci_low", "mc_ci_high", "verdict"});
      std::size_t passed = 0;
      for (const auto& [label, cfg] : points) {
        const double exact = outage_probability(cfg, {x, dir});
        const auto est = mc_outage(cfg, {x, dir}, mc);
        const auto hits = static_cast<std::uint64_t>(std::llround(est.mean * mc.n_samples));
        const auto [lo, hi] = wilson_interval(hits, mc.n_samples, kThreeSigma);
        const bool pass = exact >= lo && exact <= hi;
        passed += pass ? 1 : 0;
        std::vector<std::string> row = {label, io::format_double(exact)};
        detail::append_mc(row, est);
        row.push_back(pass ? "PASS" : "FAIL");
        table.add_row(std::move(row));
      }
      out << table.csv();
      out << "# passed " << passed << "/" << points.size() << "\n";
      return 20 * passed >= 19 * points.size() ? kExitOk : kExitValidationFailed;
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (error estimate "
        << io::format_double(e.error_estimate()) << ")\n";
    return kExitNumerical;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const io::ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleTarget& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedOperation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace twoway::cli
