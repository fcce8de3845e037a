#include "arelab/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arelab/alt_model.hpp"
#include "arelab/cli/config.hpp"
#include "arelab/cli/csv.hpp"
#include "arelab/cli/manifest.hpp"
#include "arelab/cli/table_layouts.hpp"
#include "arelab/errors.hpp"
#include "arelab/kernels.hpp"
#include "arelab/ks_null.hpp"
#include "arelab/moments.hpp"
#include "arelab/power_engine.hpp"
#include "arelab/theory.hpp"

namespace arelab::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::size_t replicates = 0;
  double scale = 1.0;
  std::string config_path;
  std::string out_prefix;
  std::string kernel = "auto";
};

struct Output {
  CsvTable csv;
  std::vector<std::string> md_header;
  std::vector<std::vector<std::string>> md_rows;
  int exit_code = kExitOk;
};

std::string pct(double p) { return format_number(100.0 * p); }

std::string round_pct(double p) {
  std::ostringstream os;
  os << std::llround(100.0 * p);
  return os.str();
}

std::string fixed1(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << v;
  return os.str();
}

bool selected(const std::vector<double>& filter, double v) {
  if (filter.empty()) return true;
  for (double f : filter) {
    if (std::fabs(f - v) < 1e-9) return true;
  }
  return false;
}

bool selected_n(const std::vector<std::size_t>& filter, std::size_t v) {
  if (filter.empty()) return true;
  for (std::size_t f : filter) {
    if (f == v) return true;
  }
  return false;
}

void check_unit_open(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!(v > 0.0 && v < 1.0)) {
      std::ostringstream msg;
      msg << what << " must lie in (0, 1), got " << v;
      throw UsageError(msg.str());
    }
  }
}

// ---- moments -------------------------------------------------------------

struct MomentsArgs {
  std::string family = "power";
  std::vector<double> r, theta;
  std::vector<std::size_t> n;
  bool normalized = false;
};

Output cmd_moments(const MomentsArgs& a) {
  if (a.family != "power") throw UsageError("only --family power is available from the command line");
  check_unit_open(a.r, "--r");
  check_unit_open(a.theta, "--theta");
  for (std::size_t n : a.n) {
    if (n == 0) throw UsageError("--n values must be >= 1");
  }
  Output out{CsvTable({"r", "theta", "n", "e0", "var0", "e1", "var1", "b_n", "kappa"}), {}, {}, kExitOk};
  for (double r : a.r) {
    const DensitySpec spec = DensitySpec::power_tail(r);
    for (double theta : a.theta) {
      const LocalAlternative alt =
          a.normalized ? LocalAlternative::from_normalized(spec, theta) : LocalAlternative(spec, theta);
      const MomentSet m = log_moments(alt);
      for (std::size_t n : a.n) {
        out.csv.add_row({format_number(r), format_number(theta), std::to_string(n), format_number(m.e0),
                         format_number(m.var0), format_number(m.e1), format_number(m.var1),
                         format_number(shift_b(m, n)), r >= 0.5 ? format_number(kappa(r, alt.theta())) : ""});
      }
    }
  }
  return out;
}

// ---- efficiency ----------------------------------------------------------

Output cmd_efficiency(const std::vector<double>& rs) {
  check_unit_open(rs, "--r");
  Output out{CsvTable({"r", "efficiency", "efficiency_quadrature"}), {}, {}, kExitOk};
  for (double r : rs) {
    if (r >= 0.5) {
      const std::string inf = "infinite (heavy-tailed alternative, N_n/n diverges)";
      out.csv.add_row({format_number(r), inf, inf});
      continue;
    }
    const double closed = efficiency_power_family(r);
    const double quad = efficiency_theoretical(normalize_score(DensitySpec::power_tail(r)));
    out.csv.add_row({format_number(r), format_number(closed), format_number(quad)});
  }
  return out;
}

// ---- table ---------------------------------------------------------------

struct TableArgs {
  int id = 0;
  std::vector<double> r, theta;
  std::vector<std::size_t> cells;
  double max_draws = 0.0;  // replicates * n budget per cell, 0 = unlimited
};

Output power_table_run(const TableArgs& a, const SimulationConfig& cfg, std::ostream& err) {
  const PowerTableLayout& layout = power_table(a.id);
  if (!a.r.empty() && !selected(a.r, layout.r)) {
    std::ostringstream msg;
    msg << "table " << a.id << " is laid out for r=" << layout.r;
    throw UsageError(msg.str());
  }
  Output out{CsvTable({"table", "r", "theta", "n", "ks_percent", "ks_se_percent", "np_percent", "np_se_percent",
                       "ks_reference", "np_reference", "ks_critical", "np_critical", "status"}),
             {},
             {},
             kExitOk};
  const DensitySpec spec = DensitySpec::power_tail(layout.r);
  std::vector<std::vector<std::string>> columns;  // per theta: rendered rows "n", "KS", "NP"
  std::size_t depth = 0;
  for (const PowerColumn& col : layout.columns) {
    if (!selected(a.theta, col.theta)) continue;
    const LocalAlternative alt(spec, col.theta);
    const MomentSet m = log_moments(alt);
    out.md_header.push_back("n (theta=" + format_number(col.theta) + ")");
    out.md_header.push_back("KS");
    out.md_header.push_back("NP");
    std::vector<std::string> rendered;
    for (const PowerCellRef& cell : col.cells) {
      if (!selected_n(a.cells, cell.n)) continue;
      std::vector<std::string> row{std::to_string(a.id), format_number(layout.r), format_number(col.theta),
                                   std::to_string(cell.n)};
      const double draws = static_cast<double>(cfg.replicates) * static_cast<double>(cell.n);
      if (a.max_draws > 0.0 && draws > a.max_draws) {
        err << "warning: table " << a.id << " cell theta=" << col.theta << " n=" << cell.n
            << " skipped (needs " << draws << " draws, budget " << a.max_draws << ")\n";
        row.insert(row.end(), {"", "", "", "", std::to_string(cell.ks_percent), std::to_string(cell.np_percent),
                               "", "", "skipped"});
        out.csv.add_row(row);
        rendered.insert(rendered.end(), {std::to_string(cell.n), "skipped", "skipped"});
        continue;
      }
      const double q = np_null_quantile(alt, m, cell.n, cfg.alpha, cfg);
      const PowerEstimate np = power_np(alt, m, cell.n, q, cfg);
      const PowerEstimate ks = power_ks(alt, cell.n, cfg.alpha, cfg);
      row.insert(row.end(), {pct(ks.power), pct(ks.standard_error), pct(np.power), pct(np.standard_error),
                             std::to_string(cell.ks_percent), std::to_string(cell.np_percent),
                             format_number(ks.critical_value), format_number(q), "ok"});
      out.csv.add_row(row);
      rendered.insert(rendered.end(),
                      {std::to_string(cell.n), round_pct(ks.power) + " (" + std::to_string(cell.ks_percent) + ")",
                       round_pct(np.power) + " (" + std::to_string(cell.np_percent) + ")"});
    }
    depth = std::max(depth, rendered.size() / 3);
    columns.push_back(std::move(rendered));
  }
  for (std::size_t i = 0; i < depth; ++i) {
    std::vector<std::string> line;
    for (const auto& c : columns) {
      for (std::size_t k = 0; k < 3; ++k) line.push_back(3 * i + k < c.size() ? c[3 * i + k] : "");
    }
    out.md_rows.push_back(std::move(line));
  }
  return out;
}

Output ratio_table_run(const TableArgs& a, const SimulationConfig& cfg, std::ostream& err) {
  std::vector<double> levels;
  for (std::size_t c : a.cells) levels.push_back(static_cast<double>(c));
  Output out{CsvTable({"r", "theta", "power_percent", "n_np", "np_percent", "np_se_percent", "N", "ratio",
                       "ks_percent_at_N", "ks_se_percent", "reference_ratio", "status"}),
             {"r", "theta"},
             {},
             kExitOk};
  for (int p : kRatioPowerLevels) out.md_header.push_back(std::to_string(p) + "%");
  for (const RatioRow& row : ratio_table()) {
    if (!selected(a.r, row.r) || !selected(a.theta, row.theta)) continue;
    const LocalAlternative alt(DensitySpec::power_tail(row.r), row.theta);
    std::vector<std::string> md{format_number(row.r), format_number(row.theta)};
    md.resize(2 + std::size(kRatioPowerLevels));
    for (const RatioCellRef& cell : row.cells) {
      if (!selected(levels, cell.power_percent)) continue;
      std::size_t slot = 0;
      while (kRatioPowerLevels[slot] != cell.power_percent) ++slot;
      std::vector<std::string> line{format_number(row.r), format_number(row.theta),
                                    std::to_string(cell.power_percent), std::to_string(cell.n_np)};
      SimulationConfig search = cfg;
      if (a.max_draws > 0.0) {
        const auto cap = static_cast<std::size_t>(a.max_draws / static_cast<double>(cfg.replicates));
        search.grid.max_n = std::min(search.grid.max_n, cap);
      }
      std::string status = "ok";
      try {
        if (search.grid.max_n < cell.n_np) throw SearchExhausted("budget below n_np", 0, 0.0);
        const SampleSizeResult res = efficiency_ratio_empirical(alt, cell.n_np, cfg.alpha, search);
        line.insert(line.end(), {pct(res.np_power.power), pct(res.np_power.standard_error), std::to_string(res.N),
                                 format_number(res.ratio), pct(res.ks_power_at_N.power),
                                 pct(res.ks_power_at_N.standard_error), format_number(cell.reference_ratio), status});
        md[2 + slot] = fixed1(res.ratio) + " (" + fixed1(cell.reference_ratio) + ")";
      } catch (const SearchExhausted& e) {
        const bool budget = a.max_draws > 0.0 && search.grid.max_n < cfg.grid.max_n;
        status = budget ? "skipped" : "search_exhausted";
        err << "warning: table 5 cell r=" << row.r << " theta=" << row.theta << " power=" << cell.power_percent
            << "% " << status << ": " << e.what() << '\n';
        if (!budget) out.exit_code = kExitSearchExhausted;
        line.insert(line.end(), {"", "", "", "", "", "", format_number(cell.reference_ratio), status});
        md[2 + slot] = status;
      }
      out.csv.add_row(line);
    }
    out.md_rows.push_back(std::move(md));
  }
  return out;
}

Output cmd_table(const TableArgs& a, const SimulationConfig& cfg, std::ostream& err) {
  if (a.id < 1 || a.id > 5) throw UsageError("--id must be one of 1..5");
  check_unit_open(a.theta, "--theta");
  check_unit_open(a.r, "--r");
  return a.id == 5 ? ratio_table_run(a, cfg, err) : power_table_run(a, cfg, err);
}

// ---- moddev --------------------------------------------------------------

struct ModdevArgs {
  std::string test;
  std::vector<std::size_t> n;
  std::string x_rule;
  double r = 0.3;
  double theta = 0.05;
  std::string theta_scale = "normalized";
};

struct XRule {
  std::string kind;
  double value = 0.0;
};

XRule parse_x_rule(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--x-rule must look like power:P, const:X or sigma:C");
  XRule rule{text.substr(0, colon), 0.0};
  try {
    rule.value = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--x-rule value is not a number: " + text);
  }
  if (rule.kind != "power" && rule.kind != "const" && rule.kind != "sigma") {
    throw UsageError("--x-rule kind must be power, const or sigma");
  }
  if (!(rule.value > 0.0)) throw UsageError("--x-rule value must be positive");
  return rule;
}

Output cmd_moddev(const ModdevArgs& a, const SimulationConfig& cfg) {
  if (a.n.empty()) throw UsageError("--n needs at least one sample size");
  for (std::size_t n : a.n) {
    if (n == 0) throw UsageError("--n values must be >= 1");
  }
  if (a.test != "ks" && a.test != "np") throw UsageError("--test must be ks or np");
  const XRule rule = parse_x_rule(a.x_rule.empty() ? (a.test == "ks" ? "power:0.25" : "sigma:1") : a.x_rule);
  Output out{CsvTable({"test", "n", "x", "neg_log_p", "rate", "method"}), {}, {}, kExitOk};
  if (a.test == "ks") {
    if (rule.kind == "sigma") throw UsageError("sigma:C applies to --test np only");
    for (std::size_t n : a.n) {
      const double x = rule.kind == "power" ? std::pow(static_cast<double>(n), -rule.value) : rule.value;
      const double rate = moddev_rate_ks(n, x);
      out.csv.add_row({"ks", std::to_string(n), format_number(x), format_number(rate * n * x * x),
                       format_number(rate), "exact"});
    }
    return out;
  }
  check_unit_open({a.r, a.theta}, "--r/--theta");
  const DensitySpec spec = DensitySpec::power_tail(a.r);
  const LocalAlternative alt =
      a.theta_scale == "raw" ? LocalAlternative(spec, a.theta) : LocalAlternative::from_normalized(spec, a.theta);
  if (a.theta_scale != "raw" && a.theta_scale != "normalized") {
    throw UsageError("--theta-scale must be raw or normalized");
  }
  const double sigma0 = log_moments(alt).sigma0();
  for (std::size_t n : a.n) {
    const double x = rule.kind == "power"   ? std::pow(static_cast<double>(n), -rule.value)
                     : rule.kind == "sigma" ? rule.value * sigma0
                                            : rule.value;
    const ModerateDeviationRate md = np_moddev_rate_detail(alt, n, x, cfg);
    out.csv.add_row({"np", std::to_string(n), format_number(x), format_number(-md.tail.log_probability),
                     format_number(md.rate), md.tail.importance_sampled ? "importance" : "plain"});
  }
  return out;
}

// ---- driver --------------------------------------------------------------

std::string join_args(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// Arguments that cannot change the numbers: threads and output locations.
std::string run_key(int argc, const char* const* argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--threads" || arg == "--out") {
      ++i;
      continue;
    }
    if (arg.rfind("--threads=", 0) == 0 || arg.rfind("--out=", 0) == 0) continue;
    s += arg;
    s += '\n';
  }
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  CLI::App app{"Intermediate efficiency of the Neyman-Pearson test relative to Kolmogorov-Smirnov"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Base seed of every Monte Carlo stream");
  app.add_option("--threads", common.threads, "Worker threads (default: ARE_LAB_THREADS or all cores)");
  app.add_option("--replicates", common.replicates, "Monte Carlo replicates per estimate");
  app.add_option("--scale", common.scale, "Multiplier on the replicate count")->check(CLI::PositiveNumber);
  app.add_option("--config", common.config_path, "INI file with [simulation], [grid], [smoothing]");
  app.add_option("--out", common.out_prefix, "Write PREFIX.csv, PREFIX.md and PREFIX.manifest");
  app.add_option("--kernel", common.kernel, "Kernel variant: scalar, avx2 or auto");

  MomentsArgs moments_args;
  auto* moments = app.add_subcommand("moments", "Log-density moments, shift b_n and kappa");
  moments->add_option("--family", moments_args.family, "Density family (power)");
  moments->add_option("--r", moments_args.r, "Tail exponents")->required()->delimiter(',');
  moments->add_option("--theta", moments_args.theta, "Mixing weights")->required()->delimiter(',');
  moments->add_option("--n", moments_args.n, "Sample sizes")->required()->delimiter(',');
  moments->add_flag("--normalized", moments_args.normalized, "Read theta in the unit-L2 parametrization");

  TableArgs table_args;
  auto* table = app.add_subcommand("table", "Reproduce a power table (1-4) or the ratio table (5)");
  table->add_option("--id", table_args.id, "Table id 1..5")->required();
  table->add_option("--r", table_args.r, "Restrict to these r")->delimiter(',');
  table->add_option("--theta", table_args.theta, "Restrict to these theta")->delimiter(',');
  table->add_option("--cells", table_args.cells, "Restrict to these n (tables 1-4) or power percents (table 5)")
      ->delimiter(',');
  table->add_option("--max-draws", table_args.max_draws, "Skip cells needing more than replicates*n draws");

  std::vector<double> eff_r;
  auto* efficiency = app.add_subcommand("efficiency", "Theoretical efficiency of the power family");
  efficiency->add_option("--r", eff_r, "Tail exponents")->required()->delimiter(',');

  ModdevArgs moddev_args;
  auto* moddev = app.add_subcommand("moddev", "Moderate-deviation rates -log P / (n x^2)");
  moddev->add_option("--test", moddev_args.test, "ks or np")->required();
  moddev->add_option("--n", moddev_args.n, "Sample sizes")->required()->delimiter(',');
  moddev->add_option("--x-rule", moddev_args.x_rule, "power:P (x=n^-P), const:X or sigma:C (x=C sigma0)");
  moddev->add_option("--r", moddev_args.r, "Tail exponent (np)");
  moddev->add_option("--theta", moddev_args.theta, "Mixing weight (np)");
  moddev->add_option("--theta-scale", moddev_args.theta_scale, "normalized or raw (np)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    SimulationConfig cfg;
    if (!common.config_path.empty()) load_config_file(common.config_path, cfg);
    if (app.count("--seed")) cfg.seed = common.seed;
    if (app.count("--threads")) cfg.threads = common.threads;
    if (app.count("--replicates")) cfg.replicates = common.replicates;
    cfg.replicates = std::max<std::size_t>(
        1000, static_cast<std::size_t>(std::llround(static_cast<double>(cfg.replicates) * common.scale)));
    cfg.validate();
    kernels::select(kernels::parse_isa(common.kernel));

    Output result{CsvTable({}), {}, {}, kExitOk};
    if (moments->parsed()) result = cmd_moments(moments_args);
    else if (table->parsed()) result = cmd_table(table_args, cfg, err);
    else if (efficiency->parsed()) result = cmd_efficiency(eff_r);
    else result = cmd_moddev(moddev_args, cfg);

    RunManifest manifest;
    manifest.command_line = join_args(argc, argv);
    manifest.config = render_config(cfg);
    manifest.config_hash = fnv1a64(manifest.config + "[run]\n" + run_key(argc, argv) + "kernel=" +
                                   std::string(kernels::isa_name(kernels::active().isa)));
    manifest.seed = cfg.seed;
    manifest.versions = version_string();

    if (common.out_prefix.empty()) {
      result.csv.write(out);
      if (!result.md_header.empty()) {
        err << '\n';
        write_markdown(err, result.md_header, result.md_rows);
      }
      manifest.output_files.push_back("<stdout>");
      manifest.wall_time_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      err << '\n';
      write_manifest(err, manifest);
    } else {
      const std::string csv_path = common.out_prefix + ".csv";
      std::ofstream csv(csv_path, std::ios::binary);
      result.csv.write(csv);
      manifest.output_files.push_back(csv_path);
      if (!result.md_header.empty()) {
        const std::string md_path = common.out_prefix + ".md";
        std::ofstream md(md_path, std::ios::binary);
        write_markdown(md, result.md_header, result.md_rows);
        manifest.output_files.push_back(md_path);
      }
      if (!csv) throw Error("cannot write " + csv_path);
      manifest.wall_time_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      std::ofstream mf(common.out_prefix + ".manifest", std::ios::binary);
      write_manifest(mf, manifest);
    }
    return result.exit_code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SearchExhausted& e) {
    err << "search exhausted: " << e.what() << '\n';
    return kExitSearchExhausted;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace arelab::cli
