#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "wwbkit/bound_sweep.hpp"
#include "wwbkit/error.hpp"
#include "wwbkit/estimator.hpp"
#include "wwbkit/scenario.hpp"
#include "wwbkit/validation.hpp"

namespace wwbkit::cli {

namespace {

struct Flags {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int workers = 0;
  std::optional<int> refine;
  std::optional<std::string> s_grid;
  std::optional<std::string> h_grid;
  std::optional<std::string> sweep_delta;
};

double to_double(const std::string& token, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(token, &used);
    if (used == token.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("bad number '" + token + "' in " + what);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f = open_output(path);
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::string joined(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + '\n';
}

const char* model_name(const Scenario& s) { return s.model_spec.conditional ? "conditional" : "unconditional"; }

Scenario load(const Flags& f) {
  if (f.scenario.empty()) throw UsageError("--scenario is required");
  return load_scenario(f.scenario);
}

void apply_overrides(Scenario& s, const Flags& f) {
  if (f.refine) s.optimizer.refine = *f.refine == 1;
  if (f.s_grid) {
    s.optimizer.s_grid = parse_list(*f.s_grid);
    for (double x : s.optimizer.s_grid) {
      if (!(x > 0.0 && x < 1.0)) throw UsageError("--s-grid values must lie in (0,1)");
    }
  }
  if (f.h_grid) s.optimizer.h_grid = {parse_h_grid(*f.h_grid)};
}

OptimizerConfig optimizer_for(const Scenario& s, int workers) {
  OptimizerConfig c = s.resolved_optimizer();
  c.workers = workers;
  c.validate(s.prior.size());
  return c;
}

int cmd_bound(const Flags& f, std::ostream& out) {
  Scenario s = load(f);
  apply_overrides(s, f);
  std::vector<double> deltas;
  if (f.sweep_delta) {
    if (s.geometry_spec.kind != "v_shaped") throw UsageError("--sweep-delta needs a v_shaped geometry");
    deltas = parse_range(*f.sweep_delta);
  } else {
    deltas.push_back(std::nan(""));
  }
  const OptimizerConfig config = optimizer_for(s, f.workers);
  const bool planar = s.prior.size() == 2;
  const bool sweep = f.sweep_delta.has_value();
  if (!f.out.empty()) open_output(f.out);

  std::vector<std::string> header;
  if (sweep) header.push_back("delta_deg");
  header.insert(header.end(), {"snr_db", "model"});
  if (planar) {
    header.insert(header.end(), {"wwb_u", "wwb_v", "wwb_uv", "best_h_u", "best_h_v", "best_s_u", "best_s_v"});
  } else {
    header.insert(header.end(), {"wwb", "best_h", "best_s"});
  }
  header.push_back("objective");
  std::string csv = joined(header);
  std::string timing = joined(sweep ? std::vector<std::string>{"delta_deg", "snr_db", "seconds"}
                                    : std::vector<std::string>{"snr_db", "seconds"});

  for (double delta : deltas) {
    if (sweep) s.geometry_spec.delta_deg = delta;
    for (double snr : s.snr_db) {
      const auto start = std::chrono::steady_clock::now();
      const WwbResult r = bound_at(s, snr, config);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::vector<std::string> row;
      if (sweep) row.push_back(format_number(delta));
      row.push_back(format_number(snr));
      row.emplace_back(model_name(s));
      for (Eigen::Index i = 0; i < r.bound.rows(); ++i) row.push_back(format_number(r.bound(i, i)));
      if (planar) row.push_back(format_number(r.bound(0, 1)));
      for (Eigen::Index i = 0; i < r.best_h.size(); ++i) row.push_back(format_number(r.best_h(i)));
      for (Eigen::Index i = 0; i < r.best_s.size(); ++i) row.push_back(format_number(r.best_s(i)));
      row.push_back(format_number(r.objective));
      csv += joined(row);
      std::vector<std::string> t;
      if (sweep) t.push_back(format_number(delta));
      t.push_back(format_number(snr));
      t.push_back(format_number(seconds));
      timing += joined(t);
    }
  }
  write_text(f.out, csv, out);
  if (!f.out.empty()) write_text(f.out + ".timing.csv", timing, out);
  return kExitOk;
}

int cmd_mse(const Flags& f, std::ostream& out) {
  if (f.trials && *f.trials < 1) throw UsageError("--trials must be >= 1");
  if (f.sweep_delta) throw UsageError("--sweep-delta applies to the bound subcommand only");
  Scenario s = load(f);
  apply_overrides(s, f);
  if (f.trials) s.trials = *f.trials;
  if (f.seed) s.seed = *f.seed;
  const OptimizerConfig config = optimizer_for(s, f.workers);
  const bool planar = s.prior.size() == 2;
  if (!f.out.empty()) open_output(f.out);

  std::vector<std::string> header{"snr_db", "model"};
  if (planar) {
    header.insert(header.end(), {"mse_u", "mse_v", "stderr_u", "stderr_v", "wwb_u", "wwb_v"});
  } else {
    header.insert(header.end(), {"mse", "stderr", "wwb"});
  }
  header.insert(header.end(), {"trials", "seed"});
  std::string csv = joined(header);
  std::string timing = "snr_db,mse_seconds,wwb_seconds\n";

  MseOptions opts;
  opts.trials = s.trials;
  opts.seed = s.seed;
  opts.seed_override = true;
  opts.workers = f.workers;
  for (std::size_t k = 0; k < s.snr_db.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const MseRow row = mse_at(s, k, opts);
    const auto t1 = std::chrono::steady_clock::now();
    const WwbResult bound = bound_at(s, s.snr_db[k], config);
    const auto t2 = std::chrono::steady_clock::now();
    std::vector<std::string> cells{format_number(row.snr_db), model_name(s)};
    for (Eigen::Index i = 0; i < row.mse.size(); ++i) cells.push_back(format_number(row.mse(i)));
    for (Eigen::Index i = 0; i < row.std_error.size(); ++i) cells.push_back(format_number(row.std_error(i)));
    for (Eigen::Index i = 0; i < bound.bound.rows(); ++i) cells.push_back(format_number(bound.bound(i, i)));
    cells.push_back(std::to_string(row.trials));
    cells.push_back(std::to_string(s.seed));
    csv += joined(cells);
    timing += joined({format_number(row.snr_db), format_number(std::chrono::duration<double>(t1 - t0).count()),
                      format_number(std::chrono::duration<double>(t2 - t1).count())});
  }
  write_text(f.out, csv, out);
  if (!f.out.empty()) write_text(f.out + ".timing.csv", timing, out);
  return kExitOk;
}

int cmd_validate(const std::string& suite, const Flags& f, std::ostream& out) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
    names.push_back(suite);
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  ValidationOptions opts;
  if (f.seed) opts.seed = *f.seed;
  opts.workers = f.workers;
  bool ok = true;
  for (const auto& name : names) {
    const SuiteReport r = run_suite(name, opts);
    print_report(out, r);
    ok = ok && r.passed();
  }
  return ok ? kExitOk : kExitCheckFailed;
}

void add_common(CLI::App* app, Flags& f, bool scenario_flags) {
  if (scenario_flags) {
    app->add_option("--scenario", f.scenario, "Scenario JSON file")->required();
    app->add_option("--out", f.out, "Output CSV (stdout when omitted); timing goes to <out>.timing.csv");
    app->add_option("--trials", f.trials, "Monte-Carlo trials per SNR point");
    app->add_option("--refine", f.refine, "Refine the best grid point (0 or 1)")->check(CLI::Range(0, 1));
    app->add_option("--s-grid", f.s_grid, "Exponent candidates, e.g. 0.3,0.5,0.7");
    app->add_option("--h-grid", f.h_grid, "min:max:count (log-spaced |h|) or v1,v2,...");
    app->add_option("--sweep-delta", f.sweep_delta, "V-shaped opening angles a:b:step in degrees");
  }
  app->add_option("--seed", f.seed, "RNG seed");
  app->add_option("--workers", f.workers, "Worker threads")->envname("WWBKIT_WORKERS")->check(CLI::PositiveNumber);
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part, "list '" + text + "'"));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("expected a:b:step, got '" + text + "'");
  const double a = to_double(parts[0], text), b = to_double(parts[1], text), step = to_double(parts[2], text);
  if (!(step > 0.0) || b < a) throw UsageError("range '" + text + "' needs step > 0 and b >= a");
  const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

HGridSpec parse_h_grid(const std::string& text) {
  HGridSpec spec;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("expected min:max:count, got '" + text + "'");
    spec.min_abs = to_double(parts[0], text);
    spec.max_abs = to_double(parts[1], text);
    const double count = to_double(parts[2], text);
    if (count < 1.0 || count != std::floor(count)) throw UsageError("h grid count must be a positive integer");
    spec.count = static_cast<int>(count);
    if (!(spec.min_abs > 0.0 && spec.max_abs >= spec.min_abs)) {
      throw UsageError("h grid needs 0 < min <= max");
    }
    return spec;
  }
  spec.values = parse_list(text);
  for (double v : spec.values) {
    if (v == 0.0) throw UsageError("h grid values must be nonzero");
  }
  return spec;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weiss-Weinstein bounds for direction-of-arrival estimation", "wwbkit"};
  app.require_subcommand(1);
  Flags f;
  f.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string suite;

  auto* bound = app.add_subcommand("bound", "Optimized bound per SNR point");
  add_common(bound, f, true);
  auto* mse = app.add_subcommand("mse", "MAP global MSE per SNR point, paired with the bound");
  add_common(mse, f, true);
  auto* validate = app.add_subcommand("validate", "Run an oracle suite (or 'all')");
  validate->add_option("suite", suite, "Suite name")->required();
  add_common(validate, f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*bound) return cmd_bound(f, out);
    if (*mse) return cmd_mse(f, out);
    return cmd_validate(suite, f, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace wwbkit::cli
