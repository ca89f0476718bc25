// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "wwbkit/bound_sweep.hpp"
#include "wwbkit/closed_form.hpp"
#include "wwbkit/estimator.hpp"
#include "wwbkit/validation.hpp"

using namespace wwbkit;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Scenario scenario(const std::string& file) { return load_scenario(std::string(WWBKIT_SCENARIO_DIR) + "/" + file); }

Verdict from_suite(const std::string& name, int workers) {
  ValidationOptions opts;
  opts.workers = workers;
  const SuiteReport r = run_suite(name, opts);
  return {r.passed(), name + " " + std::to_string(r.pass_count()) + "/" + std::to_string(r.checks.size()) +
                          " max deviation " + fmt("%.3g", r.max_deviation())};
}

Verdict zero_information() {
  const auto g = ArrayGeometry::ula(8, 0.5);
  const double target = 8.0 / 27.0;
  OptimizerConfig c;
  c.h_grid = {HGridSpec::for_support(2.0)};
  std::string detail;
  bool ok = true;
  for (bool conditional : {false, true}) {
    const SignalModel m = conditional ? SignalModel::conditional_constant(10, 1.0).with_snr_db(-80.0)
                                      : SignalModel::unconditional(1.0, 1.0, 10).with_snr_db(-80.0);
    const GEvaluator eval = [&](const Eigen::VectorXd& h, const Eigen::VectorXd& s) {
      return Eigen::MatrixXd::Constant(1, 1, linear_g(h(0), s(0), g, m));
    };
    const double wwb = maximize(eval, 1, c).objective;
    ok = ok && std::abs(wwb - target) < 1e-3;
    detail += std::string(conditional ? " cwwb " : "uwwb ") + fmt("%.6f", wwb);
  }
  return {ok, detail + " target " + fmt("%.6f", target)};
}

Verdict bound_property(int workers) {
  const Scenario s = scenario("uca8_mse.json");
  OptimizerConfig config = s.resolved_optimizer();
  config.workers = workers;
  MseOptions opts;
  opts.workers = workers;
  bool ok = true;
  std::string detail;
  std::vector<MseRow> rows;
  std::vector<WwbResult> bounds;
  for (std::size_t k = 0; k < s.snr_db.size(); ++k) {
    rows.push_back(mse_at(s, k, opts));
    bounds.push_back(bound_at(s, s.snr_db[k], config));
    for (Eigen::Index i = 0; i < 2; ++i) {
      if (rows[k].mse(i) < bounds[k].bound(i, i) - 2.0 * rows[k].std_error(i)) {
        ok = false;
        detail += " order violated at " + fmt("%g", s.snr_db[k]) + " dB;";
      }
    }
  }
  const MseRow& low = rows.front();
  const double guess = 2.0 / 3.0;
  const double low_avg = 0.5 * (low.mse(0) + low.mse(1));
  const double low_dev = std::abs(low_avg - guess) / guess;
  const MseRow& high = rows.back();
  double high_ratio = 0.0;
  for (Eigen::Index i = 0; i < 2; ++i) high_ratio = std::max(high_ratio, high.mse(i) / bounds.back().bound(i, i));
  ok = ok && low_dev < 0.10 && high_ratio <= 10.0;
  detail += " low-SNR mse " + fmt("%.4f", low_avg) + " (" + fmt("%.1f", 100.0 * low_dev) + "% from 2/3)";
  detail += ", high-SNR mse/wwb " + fmt("%.2f", high_ratio);
  return {ok, detail};
}

Verdict v_shape(int workers) {
  Scenario s = scenario("vshape_conditional.json");
  const double snr = -17.5;
  std::vector<double> u, v;
  for (double delta : {30.0, 60.0, 90.0}) {
    s.geometry_spec.delta_deg = delta;
    OptimizerConfig config = s.resolved_optimizer();
    config.refine = true;
    config.workers = workers;
    const WwbResult r = bound_at(s, snr, config);
    u.push_back(r.bound(0, 0));
    v.push_back(r.bound(1, 1));
  }
  const double u_spread = (*std::max_element(u.begin(), u.end()) - *std::min_element(u.begin(), u.end())) /
                          *std::min_element(u.begin(), u.end());
  const bool ok = v[2] <= v[0] && v[2] <= v[1] && u_spread < 0.25;
  return {ok, "v(30,60,90) " + fmt("%.4g", v[0]) + " " + fmt("%.4g", v[1]) + " " + fmt("%.4g", v[2]) +
                  ", u spread " + fmt("%.1f", 100.0 * u_spread) + "%"};
}

Verdict uca_symmetry(int workers) {
  const Scenario s = scenario("uca16_unconditional.json");
  OptimizerConfig config = s.resolved_optimizer();
  config.workers = workers;
  double worst = 0.0;
  for (double snr : s.snr_db) {
    const WwbResult r = bound_at(s, snr, config);
    worst = std::max(worst, std::abs(r.bound(0, 0) - r.bound(1, 1)) / r.bound(0, 0));
  }
  return {worst < 1e-10, "max relative difference " + fmt("%.3g", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "wwbkit_acceptance";
  fs::create_directories(dir);
  auto run = [&](const std::vector<std::string>& args, const std::string& out, int workers) {
    std::vector<std::string> all{"wwbkit"};
    all.insert(all.end(), args.begin(), args.end());
    const std::string path = (dir / out).string();
    all.insert(all.end(), {"--out", path, "--workers", std::to_string(workers)});
    std::vector<const char*> argv;
    for (const auto& a : all) argv.push_back(a.c_str());
    std::ostringstream sink;
    if (cli::run(static_cast<int>(argv.size()), argv.data(), sink, sink) != cli::kExitOk) return std::string("<failed>");
    return slurp(path);
  };
  const std::string dir_s = WWBKIT_SCENARIO_DIR;
  const std::vector<std::string> bound{"bound", "--scenario", dir_s + "/uca16_unconditional.json"};
  const std::vector<std::string> mse{"mse", "--scenario", dir_s + "/uca8_mse.json", "--trials", "100", "--seed", "5"};
  bool ok = true;
  std::string detail;
  for (const auto& [name, args] : {std::pair{"bound", bound}, std::pair{"mse", mse}}) {
    const std::string a = run(args, std::string(name) + "_1a.csv", 1);
    const std::string b = run(args, std::string(name) + "_1b.csv", 1);
    const std::string c = run(args, std::string(name) + "_4.csv", 4);
    const bool same = a != "<failed>" && a == b && a == c;
    ok = ok && same;
    detail += std::string(name) + (same ? " identical " : " differs ");
  }
  fs::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main() {
  const int workers = 4;
  struct Criterion {
    int id;
    double budget_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 1.0, zero_information},
      {2, 30.0, [&] { return from_suite("closed-form-xcheck", workers); }},
      {3, 10.0, [&] { return from_suite("appendix-c", workers); }},
      {4, 60.0, [&] { return from_suite("eta-mc", workers); }},
      {5, 30.0, [&] { return from_suite("prior-quadrature", workers); }},
      {6, 5.0, [&] { return from_suite("s-stationarity", workers); }},
      {7, 600.0, [&] { return bound_property(workers); }},
      {8, 120.0, [&] { return v_shape(workers); }},
      {9, 60.0, [&] { return uca_symmetry(workers); }},
      {10, 120.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_s;
    const bool pass = v.ok && in_time;
    if (!pass) ++failures;
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << v.detail << "  ["
              << fmt("%.2f", seconds) << " s, budget " << fmt("%g", c.budget_s) << " s"
              << (in_time ? "" : ", over budget") << "]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
