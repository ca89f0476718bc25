#include "wwbkit/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wwbkit/error.hpp"

namespace wwbkit {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void only_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ScenarioError(join(path, it.key()), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ScenarioError(join(path, key), "missing field");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ScenarioError(path, "must be finite");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ScenarioError(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ScenarioError(path, "integer out of range");
  }
  return static_cast<int>(x);
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ScenarioError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ScenarioError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], index(path, i)));
  return out;
}

template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(path, e.what());
  }
}

GeometrySpec parse_geometry(const json& j, const std::string& path) {
  only_keys(j, path, {"kind", "m", "per_branch", "spacing", "delta_deg", "positions"});
  GeometrySpec g;
  g.kind = text(require(j, path, "kind"), join(path, "kind"));
  if (g.kind == "ula" || g.kind == "uca") {
    g.m = integer(require(j, path, "m"), join(path, "m"));
    g.spacing = number(require(j, path, "spacing"), join(path, "spacing"));
  } else if (g.kind == "v_shaped") {
    g.m = integer(require(j, path, "per_branch"), join(path, "per_branch"));
    g.spacing = number(require(j, path, "spacing"), join(path, "spacing"));
    g.delta_deg = number(require(j, path, "delta_deg"), join(path, "delta_deg"));
  } else if (g.kind == "linear") {
    const std::string p = join(path, "positions");
    for (double x : numbers(require(j, path, "positions"), p)) g.positions.push_back({x, 0.0});
  } else if (g.kind == "planar") {
    const std::string p = join(path, "positions");
    const json& pos = require(j, path, "positions");
    if (!pos.is_array()) throw ScenarioError(p, "expected an array of [dx, dy] pairs");
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const auto xy = numbers(pos[i], index(p, i));
      if (xy.size() != 2) throw ScenarioError(index(p, i), "expected [dx, dy]");
      g.positions.push_back({xy[0], xy[1]});
    }
  } else {
    throw ScenarioError(join(path, "kind"), "unknown geometry kind '" + g.kind + "'");
  }
  guarded(path, [&] { return g.build(); });
  return g;
}

ModelSpec parse_model(const json& j, const std::string& path) {
  only_keys(j, path, {"type", "sigma_s2", "sigma_n2", "snapshots", "waveform"});
  ModelSpec m;
  const std::string type = text(require(j, path, "type"), join(path, "type"));
  m.sigma_n2 = number(require(j, path, "sigma_n2"), join(path, "sigma_n2"));
  if (type == "unconditional") {
    m.conditional = false;
    m.sigma_s2 = number(require(j, path, "sigma_s2"), join(path, "sigma_s2"));
    m.snapshots = integer(require(j, path, "snapshots"), join(path, "snapshots"));
    if (j.contains("waveform")) throw ScenarioError(join(path, "waveform"), "only valid for conditional models");
  } else if (type == "conditional") {
    m.conditional = true;
    if (j.contains("sigma_s2")) throw ScenarioError(join(path, "sigma_s2"), "only valid for unconditional models");
    if (j.contains("waveform")) {
      const std::string p = join(path, "waveform");
      const json& w = j.at("waveform");
      if (!w.is_array()) throw ScenarioError(p, "expected an array of [re, im] pairs");
      for (std::size_t i = 0; i < w.size(); ++i) {
        const auto ri = numbers(w[i], index(p, i));
        if (ri.size() != 2) throw ScenarioError(index(p, i), "expected [re, im]");
        m.waveform.emplace_back(ri[0], ri[1]);
      }
      m.snapshots = static_cast<int>(m.waveform.size());
      if (j.contains("snapshots") && integer(j.at("snapshots"), join(path, "snapshots")) != m.snapshots) {
        throw ScenarioError(join(path, "snapshots"), "must equal the waveform length");
      }
    } else {
      m.snapshots = integer(require(j, path, "snapshots"), join(path, "snapshots"));
    }
  } else {
    throw ScenarioError(join(path, "type"), "expected 'unconditional' or 'conditional'");
  }
  if (m.snapshots < 1) throw ScenarioError(join(path, "snapshots"), "must be >= 1");
  if (!(m.sigma_n2 > 0.0)) throw ScenarioError(join(path, "sigma_n2"), "must be > 0");
  if (!m.conditional && !(m.sigma_s2 > 0.0)) throw ScenarioError(join(path, "sigma_s2"), "must be > 0");
  guarded(path, [&] { return m.build(); });
  return m;
}

PriorSpec parse_prior(const json& j, const std::string& path, std::size_t q) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array with one entry per parameter");
  if (j.size() != q) throw ScenarioError(path, "expected " + std::to_string(q) + " entries");
  std::vector<PriorEntry> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = index(path, i);
    only_keys(j[i], p, {"type", "a", "b", "mu", "sigma2"});
    const std::string type = text(require(j[i], p, "type"), join(p, "type"));
    if (type == "uniform") {
      const double a = number(require(j[i], p, "a"), join(p, "a"));
      const double b = number(require(j[i], p, "b"), join(p, "b"));
      if (!(a < b)) throw ScenarioError(join(p, "b"), "uniform prior needs a < b");
      entries.push_back(UniformPrior{a, b});
    } else if (type == "gaussian") {
      const double mu = number(require(j[i], p, "mu"), join(p, "mu"));
      const double s2 = number(require(j[i], p, "sigma2"), join(p, "sigma2"));
      if (!(s2 > 0.0)) throw ScenarioError(join(p, "sigma2"), "must be > 0");
      entries.push_back(GaussianPrior{mu, s2});
    } else {
      throw ScenarioError(join(p, "type"), "expected 'uniform' or 'gaussian'");
    }
  }
  return PriorSpec(std::move(entries));
}

std::vector<double> parse_snr(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    out = numbers(j, path);
  } else if (j.is_object()) {
    only_keys(j, path, {"start", "stop", "step"});
    const double a = number(require(j, path, "start"), join(path, "start"));
    const double b = number(require(j, path, "stop"), join(path, "stop"));
    const double step = number(require(j, path, "step"), join(path, "step"));
    if (!(step > 0.0) || b < a) throw ScenarioError(join(path, "step"), "needs step > 0 and start <= stop");
    const double n = std::floor((b - a) / step + 1e-9);
    if (n > 1e6) throw ScenarioError(join(path, "step"), "too many SNR points");
    for (int i = 0; i <= static_cast<int>(n); ++i) out.push_back(a + i * step);
  } else {
    throw ScenarioError(path, "expected a list or {start, stop, step}");
  }
  if (out.empty()) throw ScenarioError(path, "SNR sweep is empty");
  return out;
}

HGridSpec parse_hgrid_entry(const json& j, const std::string& path) {
  HGridSpec g;
  if (j.is_array()) {
    g.values = numbers(j, path);
    if (g.values.empty()) throw ScenarioError(path, "h grid is empty");
  } else {
    only_keys(j, path, {"min", "max", "count"});
    g.min_abs = number(require(j, path, "min"), join(path, "min"));
    g.max_abs = number(require(j, path, "max"), join(path, "max"));
    g.count = integer(require(j, path, "count"), join(path, "count"));
  }
  guarded(path, [&] { return g.candidates(); });
  return g;
}

OptimizerConfig parse_optimizer(const json& j, const std::string& path, std::size_t q) {
  only_keys(j, path, {"h_grid", "s_grid", "strategy", "refine"});
  OptimizerConfig c;
  if (j.contains("h_grid")) {
    const std::string p = join(path, "h_grid");
    const json& h = j.at("h_grid");
    // A list of grids (one per parameter) or a single grid.
    if (h.is_array() && !h.empty() && (h[0].is_object() || h[0].is_array())) {
      for (std::size_t i = 0; i < h.size(); ++i) c.h_grid.push_back(parse_hgrid_entry(h[i], index(p, i)));
      if (c.h_grid.size() != q) throw ScenarioError(p, "expected one grid per parameter");
    } else {
      c.h_grid.push_back(parse_hgrid_entry(h, p));
    }
  }
  if (j.contains("s_grid")) {
    const std::string p = join(path, "s_grid");
    c.s_grid = numbers(j.at("s_grid"), p);
    if (c.s_grid.empty()) throw ScenarioError(p, "s grid is empty");
    for (std::size_t i = 0; i < c.s_grid.size(); ++i) {
      if (!(c.s_grid[i] > 0.0 && c.s_grid[i] < 1.0)) throw ScenarioError(index(p, i), "must lie in (0,1)");
    }
  }
  if (j.contains("strategy")) {
    const std::string s = text(j.at("strategy"), join(path, "strategy"));
    if (s == "auto") c.strategy = SearchStrategy::Auto;
    else if (s == "joint") c.strategy = SearchStrategy::ExhaustiveJoint;
    else if (s == "profile") c.strategy = SearchStrategy::PerParameterProfile;
    else throw ScenarioError(join(path, "strategy"), "expected 'auto', 'joint' or 'profile'");
  }
  if (j.contains("refine")) {
    if (!j.at("refine").is_boolean()) throw ScenarioError(join(path, "refine"), "expected true or false");
    c.refine = j.at("refine").get<bool>();
  }
  return c;
}

json hgrid_json(const HGridSpec& g) {
  if (!g.values.empty()) return g.values;
  return json{{"min", g.min_abs}, {"max", g.max_abs}, {"count", g.count}};
}

const char* strategy_name(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::ExhaustiveJoint: return "joint";
    case SearchStrategy::PerParameterProfile: return "profile";
    default: return "auto";
  }
}

double support_length(const PriorEntry& e) {
  if (const auto* u = std::get_if<UniformPrior>(&e)) return u->length();
  return 6.0 * std::sqrt(std::get<GaussianPrior>(e).sigma2);
}

}  // namespace

ArrayGeometry GeometrySpec::build() const {
  if (kind == "ula") return ArrayGeometry::ula(m, spacing);
  if (kind == "uca") return ArrayGeometry::uca(m, spacing);
  if (kind == "v_shaped") return ArrayGeometry::v_shaped(m, spacing, delta_deg);
  if (kind == "linear") {
    std::vector<double> dx;
    for (const auto& p : positions) dx.push_back(p.dx);
    return ArrayGeometry::linear(dx, "linear");
  }
  if (kind == "planar") return ArrayGeometry(positions, ArrayKind::Planar, "planar");
  throw std::invalid_argument("unknown geometry kind '" + kind + "'");
}

SignalModel ModelSpec::build() const {
  if (!conditional) return SignalModel::unconditional(sigma_s2, sigma_n2, snapshots);
  if (waveform.empty()) return SignalModel::conditional_constant(snapshots, sigma_n2);
  return SignalModel::conditional(waveform, sigma_n2);
}

Eigen::VectorXd direction_cosines(const std::vector<double>& angles_deg, ArrayKind kind) {
  const double r = std::numbers::pi / 180.0;
  if (kind == ArrayKind::Linear) {
    if (angles_deg.size() != 1) throw std::invalid_argument("linear arrays take one angle");
    return Eigen::VectorXd::Constant(1, std::sin(angles_deg[0] * r));
  }
  if (angles_deg.size() != 2) throw std::invalid_argument("planar arrays take elevation and azimuth");
  const double el = angles_deg[0] * r, az = angles_deg[1] * r;
  return Eigen::Vector2d(std::sin(el) * std::cos(az), std::sin(el) * std::sin(az));
}

Eigen::VectorXd Scenario::theta_true() const { return direction_cosines(theta_true_deg, geometry().kind()); }

OptimizerConfig Scenario::resolved_optimizer() const {
  OptimizerConfig c = optimizer;
  if (c.h_grid.empty()) {
    for (const auto& e : prior.entries()) c.h_grid.push_back(HGridSpec::for_support(support_length(e)));
  }
  return c;
}

Scenario parse_scenario(const std::string& text_doc) {
  json doc;
  try {
    doc = json::parse(text_doc);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text_doc.size(); ++i) line += text_doc[i] == '\n';
    throw ScenarioError("", "line " + std::to_string(line) + ": malformed document");
  }
  only_keys(doc, "", {"name", "geometry", "model", "prior", "theta_true_deg", "snr_db", "optimizer", "trials",
                      "seed", "map_grid"});
  Scenario s;
  if (doc.contains("name")) s.name = text(doc.at("name"), "name");
  s.geometry_spec = parse_geometry(require(doc, "", "geometry"), "geometry");
  s.model_spec = parse_model(require(doc, "", "model"), "model");
  const ArrayGeometry geom = s.geometry_spec.build();
  const std::size_t q = static_cast<std::size_t>(geom.parameter_count());
  s.prior = doc.contains("prior") ? parse_prior(doc.at("prior"), "prior", q) : PriorSpec::uniform(q);
  if (doc.contains("theta_true_deg")) {
    s.theta_true_deg = numbers(doc.at("theta_true_deg"), "theta_true_deg");
    if (s.theta_true_deg.size() != q) {
      throw ScenarioError("theta_true_deg", "expected " + std::to_string(q) + " angles");
    }
  } else {
    s.theta_true_deg.assign(q, 0.0);
  }
  if (!s.prior.contains(direction_cosines(s.theta_true_deg, geom.kind()))) {
    throw ScenarioError("theta_true_deg", "lies outside the prior support");
  }
  s.snr_db = parse_snr(require(doc, "", "snr_db"), "snr_db");
  if (doc.contains("optimizer")) s.optimizer = parse_optimizer(doc.at("optimizer"), "optimizer", q);
  if (doc.contains("trials")) {
    s.trials = integer(doc.at("trials"), "trials");
    if (s.trials < 1) throw ScenarioError("trials", "must be >= 1");
  }
  if (doc.contains("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned()) throw ScenarioError("seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("map_grid")) {
    s.map_grid = integer(doc.at("map_grid"), "map_grid");
    if (s.map_grid < 3) throw ScenarioError("map_grid", "must be >= 3");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(e.path(), path + ": " + e.detail());
  }
}

std::string serialize_scenario(const Scenario& s) {
  json doc;
  if (!s.name.empty()) doc["name"] = s.name;
  const GeometrySpec& g = s.geometry_spec;
  json geo{{"kind", g.kind}};
  if (g.kind == "ula" || g.kind == "uca") {
    geo["m"] = g.m;
    geo["spacing"] = g.spacing;
  } else if (g.kind == "v_shaped") {
    geo["per_branch"] = g.m;
    geo["spacing"] = g.spacing;
    geo["delta_deg"] = g.delta_deg;
  } else if (g.kind == "linear") {
    json pos = json::array();
    for (const auto& p : g.positions) pos.push_back(p.dx);
    geo["positions"] = pos;
  } else {
    json pos = json::array();
    for (const auto& p : g.positions) pos.push_back({p.dx, p.dy});
    geo["positions"] = pos;
  }
  doc["geometry"] = geo;

  const ModelSpec& m = s.model_spec;
  json model{{"type", m.conditional ? "conditional" : "unconditional"}, {"sigma_n2", m.sigma_n2}};
  if (!m.conditional) model["sigma_s2"] = m.sigma_s2;
  if (m.conditional && !m.waveform.empty()) {
    json w = json::array();
    for (const auto& x : m.waveform) w.push_back({x.real(), x.imag()});
    model["waveform"] = w;
  } else {
    model["snapshots"] = m.snapshots;
  }
  doc["model"] = model;

  json prior = json::array();
  for (const auto& e : s.prior.entries()) {
    if (const auto* u = std::get_if<UniformPrior>(&e)) {
      prior.push_back({{"type", "uniform"}, {"a", u->a}, {"b", u->b}});
    } else {
      const auto& gp = std::get<GaussianPrior>(e);
      prior.push_back({{"type", "gaussian"}, {"mu", gp.mu}, {"sigma2", gp.sigma2}});
    }
  }
  doc["prior"] = prior;
  doc["theta_true_deg"] = s.theta_true_deg;
  doc["snr_db"] = s.snr_db;

  json opt{{"s_grid", s.optimizer.s_grid},
           {"strategy", strategy_name(s.optimizer.strategy)},
           {"refine", s.optimizer.refine}};
  if (s.optimizer.h_grid.size() == 1) {
    opt["h_grid"] = hgrid_json(s.optimizer.h_grid[0]);
  } else if (!s.optimizer.h_grid.empty()) {
    json list = json::array();
    for (const auto& h : s.optimizer.h_grid) list.push_back(hgrid_json(h));
    opt["h_grid"] = list;
  }
  doc["optimizer"] = opt;
  doc["trials"] = s.trials;
  doc["seed"] = s.seed;
  doc["map_grid"] = s.map_grid;
  return doc.dump(2) + "\n";
}

}  // namespace wwbkit
