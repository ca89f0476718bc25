#include "wwbkit/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wwbkit/error.hpp"

namespace wwbkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Axes {
  std::size_t q = 0;
  std::vector<std::vector<double>> lists;  // h_0..h_{q-1}, s_0..s_{q-1}

  std::size_t dims() const { return lists.size(); }
  std::size_t total() const {
    std::size_t n = 1;
    for (const auto& l : lists) {
      if (l.size() != 0 && n > std::numeric_limits<std::size_t>::max() / l.size()) {
        return std::numeric_limits<std::size_t>::max();
      }
      n *= l.size();
    }
    return n;
  }
  // Mixed-radix decode, dimension 0 slowest.
  std::vector<std::size_t> decode(std::size_t flat) const {
    std::vector<std::size_t> idx(dims());
    for (std::size_t d = dims(); d-- > 0;) {
      idx[d] = flat % lists[d].size();
      flat /= lists[d].size();
    }
    return idx;
  }
  void point(const std::vector<std::size_t>& idx, Eigen::VectorXd& h, Eigen::VectorXd& s) const {
    h.resize(static_cast<Eigen::Index>(q));
    s.resize(static_cast<Eigen::Index>(q));
    for (std::size_t i = 0; i < q; ++i) {
      h(static_cast<Eigen::Index>(i)) = lists[i][idx[i]];
      s(static_cast<Eigen::Index>(i)) = lists[q + i][idx[q + i]];
    }
  }
};

struct Scored {
  double objective = kNaN;
  std::vector<std::size_t> idx;
};

struct Tally {
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

double score(const GEvaluator& eval, const Eigen::VectorXd& h, const Eigen::VectorXd& s, double cap) {
  try {
    const Eigen::MatrixXd g = eval(h, s);
    if (!g.allFinite()) return kNaN;
    const Eigen::MatrixXd b = wwb_from_g(h, g, cap);
    if (!b.allFinite() || (b.diagonal().array() < 0.0).any()) return kNaN;
    return b.trace();
  } catch (const std::exception&) {
    return kNaN;
  }
}

// First strictly-greater wins, so ties resolve to the earliest point.
Scored argmax(const std::vector<double>& obj) {
  Scored best;
  std::size_t at = 0;
  bool found = false;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    if (std::isnan(obj[i])) continue;
    if (!found || obj[i] > best.objective) {
      best.objective = obj[i];
      at = i;
      found = true;
    }
  }
  if (found) best.idx = {at};
  return best;
}

Scored search_joint(const GEvaluator& eval, const Axes& axes, const OptimizerConfig& cfg, Tally& tally) {
  const std::size_t n = axes.total();
  std::vector<double> obj(n, kNaN);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    Eigen::VectorXd h, s;
    axes.point(axes.decode(i), h, s);
    obj[i] = score(eval, h, s, cfg.condition_cap);
  });
  tally.evaluated += n;
  for (double o : obj) tally.skipped += std::isnan(o);
  Scored best = argmax(obj);
  if (!best.idx.empty()) best.idx = axes.decode(best.idx[0]);
  return best;
}

Scored search_profile(const GEvaluator& eval, const Axes& axes, const OptimizerConfig& cfg, Tally& tally) {
  const std::size_t dims = axes.dims();
  // Start on the grid diagonal: every axis at the same relative position.
  std::size_t steps = 0;
  for (const auto& l : axes.lists) steps = std::max(steps, l.size());
  std::vector<double> obj(steps, kNaN);
  auto diagonal = [&](std::size_t i) {
    std::vector<std::size_t> idx(dims);
    for (std::size_t d = 0; d < dims; ++d) idx[d] = i * axes.lists[d].size() / steps;
    return idx;
  };
  parallel_for(steps, cfg.workers, [&](std::size_t i) {
    Eigen::VectorXd h, s;
    axes.point(diagonal(i), h, s);
    obj[i] = score(eval, h, s, cfg.condition_cap);
  });
  tally.evaluated += steps;
  for (double o : obj) tally.skipped += std::isnan(o);
  Scored best = argmax(obj);
  if (best.idx.empty()) return best;
  best.idx = diagonal(best.idx[0]);

  for (int round = 0; round < cfg.profile_rounds; ++round) {
    for (std::size_t d = 0; d < dims; ++d) {
      const std::size_t n = axes.lists[d].size();
      std::vector<double> line(n, kNaN);
      parallel_for(n, cfg.workers, [&](std::size_t i) {
        std::vector<std::size_t> idx = best.idx;
        idx[d] = i;
        Eigen::VectorXd h, s;
        axes.point(idx, h, s);
        line[i] = score(eval, h, s, cfg.condition_cap);
      });
      tally.evaluated += n;
      for (double o : line) tally.skipped += std::isnan(o);
      const Scored b = argmax(line);
      if (!b.idx.empty() && b.objective > best.objective) {
        best.objective = b.objective;
        best.idx[d] = b.idx[0];
      }
    }
  }
  return best;
}

Scored search(const GEvaluator& eval, const Axes& axes, const OptimizerConfig& cfg, Tally& tally) {
  const bool joint = cfg.strategy == SearchStrategy::ExhaustiveJoint ||
                     (cfg.strategy == SearchStrategy::Auto && axes.total() <= cfg.joint_cap);
  return joint ? search_joint(eval, axes, cfg, tally) : search_profile(eval, axes, cfg, tally);
}

// Same count, half the local spacing, centred on the winner, kept inside the
// original envelope.
std::vector<double> refine_axis(const std::vector<double>& list, std::size_t at, double lo_open, double hi_open) {
  if (list.size() < 2) return list;
  double gap = std::numeric_limits<double>::infinity();
  if (at > 0) gap = std::min(gap, list[at] - list[at - 1]);
  if (at + 1 < list.size()) gap = std::min(gap, list[at + 1] - list[at]);
  const double step = 0.5 * gap;
  const double center = list[at];
  const long half = static_cast<long>(list.size() / 2);
  std::vector<double> out;
  for (long k = -half; k <= half; ++k) {
    const double x = k == 0 ? center : center + static_cast<double>(k) * step;
    if (x < list.front() || x > list.back()) continue;
    if (!(x > lo_open && x < hi_open)) continue;
    if (x == 0.0) continue;
    out.push_back(x);
  }
  return out;
}

}  // namespace

std::vector<double> HGridSpec::candidates() const {
  std::vector<double> out;
  if (!values.empty()) {
    out = values;
  } else {
    if (!(min_abs > 0.0) || !(max_abs >= min_abs) || count < 1) {
      throw std::invalid_argument("h grid needs 0 < min <= max and count >= 1");
    }
    std::vector<double> pos(static_cast<std::size_t>(count));
    const double l0 = std::log(min_abs), l1 = std::log(max_abs);
    for (int i = 0; i < count; ++i) {
      pos[static_cast<std::size_t>(i)] = count == 1 ? min_abs : std::exp(l0 + (l1 - l0) * i / (count - 1));
    }
    pos.back() = max_abs;
    pos.front() = min_abs;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), pos.begin(), pos.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (double x : out) {
    if (x == 0.0 || !std::isfinite(x)) throw std::invalid_argument("h grid must not contain 0 or non-finite values");
  }
  return out;
}

HGridSpec HGridSpec::for_support(double length, int count) {
  HGridSpec g;
  g.min_abs = 1e-3;
  g.max_abs = length - 1e-3;
  g.count = count;
  return g;
}

void OptimizerConfig::validate(std::size_t q) const {
  if (h_grid.empty()) throw std::invalid_argument("h grid is empty");
  if (h_grid.size() != 1 && h_grid.size() != q) throw std::invalid_argument("h grid needs one entry per parameter");
  for (const auto& g : h_grid) {
    if (g.candidates().empty()) throw std::invalid_argument("h grid is empty");
  }
  if (s_grid.empty()) throw std::invalid_argument("s grid is empty");
  for (double s : s_grid) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("s grid values must lie in (0,1)");
  }
  if (profile_rounds < 1) throw std::invalid_argument("profile_rounds must be >= 1");
}

double condition_number(const Eigen::MatrixXd& g) {
  if (g.rows() == 1) return g(0, 0) != 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
  const double lo = ev.minCoeff();
  return lo > 0.0 ? ev.maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd wwb_from_g(const Eigen::VectorXd& h, const Eigen::MatrixXd& g, double condition_cap) {
  const Eigen::Index q = h.size();
  if (g.rows() != q || g.cols() != q) throw std::invalid_argument("G and h dimensions differ");
  const double cond = condition_number(g);
  if (!(cond <= condition_cap)) {
    std::ostringstream os;
    os << "G is singular or ill-conditioned (condition " << cond << ")";
    throw DegenerateConfiguration(os.str());
  }
  Eigen::MatrixXd out(q, q);
  if (q == 1) {
    out(0, 0) = h(0) * h(0) / g(0, 0);
  } else if (q == 2) {
    const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    out(0, 0) = h(0) * h(0) * g(1, 1) / det;
    out(1, 1) = h(1) * h(1) * g(0, 0) / det;
    out(0, 1) = -h(0) * h(1) * g(0, 1) / det;
    out(1, 0) = out(0, 1);
  } else {
    const Eigen::MatrixXd hm = h.asDiagonal();
    out = hm * g.ldlt().solve(hm);
    out = 0.5 * (out + out.transpose());
  }
  return out;
}

WwbResult maximize(const GEvaluator& evaluator, std::size_t q, const OptimizerConfig& config) {
  config.validate(q);
  Axes axes;
  axes.q = q;
  for (std::size_t i = 0; i < q; ++i) {
    axes.lists.push_back(config.h_grid[config.h_grid.size() == 1 ? 0 : i].candidates());
  }
  std::vector<double> sg = config.s_grid;
  std::sort(sg.begin(), sg.end());
  sg.erase(std::unique(sg.begin(), sg.end()), sg.end());
  for (std::size_t i = 0; i < q; ++i) axes.lists.push_back(sg);

  Tally tally;
  Scored best = search(evaluator, axes, config, tally);
  if (best.idx.empty()) throw DegenerateConfiguration("every grid point is invalid");
  Eigen::VectorXd h, s;
  axes.point(best.idx, h, s);

  if (config.refine) {
    Axes fine;
    fine.q = q;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < axes.dims(); ++d) {
      fine.lists.push_back(d < q ? refine_axis(axes.lists[d], best.idx[d], -inf, inf)
                                 : refine_axis(axes.lists[d], best.idx[d], 0.0, 1.0));
    }
    const Scored second = search(evaluator, fine, config, tally);
    if (!second.idx.empty() && second.objective > best.objective) {
      best = second;
      fine.point(best.idx, h, s);
    }
  }

  WwbResult r;
  r.g = evaluator(h, s);
  r.bound = wwb_from_g(h, r.g, config.condition_cap);
  r.best_h = h;
  r.best_s = s;
  r.objective = r.bound.trace();
  r.evaluated = tally.evaluated;
  r.skipped = tally.skipped;
  return r;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& f) {
  const std::size_t w = workers > 1 ? std::min<std::size_t>(static_cast<std::size_t>(workers), n) : 1;
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wwbkit
