#include "wimop/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wimop {

PatternSearchResult pattern_search(const Objective1& f, const Vector& lo, const Vector& hi, const Vector& start,
                                   const PatternSearchOptions& options, double start_value) {
  const auto d = lo.size();
  if (hi.size() != d || start.size() != d) throw Error(ErrorCode::DimensionMismatch, "pattern_search: sizes");
  const Vector width = hi - lo;

  PatternSearchResult res;
  res.x = start.cwiseMax(lo).cwiseMin(hi);
  res.value = std::isfinite(start_value) ? start_value : f(res.x);
  if (!std::isfinite(start_value)) res.evaluations = 1;
  res.trace.push_back({res.x, res.value});

  std::vector<Vector> axes;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (width(j) <= 0.0) continue;
    Vector e = Vector::Zero(d);
    e(j) = 1.0;
    axes.push_back(e);
    axes.push_back(-e);
  }
  if (axes.empty()) {
    res.stencil_converged = true;
    return res;
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> dirs;
  size_t last_success = 0;
  double step = options.initial_step;

  while (res.evaluations < options.max_evaluations) {
    dirs = axes;
    for (int r = 0; r < options.random_directions; ++r) {
      Vector v(d);
      for (Eigen::Index j = 0; j < d; ++j) v(j) = width(j) > 0.0 ? normal(rng) : 0.0;
      const double nv = v.norm();
      if (nv == 0.0) continue;
      v /= nv;
      dirs.push_back(v);
      dirs.push_back(-v);
    }
    if (last_success < dirs.size()) std::rotate(dirs.begin(), dirs.begin() + static_cast<long>(last_success), dirs.end());

    bool improved = false;
    for (size_t k = 0; k < dirs.size() && res.evaluations < options.max_evaluations; ++k) {
      const Vector trial = (res.x + step * dirs[k].cwiseProduct(width)).cwiseMax(lo).cwiseMin(hi);
      if ((trial - res.x).cwiseAbs().maxCoeff() == 0.0) continue;
      const double v = f(trial);
      ++res.evaluations;
      if (v < res.value) {
        res.x = trial;
        res.value = v;
        res.trace.push_back({res.x, res.value});
        improved = true;
        last_success = k < axes.size() ? k : 0;
        break;
      }
    }
    if (improved) {
      if (options.expand_on_success) step = std::min(options.initial_step, 2.0 * step);
      continue;
    }
    if (step <= options.min_step) {
      res.stencil_converged = true;
      break;
    }
    step = std::max(0.5 * step, options.min_step);
  }
  return res;
}

std::vector<Vector> stratified_points(const Vector& lo, const Vector& hi, int count, std::mt19937_64& rng) {
  const auto d = lo.size();
  std::vector<Vector> out(static_cast<size_t>(count), Vector(d));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> perm(static_cast<size_t>(count));
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < count; ++i) {
      const double u = (perm[static_cast<size_t>(i)] + unif(rng)) / count;
      out[static_cast<size_t>(i)](j) = lo(j) + u * (hi(j) - lo(j));
    }
  }
  return out;
}

std::vector<Vector> grid_points(const Vector& lo, const Vector& hi, int per_axis) {
  const auto d = lo.size();
  if (per_axis < 2) throw Error(ErrorCode::InvalidArgument, "grid_points: need at least two points per axis");
  long total = 1;
  for (Eigen::Index j = 0; j < d; ++j) total *= per_axis;
  std::vector<Vector> out;
  out.reserve(static_cast<size_t>(total));
  std::vector<int> idx(static_cast<size_t>(d), 0);
  for (long c = 0; c < total; ++c) {
    Vector x(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      x(j) = lo(j) + (hi(j) - lo(j)) * idx[static_cast<size_t>(j)] / (per_axis - 1);
    }
    out.push_back(std::move(x));
    for (Eigen::Index j = 0; j < d; ++j) {
      if (++idx[static_cast<size_t>(j)] < per_axis) break;
      idx[static_cast<size_t>(j)] = 0;
    }
  }
  return out;
}

MultiStartResult multistart_minimize(const Objective1& f, const Vector& lo, const Vector& hi,
                                     const std::vector<Vector>& extra_starts, const MultiStartOptions& options) {
  const auto d = lo.size();
  MultiStartResult best;
  best.value = std::numeric_limits<double>::infinity();

  std::vector<Vector> scan;
  if (d > 0 && options.scan_budget > 1) {
    const int per_axis = static_cast<int>(std::floor(std::pow(options.scan_budget, 1.0 / static_cast<double>(d)) + 1e-9));
    if (per_axis >= 3) {
      scan = grid_points(lo, hi, per_axis);
    } else {
      std::mt19937_64 rng(options.seed);
      scan = stratified_points(lo, hi, options.scan_budget, rng);
    }
  } else {
    scan.push_back(0.5 * (lo + hi));
  }

  std::vector<double> values(scan.size());
  for (size_t i = 0; i < scan.size(); ++i) values[i] = f(scan[i]);
  int evaluations = static_cast<int>(scan.size());

  std::vector<size_t> order(scan.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });

  std::vector<SearchPoint> starts;
  for (const Vector& s : extra_starts) {
    const Vector clamped = s.cwiseMax(lo).cwiseMin(hi);
    starts.push_back({clamped, f(clamped)});
    ++evaluations;
  }
  int picked = 0;
  for (size_t r = 0; r < order.size() && picked < options.restarts; ++r) {
    const Vector& cand = scan[order[r]];
    bool duplicate = false;
    for (const SearchPoint& s : starts) duplicate = duplicate || (s.x - cand).cwiseAbs().maxCoeff() == 0.0;
    if (duplicate) continue;
    starts.push_back({cand, values[order[r]]});
    ++picked;
  }

  for (size_t r = 0; r < starts.size(); ++r) {
    PatternSearchOptions polish = options.polish;
    polish.seed = options.seed * 1000003ULL + r;
    PatternSearchResult res = pattern_search(f, lo, hi, starts[r].x, polish, starts[r].value);
    evaluations += res.evaluations;
    if (res.value < best.value) {
      best.x = res.x;
      best.value = res.value;
      best.stencil_converged = res.stencil_converged;
      best.trace = std::move(res.trace);
    }
  }
  best.evaluations = evaluations;
  best.restarts_used = static_cast<int>(starts.size());
  return best;
}

}  // namespace wimop
