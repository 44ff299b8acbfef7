#include "wimop/wro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace wimop {

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

// Point where q overtakes p; requires p.slope < q.slope.
double crossing(const Line& p, const Line& q) { return (p.intercept - q.intercept) / (q.slope - p.slope); }

// Upper envelope of the lines, ordered by increasing slope.
std::vector<Line> upper_envelope(std::vector<Line> lines) {
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return a.slope < b.slope || (a.slope == b.slope && a.intercept > b.intercept);
  });
  std::vector<Line> hull;
  for (const Line& l : lines) {
    if (!hull.empty() && hull.back().slope == l.slope) continue;
    while (hull.size() >= 2 && crossing(hull[hull.size() - 2], l) <= crossing(hull[hull.size() - 2], hull.back())) {
      hull.pop_back();
    }
    hull.push_back(l);
  }
  return hull;
}

void check_bounds(const VBounds& b) {
  if (!(b.V1 <= b.V2) || !(b.v_last_max >= 0.0) || !(b.v_i_max >= b.V1)) {
    throw Error(ErrorCode::EmptyBoundsBox, "the V box is empty");
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = seed * 6364136223846793005ULL + a * 1442695040888963407ULL + b * 0x9E3779B97F4A7C15ULL;
  s ^= s >> 31;
  return s;
}

std::vector<std::vector<CutLine>> build_lines(const Frontier& frontier, const CutSets& cuts, const ObservationSet& obs) {
  std::vector<std::vector<CutLine>> lines(cuts.size());
  for (size_t i = 0; i < cuts.size(); ++i) {
    for (const Vector& w : cuts[i]) {
      lines[i].push_back({frontier.min_sq_distance(w), (w - obs.point(static_cast<int>(i))).norm()});
    }
  }
  return lines;
}

}  // namespace

InnerVSolution inner_v_solve(const std::vector<std::vector<CutLine>>& lines, const VBounds& bounds, double epsilon) {
  check_bounds(bounds);
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  const int N = static_cast<int>(lines.size());
  const double t_max = bounds.v_last_max;
  InnerVSolution out;
  out.v = Vector::Zero(N + 1);
  if (N == 0) return out;

  std::vector<std::vector<Line>> hulls(static_cast<size_t>(N));
  std::vector<size_t> active(static_cast<size_t>(N), 0);
  struct Event {
    double t;
    int i;
    size_t s;
  };
  std::vector<Event> events;
  double slope = epsilon;
  for (int i = 0; i < N; ++i) {
    std::vector<Line> ls{{0.0, bounds.V1}};
    for (const CutLine& c : lines[static_cast<size_t>(i)]) ls.push_back({-c.distance, c.loss});
    auto& h = hulls[static_cast<size_t>(i)];
    h = upper_envelope(std::move(ls));
    size_t s = 0;
    while (s + 1 < h.size() && crossing(h[s], h[s + 1]) <= 0.0) ++s;
    active[static_cast<size_t>(i)] = s;
    slope += h[s].slope / N;
    for (size_t r = s + 1; r < h.size(); ++r) {
      const double t = crossing(h[r - 1], h[r]);
      if (t < t_max) events.push_back({t, i, r});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.t < b.t || (a.t == b.t && (a.i < b.i || (a.i == b.i && a.s < b.s)));
  });

  // Walk right while the objective still decreases.
  double t_star = 0.0;
  if (slope < 0.0) {
    t_star = t_max;
    size_t e = 0;
    while (e < events.size()) {
      const double t = events[e].t;
      for (; e < events.size() && events[e].t == t; ++e) {
        const auto i = static_cast<size_t>(events[e].i);
        slope += (hulls[i][events[e].s].slope - hulls[i][active[i]].slope) / N;
        active[i] = events[e].s;
      }
      if (slope >= 0.0) {
        t_star = t;
        break;
      }
    }
  }

  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    double vi = bounds.V1;
    for (const CutLine& c : lines[static_cast<size_t>(i)]) vi = std::max(vi, c.loss - t_star * c.distance);
    out.v(i) = vi;
    total += vi;
  }
  out.v(N) = t_star;
  out.objective = epsilon * t_star + total / N;
  return out;
}

InnerVSolution inner_v_solve(const Frontier& frontier, const CutSets& cuts, const ObservationSet& obs,
                             const VBounds& bounds, double epsilon) {
  if (static_cast<int>(cuts.size()) != obs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one cut set per observation expected");
  }
  return inner_v_solve(build_lines(frontier, cuts, obs), bounds, epsilon);
}

MasterSolution solve_master(const CutSets& cuts, const MqpInstance& instance, const ThetaSpec& spec,
                            const WeightGrid& grid, const ObservationSet& obs, const WroConfig& config,
                            const VBounds& bounds, const std::vector<Vector>& extra_starts) {
  if (static_cast<int>(cuts.size()) != obs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one cut set per observation expected");
  }
  MasterSolution out;
  const bool no_cuts = std::all_of(cuts.begin(), cuts.end(), [](const auto& c) { return c.empty(); });
  if (no_cuts) {
    out.theta = extra_starts.empty() ? Vector(0.5 * (spec.lower() + spec.upper())) : extra_starts.front();
    out.v = Vector::Zero(obs.size() + 1);
    out.stencil_converged = true;
    return out;
  }

  // Distances to y_i do not depend on theta.
  std::vector<std::vector<double>> dist(cuts.size());
  for (size_t i = 0; i < cuts.size(); ++i) {
    for (const Vector& w : cuts[i]) dist[i].push_back((w - obs.point(static_cast<int>(i))).norm());
  }
  std::vector<std::vector<CutLine>> lines(cuts.size());
  const auto lines_at = [&](const Vector& theta) -> const std::vector<std::vector<CutLine>>& {
    const Frontier f = frontier_at(instance, spec, theta, grid);
    for (size_t i = 0; i < cuts.size(); ++i) {
      lines[i].resize(cuts[i].size());
      for (size_t j = 0; j < cuts[i].size(); ++j) lines[i][j] = {f.min_sq_distance(cuts[i][j]), dist[i][j]};
    }
    return lines;
  };
  const Objective1 f = [&](const Vector& theta) {
    return inner_v_solve(lines_at(theta), bounds, config.epsilon).objective;
  };

  const MultiStartResult best =
      multistart_minimize(f, spec.lower(), spec.upper(), extra_starts, theta_search_options(spec, config));
  const InnerVSolution inner = inner_v_solve(lines_at(best.x), bounds, config.epsilon);
  out.theta = best.x;
  out.v = inner.v;
  out.objective = inner.objective;
  out.evaluations = best.evaluations;
  out.stencil_converged = best.stencil_converged;
  return out;
}

Violation max_violation(const Frontier& frontier, const Vector& y_i, double t, double v_i, const Vector& box_lo,
                        const Vector& box_hi, const WroConfig& config, std::uint64_t seed) {
  if (frontier.empty()) throw Error(ErrorCode::EmptyFrontier, "violation subproblem needs a frontier");
  const auto n = box_lo.size();
  const Objective1 phi = [&](const Vector& y) { return frontier.min_sq_distance(y) - t * (y - y_i).norm() - v_i; };
  const Objective1 neg_phi = [&](const Vector& y) { return -phi(y); };

  const int res = config.grid_resolution;
  double cells = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) cells *= res;
  const bool full_grid = cells <= 250000.0;
  std::mt19937_64 rng(seed);

  std::vector<Vector> scan;
  double spacing = 0.05;
  if (full_grid) {
    scan = grid_points(box_lo, box_hi, res);
    spacing = 1.0 / (res - 1);
  } else {
    if (n <= 12) scan = grid_points(box_lo, box_hi, 2);
    const std::vector<Vector> extra = stratified_points(box_lo, box_hi, 2000, rng);
    scan.insert(scan.end(), extra.begin(), extra.end());
  }

  Violation out;
  std::vector<double> values(scan.size());
  for (size_t s = 0; s < scan.size(); ++s) values[s] = phi(scan[s]);
  out.evaluations = static_cast<int>(scan.size());

  std::vector<size_t> order(scan.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] > values[b]; });

  const Vector width = (box_hi - box_lo).cwiseMax(std::numeric_limits<double>::min());
  struct Start {
    Vector x;
    double step;
  };
  std::vector<Start> starts;
  constexpr int kScanStarts = 4;
  for (size_t r = 0; r < order.size() && static_cast<int>(starts.size()) < kScanStarts; ++r) {
    const Vector& cand = scan[order[r]];
    bool near = false;
    for (const Start& s : starts) near = near || ((s.x - cand).cwiseQuotient(width)).cwiseAbs().maxCoeff() < 1.5 * spacing;
    if (!near) starts.push_back({cand, spacing});
  }
  starts.push_back({y_i.cwiseMax(box_lo).cwiseMin(box_hi), 0.25});
  if (!full_grid) {
    for (int k = 0; k < frontier.size(); ++k) {
      Vector corner(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double xk = frontier.point(k)(j);
        corner(j) = (xk - box_lo(j) >= box_hi(j) - xk) ? box_lo(j) : box_hi(j);
      }
      starts.push_back({corner, 0.25});
    }
  }

  out.cv = -std::numeric_limits<double>::infinity();
  if (!order.empty()) {
    out.cv = values[order.front()];
    out.witness = scan[order.front()];
  }
  for (size_t s = 0; s < starts.size(); ++s) {
    PatternSearchOptions opt;
    opt.initial_step = starts[s].step;
    opt.min_step = 1e-7;
    opt.max_evaluations = 3000;
    opt.random_directions = static_cast<int>(n);
    opt.seed = mix_seed(seed, s, 7);
    const PatternSearchResult r = pattern_search(neg_phi, box_lo, box_hi, starts[s].x, opt);
    out.evaluations += r.evaluations;
    if (-r.value > out.cv) {
      out.cv = -r.value;
      out.witness = r.x;
    }
  }
  return out;
}

namespace {

// Appends cuts from the violation pass. Returns the number added; updates the
// consecutive-drop counter.
int append_cuts(CuttingPlaneState& state, const std::vector<Violation>& viol, const WroConfig& config,
                int& consecutive_drops) {
  const int N = static_cast<int>(viol.size());
  std::vector<int> targets;
  if (config.cut_policy == CutPolicy::MaxOnly) {
    int best = 0;
    for (int i = 1; i < N; ++i) {
      if (viol[static_cast<size_t>(i)].cv > viol[static_cast<size_t>(best)].cv) best = i;
    }
    if (viol[static_cast<size_t>(best)].cv > config.cut_threshold) targets.push_back(best);
  } else {
    for (int i = 0; i < N; ++i) {
      if (viol[static_cast<size_t>(i)].cv > config.cut_threshold) targets.push_back(i);
    }
  }
  int added = 0;
  for (int i : targets) {
    const Vector& w = viol[static_cast<size_t>(i)].witness;
    auto& set = state.cut_sets[static_cast<size_t>(i)];
    const bool dup = std::any_of(set.begin(), set.end(), [&](const Vector& c) { return (c - w).norm() <= 1e-8; });
    if (dup) {
      ++consecutive_drops;
      continue;
    }
    set.push_back(w);
    consecutive_drops = 0;
    ++added;
  }
  return added;
}

std::vector<Violation> violation_pass(const Frontier& frontier, const Vector& v, const ObservationSet& obs,
                                      const WroConfig& config, int iteration) {
  const int N = obs.size();
  std::vector<Violation> out;
  out.reserve(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) {
    out.push_back(max_violation(frontier, obs.point(i), v(N), v(i), obs.box_lower(), obs.box_upper(), config,
                                mix_seed(config.seed, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(i))));
  }
  return out;
}

double max_cv_of(const std::vector<Violation>& viol, Vector& cv) {
  cv.resize(static_cast<Eigen::Index>(viol.size()));
  double m = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < viol.size(); ++i) {
    cv(static_cast<Eigen::Index>(i)) = viol[i].cv;
    m = std::max(m, viol[i].cv);
  }
  return m;
}

}  // namespace

WroResult fit_wro(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                  const ObservationSet& obs, const WroConfig& config) {
  if (obs.empty()) throw Error(ErrorCode::NoObservations, "fit_wro needs at least one observation");
  config.validate();
  spec.check_against(instance);
  const int N = obs.size();

  WroResult out;
  out.state.cut_sets.assign(static_cast<size_t>(N), {});
  if (config.epsilon == 0.0) {
    const ErmResult erm = fit_erm(instance, spec, grid, obs, config);
    out.theta_hat = erm.theta_hat;
    out.objective = erm.objective;
    out.v_hat = Vector::Zero(N + 1);
    out.converged = true;
    out.delegated_to_erm = true;
    out.note = "epsilon = 0: the ball is the empirical distribution, fitted by ERM";
    out.state.incumbent_theta = out.theta_hat;
    out.state.incumbent_v = out.v_hat;
    return out;
  }

  const VBounds bounds = make_vbounds(instance.B(), obs.R(), config.m, config.epsilon);
  CuttingPlaneState& state = out.state;
  std::vector<Vector> incumbents;
  int consecutive_drops = 0;

  for (int it = 1; it <= config.max_iterations; ++it) {
    std::vector<Vector> starts(incumbents.rbegin(), incumbents.rend());
    if (starts.size() > 5) starts.resize(5);
    const MasterSolution master = solve_master(state.cut_sets, instance, spec, grid, obs, config, bounds, starts);
    incumbents.push_back(master.theta);

    const Frontier frontier = frontier_at(instance, spec, master.theta, grid);
    const std::vector<Violation> viol = violation_pass(frontier, master.v, obs, config, it);

    state.iteration = it;
    state.incumbent_theta = master.theta;
    state.incumbent_v = master.v;
    const double max_cv = max_cv_of(viol, state.cv);

    IterationRecord rec;
    rec.iteration = it;
    rec.master_objective = master.objective;
    rec.max_cv = max_cv;
    rec.theta = master.theta;

    out.theta_hat = master.theta;
    out.v_hat = master.v;
    out.objective = master.objective;
    out.iterations = it;

    if (max_cv <= config.delta) {
      state.history.push_back(rec);
      out.converged = true;
      break;
    }
    rec.cuts_added = append_cuts(state, viol, config, consecutive_drops);
    state.history.push_back(rec);
    if (consecutive_drops >= 3) out.stagnated = true;
    if (rec.cuts_added == 0) {
      out.note = "no new cuts: every witness duplicates an existing cut or is below the cut threshold";
      break;
    }
  }
  if (!out.converged && out.note.empty()) out.note = "iteration cap reached";
  return out;
}

WorstCaseValue worst_case_objective(const Vector& theta, const MqpInstance& instance, const ThetaSpec& spec,
                                    const WeightGrid& grid, const ObservationSet& obs, const WroConfig& config) {
  if (obs.empty()) throw Error(ErrorCode::NoObservations, "worst-case value needs observations");
  config.validate();
  const Frontier frontier = frontier_at(instance, spec, theta, grid);
  WorstCaseValue out;
  if (config.epsilon == 0.0) {
    out.objective = mean_loss(frontier, obs);
    out.v = Vector::Zero(obs.size() + 1);
    out.converged = true;
    return out;
  }
  const VBounds bounds = make_vbounds(instance.B(), obs.R(), config.m, config.epsilon);
  CuttingPlaneState state;
  state.cut_sets.assign(static_cast<size_t>(obs.size()), {});
  int drops = 0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const InnerVSolution inner = inner_v_solve(frontier, state.cut_sets, obs, bounds, config.epsilon);
    const std::vector<Violation> viol = violation_pass(frontier, inner.v, obs, config, it);
    out.objective = inner.objective;
    out.v = inner.v;
    out.iterations = it;
    out.max_cv = max_cv_of(viol, state.cv);
    if (out.max_cv <= config.delta) {
      out.converged = true;
      break;
    }
    if (append_cuts(state, viol, config, drops) == 0) break;
  }
  return out;
}

RadiusSelection select_radius(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                              const ObservationSet& obs, const std::vector<double>& radii,
                              const ObservationSet& validation, const WroConfig& config) {
  if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "radius list is empty");
  RadiusSelection out;
  for (size_t r = 0; r < radii.size(); ++r) {
    WroConfig cfg = config;
    cfg.epsilon = radii[r];
    WroResult fit = fit_wro(instance, spec, grid, obs, cfg);
    RadiusRow row;
    row.epsilon = radii[r];
    row.prediction_error = prediction_error(fit.theta_hat, instance, spec, grid, validation);
    row.objective = fit.objective;
    row.iterations = fit.iterations;
    row.converged = fit.converged;
    const bool better = r == 0 || row.prediction_error < out.rows[static_cast<size_t>(out.best_index)].prediction_error ||
                        (row.prediction_error == out.rows[static_cast<size_t>(out.best_index)].prediction_error &&
                         row.epsilon < out.best_epsilon);
    out.rows.push_back(row);
    out.fits.push_back(std::move(fit));
    if (better) {
      out.best_index = static_cast<int>(r);
      out.best_epsilon = row.epsilon;
    }
  }
  return out;
}

}  // namespace wimop
