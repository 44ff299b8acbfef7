#include "wimop/erm.hpp"

#include <sstream>

namespace wimop {

MultiStartOptions theta_search_options(const ThetaSpec& spec, const WroConfig& config) {
  MultiStartOptions opt;
  opt.scan_budget = spec.n_theta() <= 2 ? 441 : 625;
  opt.restarts = config.restarts;
  opt.seed = config.seed;
  opt.polish.initial_step = 0.25;
  opt.polish.min_step = 1e-4;
  opt.polish.max_evaluations = 400;
  return opt;
}

ErmResult fit_erm(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                  const ObservationSet& obs, const WroConfig& config) {
  if (obs.empty()) throw Error(ErrorCode::NoObservations, "fit_erm needs at least one observation");
  config.validate();
  spec.check_against(instance);

  const Objective1 risk = [&](const Vector& theta) { return empirical_risk(theta, instance, spec, grid, obs); };
  const MultiStartResult best = multistart_minimize(risk, spec.lower(), spec.upper(), {}, theta_search_options(spec, config));

  ErmResult out;
  out.theta_hat = best.x;
  out.objective = best.value;
  out.trace = best.trace;
  out.restarts_used = best.restarts_used;
  out.evaluations = best.evaluations;
  out.stencil_converged = best.stencil_converged;
  return out;
}

namespace {

using nlohmann::json;

json to_json_vec(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json_mat(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) rows.push_back(to_json_vec(M.row(r).transpose()));
  return rows;
}

}  // namespace

json emit_kkt_formulation(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                          const ObservationSet& obs) {
  spec.check_against(instance);
  const int n = instance.n();
  const int q = instance.q();
  const int K = grid.size();
  const int N = obs.size();
  const double B = instance.B();
  const double R = obs.empty() ? 0.0 : obs.R();

  // Largest slack of each inequality row over the feasible bounding box.
  const Vector& lo = instance.region_lower();
  const Vector& hi = instance.region_upper();
  double max_slack = 0.0;
  for (int r = 0; r < q; ++r) {
    if (instance.is_equality(r)) continue;
    double min_ax = 0.0;
    for (int j = 0; j < n; ++j) min_ax += std::min(instance.A()(r, j) * lo(j), instance.A()(r, j) * hi(j));
    max_slack = std::max(max_slack, instance.b()(r) - min_ax);
  }
  max_slack = std::max(max_slack, hi.maxCoeff());

  json doc;
  doc["problem"] = "single-level KKT reformulation of inverse multiobjective QP with surrogate loss";
  doc["constraint_convention"] = "A x <= b with flagged equality rows, x >= 0; rows written as A x >= b are negated";
  doc["solved_in_process"] = false;
  doc["dimensions"] = {{"n", n}, {"p", instance.p()}, {"q", q}, {"K", K}, {"N", N}, {"n_theta", spec.n_theta()}};

  json layout = json::array();
  for (const ThetaEntry& e : spec.layout()) {
    layout.push_back({{"objective", e.objective}, {"coord", e.coord}, {"scale", e.scale}});
  }
  json variables = json::array();
  variables.push_back({{"name", "theta"}, {"size", spec.n_theta()}, {"lower", to_json_vec(spec.lower())},
                       {"upper", to_json_vec(spec.upper())}, {"layout", layout}});
  variables.push_back({{"name", "x[k]"}, {"count", K}, {"size", n}, {"domain", "continuous"}});
  variables.push_back({{"name", "u[k]"}, {"count", K}, {"size", q + n},
                       {"domain", "nonnegative on inequality rows, free on equality rows"}});
  variables.push_back({{"name", "t[k]"}, {"count", K}, {"size", q + n}, {"domain", "binary"}});
  variables.push_back({{"name", "vartheta[i,k]"}, {"count", N * K}, {"size", n}, {"domain", "continuous"}});
  variables.push_back({{"name", "z[i,k]"}, {"count", N * K}, {"size", 1}, {"domain", "binary"}});
  doc["variables"] = variables;

  double offset = 0.0;
  for (const Vector& y : obs.points()) offset -= (K - 1) * y.squaredNorm();
  if (N > 0) offset /= N;
  doc["objective"] = {{"sense", "min"},
                      {"expression", "(1/N) sum_i sum_k ||y_i - vartheta[i,k]||^2"},
                      {"constant_offset", offset},
                      {"note", "objective + constant_offset equals the mean surrogate loss"}};

  const double M_link = B;
  const double M_dual = (B + R) * (B + R);
  doc["big_m"] = {{"linearization", M_link},
                  {"primal_slack", max_slack},
                  {"dual", M_dual},
                  {"loss_bound", (B + R) * (B + R)},
                  {"dual_note", "multiplier bound is a heuristic; tighten for the target solver"}};

  json eq_rows = json::array();
  for (int r = 0; r < q; ++r) {
    if (instance.is_equality(r)) eq_rows.push_back(r);
  }

  json blocks = json::array();
  for (int k = 0; k < K; ++k) {
    const WeightVector& w = grid.weights[static_cast<size_t>(k)];
    Matrix Hk = Matrix::Zero(n, n);
    Vector gk = Vector::Zero(n);
    for (int l = 0; l < instance.p(); ++l) {
      Hk += w[l] * instance.objective(l).Q;
      gk += w[l] * instance.objective(l).c;
    }
    json theta_terms = json::array();
    for (int j = 0; j < spec.n_theta(); ++j) {
      const ThetaEntry& e = spec.layout()[static_cast<size_t>(j)];
      gk(e.coord) -= w[e.objective] * instance.objective(e.objective).c(e.coord);
      theta_terms.push_back({{"row", e.coord}, {"theta", j}, {"coefficient", w[e.objective] * e.scale}});
    }
    json block;
    block["k"] = k;
    block["weight"] = to_json_vec(w.w());
    block["primal_feasibility"] = {{"A", to_json_mat(instance.A())}, {"b", to_json_vec(instance.b())},
                                   {"equality_rows", eq_rows}, {"nonnegativity", true}};
    block["stationarity"] = {{"rows", n},
                             {"expression", "H_k x[k] + g_k + sum_j coeff_j theta_j e_row + C^T u[k] = 0"},
                             {"H", to_json_mat(Hk)},
                             {"g_fixed", to_json_vec(gk)},
                             {"theta_terms", theta_terms}};
    block["complementarity"] = {{"dual_bound", "u[k] <= M_dual t[k]"},
                                {"primal_bound", "b - C x[k] <= M_primal (1 - t[k])"},
                                {"rows", q + n - static_cast<int>(eq_rows.size())}};
    blocks.push_back(block);
  }
  doc["kkt_blocks"] = blocks;

  json lin = json::array();
  json assign = json::array();
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < K; ++k) {
      lin.push_back({{"i", i},
                     {"k", k},
                     {"M", M_link},
                     {"constraints",
                      {"0 <= vartheta[i,k] <= M z[i,k]", "x[k] - M (1 - z[i,k]) <= vartheta[i,k] <= x[k]"}}});
    }
    assign.push_back({{"i", i}, {"expression", "sum_k z[i,k] = 1"}});
  }
  doc["linearization_blocks"] = lin;
  doc["assignment_rows"] = assign;

  json ys = json::array();
  for (const Vector& y : obs.points()) ys.push_back(to_json_vec(y));
  doc["observations"] = ys;
  return doc;
}

std::string render_formulation_text(const nlohmann::json& doc) {
  std::ostringstream os;
  const auto& dims = doc.at("dimensions");
  os << doc.at("problem").get<std::string>() << "\n";
  os << "convention: " << doc.at("constraint_convention").get<std::string>() << "\n";
  os << "n=" << dims.at("n") << " p=" << dims.at("p") << " q=" << dims.at("q") << " K=" << dims.at("K")
     << " N=" << dims.at("N") << " n_theta=" << dims.at("n_theta") << "\n\n";
  os << "minimize " << doc.at("objective").at("expression").get<std::string>() << "  (offset "
     << doc.at("objective").at("constant_offset").get<double>() << ")\n";
  os << "variables:\n";
  for (const auto& v : doc.at("variables")) {
    os << "  " << v.at("name").get<std::string>() << " size " << v.at("size");
    if (v.contains("count")) os << " x" << v.at("count");
    if (v.contains("domain")) os << " (" << v.at("domain").get<std::string>() << ")";
    os << "\n";
  }
  os << "big-M: linearization " << doc.at("big_m").at("linearization") << ", primal slack "
     << doc.at("big_m").at("primal_slack") << ", dual " << doc.at("big_m").at("dual") << "\n\n";
  for (const auto& b : doc.at("kkt_blocks")) {
    os << "KKT block k=" << b.at("k") << " w=" << b.at("weight").dump() << "\n";
    os << "  " << b.at("stationarity").at("expression").get<std::string>() << "  [" << b.at("stationarity").at("rows")
       << " rows]\n";
    os << "  A x[k] <= b, x[k] >= 0, equality rows " << b.at("primal_feasibility").at("equality_rows").dump() << "\n";
    os << "  " << b.at("complementarity").at("dual_bound").get<std::string>() << ", "
       << b.at("complementarity").at("primal_bound").get<std::string>() << "\n";
  }
  os << "\n" << doc.at("linearization_blocks").size() << " linearization blocks:\n";
  for (const auto& l : doc.at("linearization_blocks")) {
    os << "  (i=" << l.at("i") << ", k=" << l.at("k") << ") " << l.at("constraints")[0].get<std::string>() << "; "
       << l.at("constraints")[1].get<std::string>() << "\n";
  }
  for (const auto& a : doc.at("assignment_rows")) {
    os << "  i=" << a.at("i") << ": " << a.at("expression").get<std::string>() << "\n";
  }
  return os.str();
}

}  // namespace wimop
