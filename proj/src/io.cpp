#include "wimop/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wimop {

json vector_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) rows.push_back(vector_to_json(M.row(r).transpose()));
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j.at(static_cast<size_t>(r)).size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch, "ragged matrix in JSON");
    }
    M.row(r) = vector_from_json(j.at(static_cast<size_t>(r))).transpose();
  }
  return M;
}

json theta_spec_to_json(const ThetaSpec& spec) {
  json layout = json::array();
  for (const ThetaEntry& e : spec.layout()) {
    layout.push_back({{"objective", e.objective}, {"coord", e.coord}, {"scale", e.scale}});
  }
  return {{"layout", layout}, {"lower", vector_to_json(spec.lower())}, {"upper", vector_to_json(spec.upper())}};
}

ThetaSpec theta_spec_from_json(const json& j) {
  std::vector<ThetaEntry> layout;
  for (const auto& e : j.at("layout")) {
    layout.push_back({e.at("objective").get<int>(), e.at("coord").get<int>(), e.value("scale", 1.0)});
  }
  return ThetaSpec(std::move(layout), vector_from_json(j.at("lower")), vector_from_json(j.at("upper")));
}

json instance_to_json(const MqpInstance& instance, const ThetaSpec* spec) {
  json objectives = json::array();
  for (const Objective& o : instance.objectives()) {
    objectives.push_back({{"Q", matrix_to_json(o.Q)}, {"c", vector_to_json(o.c)}});
  }
  json eq = json::array();
  for (int r = 0; r < instance.q(); ++r) {
    if (instance.is_equality(r)) eq.push_back(r);
  }
  json j = {{"p", instance.p()},         {"n", instance.n()},         {"q", instance.q()},
            {"objectives", objectives}, {"A", matrix_to_json(instance.A())}, {"b", vector_to_json(instance.b())},
            {"eq_rows", eq}};
  if (spec) j["theta_spec"] = theta_spec_to_json(*spec);
  return j;
}

MqpInstance instance_from_json(const json& j) {
  std::vector<Objective> objectives;
  for (const auto& o : j.at("objectives")) objectives.push_back({matrix_from_json(o.at("Q")), vector_from_json(o.at("c"))});
  Matrix A = matrix_from_json(j.at("A"));
  Vector b = vector_from_json(j.at("b"));
  std::vector<bool> eq(static_cast<size_t>(A.rows()), false);
  for (const auto& r : j.value("eq_rows", json::array())) {
    const int row = r.get<int>();
    if (row < 0 || row >= A.rows()) throw Error(ErrorCode::DimensionMismatch, "eq_rows index out of range");
    eq[static_cast<size_t>(row)] = true;
  }
  if (j.contains("p") && j.at("p").get<int>() != static_cast<int>(objectives.size())) {
    throw Error(ErrorCode::DimensionMismatch, "p disagrees with the objective list");
  }
  return MqpInstance::create(std::move(objectives), std::move(A), std::move(b), std::move(eq));
}

json observations_to_json(const ObservationSet& obs) {
  json pts = json::array();
  for (const Vector& y : obs.points()) pts.push_back(vector_to_json(y));
  return {{"points", pts},
          {"support_box", {{"lower", vector_to_json(obs.box_lower())}, {"upper", vector_to_json(obs.box_upper())}}},
          {"R", obs.R()}};
}

ObservationSet observations_from_json(const json& j) {
  std::vector<Vector> pts;
  for (const auto& p : j.at("points")) pts.push_back(vector_from_json(p));
  const auto& box = j.at("support_box");
  return ObservationSet(std::move(pts), vector_from_json(box.at("lower")), vector_from_json(box.at("upper")));
}

std::string format_cell(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite value in a report cell");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  std::string s(buf);
  if (s == "-0.000000000000") s = "0.000000000000";
  return s;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw Error(ErrorCode::DimensionMismatch, "csv row width differs from header");
    for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_cell(row[c]);
    os << "\n";
  }
  return os.str();
}

std::string observations_to_csv(const ObservationSet& obs) {
  std::vector<std::string> header;
  for (int j = 0; j < obs.dim(); ++j) header.push_back("y" + std::to_string(j));
  std::vector<std::vector<double>> rows;
  for (const Vector& y : obs.points()) rows.emplace_back(y.data(), y.data() + y.size());
  return csv_table(header, rows);
}

ObservationSet observations_from_csv(const std::string& text, const Vector& box_lower, const Vector& box_upper) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  std::vector<Vector> pts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<Eigen::Index>(vals.size()) != box_lower.size()) {
      throw Error(ErrorCode::DimensionMismatch, "observation row width differs from the support box");
    }
    pts.push_back(Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  return ObservationSet(std::move(pts), box_lower, box_upper);
}

namespace {

json trace_to_json(const std::vector<SearchPoint>& trace) {
  json t = json::array();
  for (const SearchPoint& p : trace) t.push_back({{"theta", vector_to_json(p.x)}, {"objective", p.value}});
  return t;
}

}  // namespace

json erm_to_json(const ErmResult& r) {
  return {{"theta_hat", vector_to_json(r.theta_hat)},
          {"objective", r.objective},
          {"restarts_used", r.restarts_used},
          {"evaluations", r.evaluations},
          {"stencil_converged", r.stencil_converged},
          {"trace", trace_to_json(r.trace)}};
}

json wro_to_json(const WroResult& r) {
  json history = json::array();
  for (const IterationRecord& h : r.state.history) {
    history.push_back({{"iteration", h.iteration},
                       {"master_objective", h.master_objective},
                       {"max_cv", h.max_cv},
                       {"cuts_added", h.cuts_added},
                       {"theta", vector_to_json(h.theta)}});
  }
  json cuts = json::array();
  for (const auto& set : r.state.cut_sets) {
    json s = json::array();
    for (const Vector& w : set) s.push_back(vector_to_json(w));
    cuts.push_back(s);
  }
  return {{"theta_hat", vector_to_json(r.theta_hat)},
          {"v_hat", vector_to_json(r.v_hat)},
          {"objective", r.objective},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"stagnated", r.stagnated},
          {"delegated_to_erm", r.delegated_to_erm},
          {"note", r.note},
          {"history", history},
          {"cut_sets", cuts},
          {"final_cv", vector_to_json(r.state.cv)}};
}

json constants_to_json(const ConstantsBundle& c) {
  json j = {{"B", c.B},     {"R", c.R},       {"D", c.D},         {"kappa", c.kappa},
            {"lambda", c.lambda}, {"V1", c.V1}, {"V2", c.V2},     {"N", c.N},
            {"n_theta", c.n_theta}, {"epsilon", c.epsilon}, {"m", c.m}, {"H", c.H},
            {"lipschitz_y", c.lipschitz_y()}, {"notes", c.notes}};
  j["G"] = c.G ? json(*c.G) : json(nullptr);
  j["R0"] = c.R0 ? json(*c.R0) : json(nullptr);
  const auto lt = c.lipschitz_theta();
  j["lipschitz_theta"] = lt ? json(*lt) : json(nullptr);
  return j;
}

std::string convergence_csv(const std::vector<IterationRecord>& history) {
  std::vector<std::vector<double>> rows;
  for (const IterationRecord& h : history) {
    rows.push_back({static_cast<double>(h.iteration), h.max_cv, h.master_objective, static_cast<double>(h.cuts_added)});
  }
  return csv_table({"iteration", "max_cv", "objective", "cuts_added"}, rows);
}

std::string constants_csv(const ConstantsBundle& c) {
  std::ostringstream os;
  os << "name,value\n";
  const auto put = [&](const char* name, double v) { os << name << "," << format_cell(v) << "\n"; };
  put("B", c.B);
  put("R", c.R);
  put("D", c.D);
  put("kappa", c.kappa);
  put("lambda", c.lambda);
  put("V1", c.V1);
  put("V2", c.V2);
  put("N", c.N);
  put("n_theta", c.n_theta);
  put("epsilon", c.epsilon);
  put("m", c.m);
  put("lipschitz_y", c.lipschitz_y());
  if (const auto lt = c.lipschitz_theta()) put("lipschitz_theta", *lt);
  if (c.G) put("G", *c.G);
  if (c.R0) put("R0", *c.R0);
  put("H", c.H);
  return os.str();
}

std::string frontier_csv(const Matrix& points) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < points.rows(); ++j) header.push_back("x" + std::to_string(j));
  std::vector<std::vector<double>> rows;
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    const Vector col = points.col(k);
    rows.emplace_back(col.data(), col.data() + col.size());
  }
  return csv_table(header, rows);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorCode::Io, "write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace wimop
