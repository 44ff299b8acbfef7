#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wimop/erm.hpp"
#include "wimop/loss.hpp"
#include "wimop/model.hpp"
#include "wimop/wro.hpp"

namespace wimop {

using nlohmann::json;

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);
json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

/// {p, n, q, objectives:[{Q, c}], A, b, eq_rows, theta_spec}. theta_spec is
/// written only when `spec` is given.
json instance_to_json(const MqpInstance& instance, const ThetaSpec* spec = nullptr);
MqpInstance instance_from_json(const json& j);
json theta_spec_to_json(const ThetaSpec& spec);
ThetaSpec theta_spec_from_json(const json& j);

/// {points, support_box: {lower, upper}, R}.
json observations_to_json(const ObservationSet& obs);
ObservationSet observations_from_json(const json& j);
/// Header y0..y{n-1}, one row per observation.
std::string observations_to_csv(const ObservationSet& obs);
/// Points only; the support box comes from the caller.
ObservationSet observations_from_csv(const std::string& text, const Vector& box_lower, const Vector& box_upper);

json erm_to_json(const ErmResult& r);
json wro_to_json(const WroResult& r);
json constants_to_json(const ConstantsBundle& c);

/// Fixed-point rendering with 12 decimals. Throws on NaN or Inf.
std::string format_cell(double v);

/// Comma-separated table with a header row. Every cell is finite.
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// iteration, max_cv, objective, cuts_added.
std::string convergence_csv(const std::vector<IterationRecord>& history);
/// name, value; absent optional constants are omitted.
std::string constants_csv(const ConstantsBundle& c);
/// One row per frontier point, header x0..x{n-1}.
std::string frontier_csv(const Matrix& points);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace wimop
