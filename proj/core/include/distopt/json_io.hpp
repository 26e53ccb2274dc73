#pragma once

// JSON (de)serialization for problems, schedules and transformed problems.
// Field names are part of the file format; see README for the schema.

#include "distopt/network.hpp"
#include "distopt/privacy.hpp"
#include "distopt/problem.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace distopt {

using Json = nlohmann::json;

/// Serializes with every floating-point number written as %.17g.
std::string dump_json(const Json& j, int indent = 2);
Json read_json_file(const std::string& path);

Json point_to_json(const Point& p);
Point point_from_json(const Json& j, const std::string& field);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& field);

Json set_to_json(const FeasibleSet& s);
FeasibleSet set_from_json(const Json& j, const std::string& field = "set");

Json component_to_json(const ComponentFunction& c);
ComponentFunction component_from_json(const Json& j, const std::string& field);

/// {dimension, set, components}
Json problem_to_json(const Problem& p);
Problem problem_from_json(const Json& j, const std::string& field = "problem");

Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j, const std::string& field = "graph");

/// {variant: static|cyclic|kappa|random, ...}; matrices row-major.
Json schedule_to_json(const WeightSchedule& s);
WeightSchedule schedule_from_json(const Json& j, const std::string& field = "schedule");

/// Standard problem document plus a "provenance" block.
Json transformed_to_json(const TransformedProblem& t);

/// Accessor that names the full field path in its error message.
const Json& require_field(const Json& j, const std::string& key, const std::string& path);
double number_field(const Json& j, const std::string& key, const std::string& path);

}  // namespace distopt
