#include "distopt/json_io.hpp"

#include "distopt/engine.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace distopt {

namespace {

void write_json(const Json& j, std::string& out, int indent, int level) {
  const auto newline = [&](int lvl) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write_json(it.value(), out, indent, level + 1);
      }
      newline(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += scalars && indent >= 0 ? ", " : ",";
        first = false;
        if (!scalars) newline(level + 1);
        write_json(e, out, indent, level + 1);
      }
      if (!scalars) newline(level);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write_json(j, out, indent, 0);
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "': JSON parse error: " + e.what());
  }
}

const Json& require_field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError("field '" + path + "' must be an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing field '" + join(path, key) + "'");
  return *it;
}

double number_field(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require_field(j, key, path);
  if (!v.is_number()) throw ConfigError("field '" + join(path, key) + "' must be a number");
  return v.get<double>();
}

Json point_to_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

Point point_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("field '" + field + "' must be an array of numbers");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("field '" + at_index(field, i) + "' must be a number");
    p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return p;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(point_to_json(m.row(i).transpose()));
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError("field '" + field + "' must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Point row = point_from_json(j[i], at_index(field, i));
    if (static_cast<std::size_t>(row.size()) != cols)
      throw ConfigError("field '" + field + "': rows must have equal length");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json set_to_json(const FeasibleSet& s) {
  if (const auto* b = std::get_if<Box>(&s.variant()))
    return {{"variant", "box"}, {"lo", point_to_json(b->lo)}, {"hi", point_to_json(b->hi)}};
  const auto& ball = std::get<Ball>(s.variant());
  return {{"variant", "ball"}, {"center", point_to_json(ball.center)}, {"radius", ball.radius}};
}

FeasibleSet set_from_json(const Json& j, const std::string& field) {
  const Json& v = require_field(j, "variant", field);
  if (!v.is_string()) throw ConfigError("field '" + field + ".variant' must be a string");
  const auto variant = v.get<std::string>();
  if (variant == "box")
    return FeasibleSet::box(point_from_json(require_field(j, "lo", field), field + ".lo"),
                            point_from_json(require_field(j, "hi", field), field + ".hi"));
  if (variant == "ball")
    return FeasibleSet::ball(point_from_json(require_field(j, "center", field), field + ".center"),
                             number_field(j, "radius", field));
  throw ConfigError("field '" + field + ".variant': unknown set variant '" + variant + "'");
}

Json component_to_json(const ComponentFunction& c) {
  Json params;
  if (const auto* q = std::get_if<QuadraticForm>(&c.params())) {
    params = {{"A", matrix_to_json(q->a)}, {"b", point_to_json(q->b)}, {"c", q->c}};
  } else if (const auto* p = std::get_if<SeparablePolynomial>(&c.params())) {
    params = {{"coefficients", p->coeffs}};
  } else {
    const auto& s = std::get<SinePerturbedQuadratic>(c.params());
    params = {{"A", matrix_to_json(s.quad.a)},
              {"b", point_to_json(s.quad.b)},
              {"c", s.quad.c},
              {"amplitude", point_to_json(s.amplitude)},
              {"frequency", point_to_json(s.frequency)}};
  }
  return {{"id", c.id()},
          {"family", family_name(c.family())},
          {"params", params},
          {"grad_bound", c.grad_bound()},
          {"lipschitz", c.lipschitz()}};
}

ComponentFunction component_from_json(const Json& j, const std::string& field) {
  const Json& id = require_field(j, "id", field);
  if (!id.is_string()) throw ConfigError("field '" + field + ".id' must be a string");
  const Json& fam = require_field(j, "family", field);
  if (!fam.is_string()) throw ConfigError("field '" + field + ".family' must be a string");
  const Family family = parse_family(fam.get<std::string>());
  const std::string pp = field + ".params";
  const Json& params = require_field(j, "params", field);
  const double l = number_field(j, "grad_bound", field);
  const double n = number_field(j, "lipschitz", field);
  const auto quad = [&] {
    return QuadraticForm{matrix_from_json(require_field(params, "A", pp), pp + ".A"),
                         point_from_json(require_field(params, "b", pp), pp + ".b"),
                         params.contains("c") ? number_field(params, "c", pp) : 0.0};
  };
  switch (family) {
    case Family::kQuadratic:
      return {id.get<std::string>(), quad(), l, n};
    case Family::kPolynomialSeparable: {
      const Json& co = require_field(params, "coefficients", pp);
      if (!co.is_array()) throw ConfigError("field '" + pp + ".coefficients' must be an array");
      std::vector<std::vector<double>> coeffs;
      for (std::size_t d = 0; d < co.size(); ++d) {
        const Point row = point_from_json(co[d], at_index(pp + ".coefficients", d));
        coeffs.emplace_back(row.data(), row.data() + row.size());
      }
      return {id.get<std::string>(), SeparablePolynomial{std::move(coeffs)}, l, n};
    }
    case Family::kSinePerturbedQuadratic:
      return {id.get<std::string>(),
              SinePerturbedQuadratic{
                  quad(), point_from_json(require_field(params, "amplitude", pp), pp + ".amplitude"),
                  point_from_json(require_field(params, "frequency", pp), pp + ".frequency")},
              l, n};
  }
  throw ConfigError("field '" + field + ".family': unsupported");
}

Json problem_to_json(const Problem& p) {
  Json comps = Json::array();
  for (const auto& c : p.components) comps.push_back(component_to_json(c));
  return {{"dimension", p.dimension}, {"set", set_to_json(p.set)}, {"components", comps}};
}

Problem problem_from_json(const Json& j, const std::string& field) {
  const Json& dim = require_field(j, "dimension", field);
  if (!dim.is_number_integer() || dim.get<int>() < 1)
    throw ConfigError("field '" + field + ".dimension' must be a positive integer");
  const Json& comps = require_field(j, "components", field);
  if (!comps.is_array()) throw ConfigError("field '" + field + ".components' must be an array");
  std::vector<ComponentFunction> cs;
  for (std::size_t i = 0; i < comps.size(); ++i)
    cs.push_back(component_from_json(comps[i], at_index(field + ".components", i)));
  Problem p{dim.get<int>(), std::move(cs), set_from_json(require_field(j, "set", field), field + ".set")};
  p.check_structure();
  return p;
}

Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  return {{"n_agents", g.n_agents()}, {"edges", edges}};
}

Graph graph_from_json(const Json& j, const std::string& field) {
  const Json& n = require_field(j, "n_agents", field);
  if (!n.is_number_integer()) throw ConfigError("field '" + field + ".n_agents' must be an integer");
  Graph g(n.get<int>());
  const Json& edges = require_field(j, "edges", field);
  if (!edges.is_array()) throw ConfigError("field '" + field + ".edges' must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Json& e = edges[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ConfigError("field '" + at_index(field + ".edges", i) + "' must be a pair of agent indices");
    g.add_edge(e[0].get<int>(), e[1].get<int>());
  }
  return g;
}

namespace {

double eta_of(const Json& j, const std::string& field) {
  return j.contains("eta") ? number_field(j, "eta", field) : WeightMatrix::kDefaultEta;
}

// A schedule matrix given either explicitly or as a graph (Metropolis).
WeightMatrix matrix_or_graph(const Json& j, const std::string& field, double eta) {
  if (j.is_array()) return WeightMatrix::from_entries(matrix_from_json(j, field), eta);
  return build_metropolis(graph_from_json(j, field), eta);
}

}  // namespace

Json schedule_to_json(const WeightSchedule& s) {
  if (const auto* st = std::get_if<StaticSchedule>(&s.variant()))
    return {{"variant", "static"}, {"matrix", matrix_to_json(st->matrix.entries())},
            {"eta", st->matrix.eta()}};
  if (const auto* cy = std::get_if<CyclicSchedule>(&s.variant())) {
    Json ms = Json::array();
    for (const auto& m : cy->matrices) ms.push_back(matrix_to_json(m.entries()));
    return {{"variant", "cyclic"}, {"matrices", ms}, {"eta", cy->matrices.front().eta()}};
  }
  const auto& r = std::get<RandomSchedule>(s.variant());
  return {{"variant", "random"},
          {"n_agents", r.n_agents},
          {"seed", r.seed},
          {"edge_probability", r.edge_probability},
          {"eta", r.eta}};
}

WeightSchedule schedule_from_json(const Json& j, const std::string& field) {
  const Json& v = require_field(j, "variant", field);
  if (!v.is_string()) throw ConfigError("field '" + field + ".variant' must be a string");
  const auto variant = v.get<std::string>();
  const double eta = eta_of(j, field);
  if (variant == "static") {
    if (j.contains("matrix"))
      return WeightSchedule::fixed(matrix_or_graph(j["matrix"], field + ".matrix", eta));
    return WeightSchedule::fixed(matrix_or_graph(require_field(j, "graph", field), field + ".graph", eta));
  }
  if (variant == "cyclic") {
    const bool by_matrix = j.contains("matrices");
    const Json& list = by_matrix ? j["matrices"] : require_field(j, "graphs", field);
    const std::string key = field + (by_matrix ? ".matrices" : ".graphs");
    if (!list.is_array() || list.empty()) throw ConfigError("field '" + key + "' must be a non-empty array");
    std::vector<WeightMatrix> ms;
    for (std::size_t i = 0; i < list.size(); ++i) ms.push_back(matrix_or_graph(list[i], at_index(key, i), eta));
    return WeightSchedule::cyclic(std::move(ms));
  }
  if (variant == "kappa") {
    const Json& pat = require_field(j, "pattern", field);
    if (!pat.is_array()) throw ConfigError("field '" + field + ".pattern' must be an array of pairs");
    KappaPattern pattern;
    for (std::size_t i = 0; i < pat.size(); ++i) {
      const Json& row = pat[i];
      if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() || !row[1].is_number_integer())
        throw ConfigError("field '" + at_index(field + ".pattern", i) +
                          "' must list exactly two agent indices");
      pattern.out_links.push_back({row[0].get<int>(), row[1].get<int>()});
    }
    return WeightSchedule::fixed(build_kappa_matrix(pattern, number_field(j, "kappa", field)));
  }
  if (variant == "random") {
    const Json& n = require_field(j, "n_agents", field);
    const Json& seed = require_field(j, "seed", field);
    if (!n.is_number_integer() || !seed.is_number_integer())
      throw ConfigError("field '" + field + "': n_agents and seed must be integers");
    return WeightSchedule::random(n.get<int>(), number_field(j, "edge_probability", field),
                                  seed.get<std::uint64_t>(), eta);
  }
  throw ConfigError("field '" + field + ".variant': unknown schedule variant '" + variant + "'");
}

Json transformed_to_json(const TransformedProblem& t) {
  Json j = problem_to_json(t.problem);
  j["provenance"] = {{"transform", t.transform},
                     {"owner", t.provenance},
                     {"graph", graph_to_json(t.graph)},
                     {"certificate",
                      {{"n_points", t.certificate.n_points},
                       {"value_residual", t.certificate.value_residual},
                       {"gradient_residual", t.certificate.gradient_residual},
                       {"pass", t.certificate.pass}}}};
  return j;
}

}  // namespace distopt
