#include "distopt/engine.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace distopt {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

void write_vector(const Point& p, std::ostream& os) {
  os << '[';
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) os << ',';
    os << json_number(p[i]);
  }
  os << ']';
}

}  // namespace

void write_trace_jsonl(const RunTrace& trace, std::ostream& os) {
  for (const auto& r : trace.records) {
    os << "{\"k\":" << r.k << ",\"alpha\":" << json_number(r.alpha) << ",\"x\":[";
    for (Eigen::Index j = 0; j < r.states.cols(); ++j) {
      if (j) os << ',';
      write_vector(r.states.col(j), os);
    }
    os << "],\"x_bar\":";
    write_vector(r.mean, os);
    os << ",\"max_delta\":" << json_number(r.max_delta)
       << ",\"max_disagreement\":" << json_number(r.max_disagreement)
       << ",\"f_bar\":" << json_number(r.f_mean)
       << ",\"bound\":" << (r.bound ? json_number(*r.bound) : "null") << "}\n";
  }
}

void write_trace_csv(const RunTrace& trace, std::ostream& os) {
  os << "k,alpha,f_bar,max_disagreement,max_delta,bound";
  if (!trace.records.empty()) {
    const auto& s = trace.records.front().states;
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      for (Eigen::Index d = 0; d < s.rows(); ++d) os << ",x_" << j << '_' << d;
  }
  os << '\n';
  for (const auto& r : trace.records) {
    os << r.k << ',' << format_double(r.alpha) << ',' << format_double(r.f_mean) << ','
       << format_double(r.max_disagreement) << ',' << format_double(r.max_delta) << ','
       << (r.bound ? format_double(*r.bound) : "");
    for (Eigen::Index j = 0; j < r.states.cols(); ++j)
      for (Eigen::Index d = 0; d < r.states.rows(); ++d) os << ',' << format_double(r.states(d, j));
    os << '\n';
  }
}

void write_plot_data(const RunTrace& trace, double f_star, std::ostream& os) {
  os << "k,f_gap,max_disagreement,bound\n";
  for (const auto& r : trace.records)
    os << r.k << ',' << format_double(r.f_mean - f_star) << ',' << format_double(r.max_disagreement)
       << ',' << (r.bound ? format_double(*r.bound) : "") << '\n';
}

}  // namespace distopt
