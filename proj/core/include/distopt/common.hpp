#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace distopt {

/// Decision vector of length D.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Malformed input: dimension mismatch, bad parameters, unreadable config.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One or more assumption / configuration checks failed. Carries every
/// violation, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Raised by the engine when a round cannot be completed (e.g. NaN gradient).
class EngineAbort : public std::runtime_error {
 public:
  EngineAbort(const std::string& what, int agent, long iteration)
      : std::runtime_error(what), agent_(agent), iteration_(iteration) {}
  int agent() const { return agent_; }
  long iteration() const { return iteration_; }

 private:
  int agent_;
  long iteration_;
};

inline bool all_finite(const Point& p) { return p.allFinite(); }

}  // namespace distopt
