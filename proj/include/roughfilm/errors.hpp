#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace roughfilm {

/// Raised when an iterative solve stops at its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }
  double final_residual() const noexcept { return history_.empty() ? 0.0 : history_.back(); }

private:
  std::vector<double> history_;
};

/// Configuration validation failure; carries one message per offending field path.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& s : items) out += "\n  " + s;
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace roughfilm
