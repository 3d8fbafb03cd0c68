#pragma once

#include <stdexcept>
#include <string>

namespace sll {

/// Invalid parameters, malformed scenarios, or violated preconditions that a
/// caller could have checked. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A scenario whose optimal set equals the whole hypothesis set. Such
/// scenarios carry no information and are rejected outright.
class DegenerateScenarioError : public ConfigError {
public:
  explicit DegenerateScenarioError(const std::string& what) : ConfigError(what) {}
};

/// A numerical contract broken at runtime (non-stochastic weight matrix,
/// non-positive push-sum mass). The CLI maps this to exit code 3.
class ContractViolation : public std::runtime_error {
public:
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sll
