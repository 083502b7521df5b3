#pragma once

#include <map>
#include <string>
#include <vector>

namespace ctrlk {

struct Check {
  std::string name;
  bool pass = false;
  std::string witness;
};

/// Outcome of a validator: named checks plus numeric measurements.
struct Report {
  std::vector<Check> checks;
  std::map<std::string, double> metrics;

  void add(std::string name, bool pass, std::string witness = {}) {
    checks.push_back({std::move(name), pass, std::move(witness)});
  }
  void merge(const Report& other, const std::string& prefix) {
    for (const auto& c : other.checks) checks.push_back({prefix + c.name, c.pass, c.witness});
    for (const auto& [k, v] : other.metrics) metrics[prefix + k] = v;
  }
  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const Check* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

}  // namespace ctrlk
