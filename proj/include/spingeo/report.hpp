#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace spingeo {

struct ResidualRecord {
  std::string id;
  std::string grid;
  double residual_rel = 0.0;
  double residual_abs = 0.0;
  double runtime_ms = 0.0;
};

inline nlohmann::json to_json(const ResidualRecord& r) {
  return {{"identity", r.id},
          {"grid", r.grid},
          {"residual_rel", r.residual_rel},
          {"residual_abs", r.residual_abs},
          {"runtime_ms", r.runtime_ms}};
}

struct CheckRecord {
  std::string id;
  double residual_rel = 0.0;
  double residual_abs = 0.0;
  double tol = 0.0;
  bool pass = false;
};

inline nlohmann::json to_json(const CheckRecord& c) {
  return {{"id", c.id},
          {"residual_rel", c.residual_rel},
          {"residual_abs", c.residual_abs},
          {"tol", c.tol},
          {"pass", c.pass}};
}

}  // namespace spingeo
