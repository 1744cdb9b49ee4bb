/* Copyright 2026 The semocc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef SEMOCC_SRC_JSON_UTIL_H_
#define SEMOCC_SRC_JSON_UTIL_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "semocc/error.h"

namespace semocc::internal {

using nlohmann::json;

// Reads obj[key] as T; a missing key or type error names the key path.
template <typename T>
T Get(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(where + ": missing key '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T GetOr(const json& obj, const std::string& key, const std::string& where, T fallback) {
  return obj.contains(key) ? Get<T>(obj, key, where) : fallback;
}

template <int R, int C>
Eigen::Matrix<double, R, C> GetMatrix(const json& obj, const std::string& key,
                                      const std::string& where) {
  const auto rows = Get<std::vector<std::vector<double>>>(obj, key, where);
  if (rows.size() != R) {
    throw ValidationError(where + "." + key + ": expected " + std::to_string(R) + " rows");
  }
  Eigen::Matrix<double, R, C> m;
  for (int i = 0; i < R; ++i) {
    if (rows[i].size() != C) {
      throw ValidationError(where + "." + key + ": expected " + std::to_string(C) +
                            " columns");
    }
    for (int j = 0; j < C; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline Eigen::Vector3d GetVector3(const json& obj, const std::string& key,
                                  const std::string& where) {
  const auto v = Get<std::vector<double>>(obj, key, where);
  if (v.size() != 3) throw ValidationError(where + "." + key + ": expected 3 values");
  return {v[0], v[1], v[2]};
}

inline Eigen::Vector3d GetVector3Or(const json& obj, const std::string& key,
                                    const std::string& where, const Eigen::Vector3d& fallback) {
  return obj.contains(key) ? GetVector3(obj, key, where) : fallback;
}

template <typename M>
json MatrixJson(const M& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json VectorJson(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json ParseJson(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what + " is not valid JSON: " + e.what());
  }
}

}  // namespace semocc::internal

#endif  // SEMOCC_SRC_JSON_UTIL_H_
