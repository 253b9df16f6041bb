#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "scenario.hpp"
#include "unitary_strategy.hpp"

namespace covertsense {

// File format, schema_version 1. Matrices are arrays of rows, each entry an
// [re, im] pair, row-major. "kind" selects the scenario type:
//   cq:      params, alphabet, innocent_symbol, bob[param][symbol],
//            willie[param][symbol]
//   unitary: params, unitaries[param], innocent_vector, willie_kraus (array)
// An optional "options" object travels with the file untouched.
struct ScenarioFile {
  int schema_version = 1;
  std::string kind;
  std::optional<CqScenario> cq;
  std::optional<UnitaryScenario> unitary;
  nlohmann::json options = nlohmann::json::object();
};

namespace detail {

inline const nlohmann::json& json_field(const nlohmann::json& j, const std::string& key,
                                        const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(ctx + ": missing key '" + key + "'");
  return *it;
}

inline complexd parse_centry(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(ctx + ": matrix entry must be an [re, im] number pair");
  return complexd(j[0].get<double>(), j[1].get<double>());
}

inline CMat parse_cmat(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ParseError(ctx + ": expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw ParseError(ctx + ": expected rows to be nonempty arrays");
  const std::size_t cols = j[0].size();
  CMat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError(ctx + ": row " + std::to_string(r) + " has inconsistent length");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = parse_centry(j[r][c], ctx + ", entry (" + std::to_string(r) + "," +
                                          std::to_string(c) + ")");
  }
  return m;
}

inline CVec parse_cvec(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ParseError(ctx + ": expected a nonempty array");
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(i) = parse_centry(j[i], ctx + ", entry " + std::to_string(i));
  return v;
}

inline std::vector<std::string> parse_names(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ParseError(ctx + ": expected a nonempty array of strings");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw ParseError(ctx + ": entries must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

inline nlohmann::json cmat_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back(nlohmann::json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json cvec_json(const CVec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i)
    out.push_back(nlohmann::json::array({v(i).real(), v(i).imag()}));
  return out;
}

} // namespace detail

inline ScenarioFile parse_scenario(const nlohmann::json& j) {
  ScenarioFile file;
  const auto& ver = detail::json_field(j, "schema_version", "scenario");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    throw ParseError("scenario: unsupported schema_version (expected 1)");
  file.schema_version = 1;

  const auto& kind = detail::json_field(j, "kind", "scenario");
  if (!kind.is_string()) throw ParseError("scenario: 'kind' must be a string");
  file.kind = kind.get<std::string>();

  if (j.contains("options")) {
    if (!j["options"].is_object()) throw ParseError("scenario: 'options' must be an object");
    file.options = j["options"];
  }

  if (file.kind == "cq") {
    CqScenario s;
    s.params = detail::parse_names(detail::json_field(j, "params", "scenario"), "params");
    s.alphabet = detail::parse_names(detail::json_field(j, "alphabet", "scenario"), "alphabet");
    const auto& inn = detail::json_field(j, "innocent_symbol", "scenario");
    if (!inn.is_string()) throw ParseError("scenario: 'innocent_symbol' must be a string");
    std::string inn_name = inn.get<std::string>();
    s.innocent = -1;
    for (std::size_t u = 0; u < s.alphabet.size(); ++u)
      if (s.alphabet[u] == inn_name) s.innocent = static_cast<int>(u);
    if (s.innocent < 0)
      throw ParseError("scenario: innocent_symbol '" + inn_name + "' not in the alphabet");

    auto parse_bank = [&](const char* key) {
      const auto& bank = detail::json_field(j, key, "scenario");
      std::vector<std::vector<DensityOperator>> out;
      for (const auto& p : s.params) {
        const auto& per_param = detail::json_field(bank, p, std::string(key) + " states");
        std::vector<DensityOperator> row;
        for (const auto& u : s.alphabet) {
          std::string ctx = std::string(key) + " state, param " + p + ", symbol " + u;
          CMat m = detail::parse_cmat(detail::json_field(per_param, u, ctx), ctx);
          try {
            row.emplace_back(std::move(m));
          } catch (const std::runtime_error& e) {
            throw ParseError(ctx + ": " + e.what());
          }
        }
        out.push_back(std::move(row));
      }
      return out;
    };
    s.bob = parse_bank("bob");
    s.willie = parse_bank("willie");
    try {
      s.check();
    } catch (const std::runtime_error& e) {
      throw ParseError(std::string("scenario: ") + e.what());
    }
    file.cq = std::move(s);
  } else if (file.kind == "unitary") {
    UnitaryScenario s;
    s.params = detail::parse_names(detail::json_field(j, "params", "scenario"), "params");
    const auto& bank = detail::json_field(j, "unitaries", "scenario");
    for (const auto& p : s.params) {
      std::string ctx = "unitary for param " + p;
      s.unitaries.push_back(detail::parse_cmat(detail::json_field(bank, p, ctx), ctx));
    }
    s.innocent = detail::parse_cvec(detail::json_field(j, "innocent_vector", "scenario"),
                                    "innocent_vector");
    const auto& kraus = detail::json_field(j, "willie_kraus", "scenario");
    if (!kraus.is_array() || kraus.empty())
      throw ParseError("scenario: 'willie_kraus' must be a nonempty array of matrices");
    for (std::size_t i = 0; i < kraus.size(); ++i)
      s.willie.ops.push_back(
          detail::parse_cmat(kraus[i], "willie_kraus[" + std::to_string(i) + "]"));
    try {
      s.check();
    } catch (const std::runtime_error& e) {
      throw ParseError(std::string("scenario: ") + e.what());
    }
    file.unitary = std::move(s);
  } else {
    throw ParseError("scenario: unknown kind '" + file.kind + "' (expected cq or unitary)");
  }
  return file;
}

inline ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scenario file " + path + ": " + e.what());
  }
  return parse_scenario(j);
}

inline nlohmann::json to_json(const CqScenario& s) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "cq";
  j["params"] = s.params;
  j["alphabet"] = s.alphabet;
  j["innocent_symbol"] = s.alphabet[s.innocent];
  nlohmann::json bob = nlohmann::json::object(), willie = nlohmann::json::object();
  for (int t = 0; t < s.n_params(); ++t) {
    nlohmann::json pb = nlohmann::json::object(), pw = nlohmann::json::object();
    for (int u = 0; u < s.n_symbols(); ++u) {
      pb[s.alphabet[u]] = detail::cmat_json(s.bob[t][u].mat());
      pw[s.alphabet[u]] = detail::cmat_json(s.willie[t][u].mat());
    }
    bob[s.params[t]] = std::move(pb);
    willie[s.params[t]] = std::move(pw);
  }
  j["bob"] = std::move(bob);
  j["willie"] = std::move(willie);
  return j;
}

inline nlohmann::json to_json(const UnitaryScenario& s) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "unitary";
  j["params"] = s.params;
  nlohmann::json bank = nlohmann::json::object();
  for (int t = 0; t < s.n_params(); ++t) bank[s.params[t]] = detail::cmat_json(s.unitaries[t]);
  j["unitaries"] = std::move(bank);
  j["innocent_vector"] = detail::cvec_json(s.innocent);
  nlohmann::json kraus = nlohmann::json::array();
  for (const auto& k : s.willie.ops) kraus.push_back(detail::cmat_json(k));
  j["willie_kraus"] = std::move(kraus);
  return j;
}

inline nlohmann::json to_json(const ScenarioFile& f) {
  nlohmann::json j;
  if (f.cq) j = to_json(*f.cq);
  else if (f.unitary) j = to_json(*f.unitary);
  else throw ParseError("scenario file holds no scenario");
  if (!f.options.empty()) j["options"] = f.options;
  return j;
}

inline void save_scenario(const ScenarioFile& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << to_json(f).dump(2) << "\n";
}

} // namespace covertsense
