// Copyright 2026 The werner-witness Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON files for group-algebra elements (states, seeds, witnesses).
// Coefficients are written as exact "p/q" strings.

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "werner/group_algebra.hpp"
#include "werner/rational.hpp"

namespace werner {

using Json = nlohmann::ordered_json;

inline constexpr int kFileFormatVersion = 1;

/// An element file. Permutations compose right to left unless the document
/// sets "product_convention": "left-to-right", in which case the element is
/// mapped through antipode() on load.
struct ElementFile {
  std::string kind;  // "state", "seed", "witness", "element"
  ExactElement element;
  Json document;     // the full parsed document, for extra fields
};

namespace detail {
inline Rational json_rational(const Json& v, const std::string& what) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number()) return exact_rational(v.get<double>());
  throw std::invalid_argument(what + " must be a rational string or a number");
}
}  // namespace detail

inline Json element_to_json(const ExactElement& a, const std::string& kind,
                            const Json& metadata = Json::object()) {
  Json doc;
  doc["format"] = "werner-element";
  doc["version"] = kFileFormatVersion;
  doc["kind"] = kind;
  doc["n"] = a.n();
  doc["metadata"] = metadata;
  Json coeffs = Json::array();
  for (const auto& [sigma, c] : a.terms()) {
    Json e;
    e["perm"] = sigma.one_line();
    e["re"] = to_string(c.re);
    e["im"] = to_string(c.im);
    coeffs.push_back(e);
  }
  doc["coefficients"] = coeffs;
  return doc;
}

inline ExactElement element_from_json(const Json& doc) {
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw std::invalid_argument("element file: missing integer field 'n'");
  }
  const int n = doc["n"].get<int>();
  check_arity(n);
  if (!doc.contains("coefficients") || !doc["coefficients"].is_array()) {
    throw std::invalid_argument("element file: missing array 'coefficients'");
  }
  ExactElement a(n);
  std::set<Permutation> seen;
  for (const auto& e : doc["coefficients"]) {
    if (!e.contains("perm")) throw std::invalid_argument("element file: coefficient without 'perm'");
    std::vector<int> images = e["perm"].get<std::vector<int>>();
    if (static_cast<int>(images.size()) != n) {
      throw std::invalid_argument("element file: permutation length differs from n");
    }
    Permutation p = Permutation::from_images(std::span<const int>(images));
    if (!seen.insert(p).second) {
      throw std::invalid_argument("element file: duplicate permutation " + p.to_string());
    }
    Rational re = e.contains("re") ? detail::json_rational(e["re"], "re") : Rational(0);
    Rational im = e.contains("im") ? detail::json_rational(e["im"], "im") : Rational(0);
    a.add(p, QComplex(re, im));
  }
  return a;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(1) << "\n";
}

inline ElementFile read_element_file(const std::string& path) {
  Json doc = read_json_file(path);
  if (doc.value("format", std::string()) != "werner-element") {
    throw std::invalid_argument(path + ": not a werner-element file");
  }
  if (doc.value("version", 0) != kFileFormatVersion) {
    throw std::invalid_argument(path + ": unsupported format version");
  }
  ElementFile f;
  f.kind = doc.value("kind", std::string("element"));
  f.element = element_from_json(doc);
  const std::string convention = doc.value("product_convention", std::string("right-to-left"));
  if (convention == "left-to-right") {
    f.element = antipode(f.element);
  } else if (convention != "right-to-left") {
    throw std::invalid_argument(path + ": unknown product_convention '" + convention + "'");
  }
  f.document = std::move(doc);
  return f;
}

}  // namespace werner
