#pragma once

// JSON encoding of rationals and expansions: { "h": int, "coeffs": ["p/q", ...] }.
// The upper order is implied by the coefficient count; pivotality is derived.

#include <json.hpp>

#include <string>
#include <vector>

#include "smpx/error.hpp"
#include "smpx/laurent.hpp"
#include "smpx/rational.hpp"

namespace smpx {

using Json = nlohmann::ordered_json;

inline Json to_json(const Rational& value) { return to_string(value); }

inline Rational rational_from_json(const Json& node, const std::string& where) {
  if (node.is_string()) {
    try {
      return parse_rational(node.get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, where + ": " + e.what());
    }
  }
  if (node.is_number_integer()) return Rational(node.get<long>());
  throw Error(ErrorKind::ParseError, where + ": expected a rational string");
}

inline Json to_json(const Expansion& x) {
  Json coeffs = Json::array();
  for (const auto& c : x.coeffs()) coeffs.push_back(to_string(c));
  return Json{{"h", x.low()}, {"coeffs", std::move(coeffs)}};
}

inline Expansion expansion_from_json(const Json& node, const std::string& where) {
  if (!node.is_object()) throw Error(ErrorKind::ParseError, where + ": expected an object");
  if (!node.contains("h") || !node["h"].is_number_integer()) {
    throw Error(ErrorKind::ParseError, where + ".h: expected an integer");
  }
  if (!node.contains("coeffs") || !node["coeffs"].is_array() || node["coeffs"].empty()) {
    throw Error(ErrorKind::ParseError, where + ".coeffs: expected a nonempty array");
  }
  std::vector<Rational> coeffs;
  const auto& arr = node["coeffs"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    coeffs.push_back(rational_from_json(arr[i], where + ".coeffs[" + std::to_string(i) + "]"));
  }
  return Expansion(node["h"].get<int>(), std::move(coeffs));
}

}  // namespace smpx
