#include "popdyn/config.hpp"

#include <algorithm>
#include <fstream>

namespace popdyn {

Rational rational_from_json(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float())
    throw ConfigError("non-integer numbers must be written as strings to stay exact");
  throw ConfigError("expected a number, got " + v.dump());
}

namespace {

UtilityLine line_from_json(const nlohmann::json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(what + " must be [slope, intercept]");
  return {rational_from_json(v[0]), rational_from_json(v[1])};
}

int count_from_json(const nlohmann::json& entry, const char* key) {
  if (!entry.contains(key)) return 0;
  const auto& v = entry.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return v.get<int>();
}

RawTypeSpec type_from_json(const nlohmann::json& entry, const std::string& label) {
  if (!entry.is_object()) throw ConfigError(label + " must be an object");
  static const char* known[] = {"temper", "payoff", "uC", "uD", "bestResponders", "imitators", "name"};
  for (const auto& [key, _] : entry.items())
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw ConfigError(label + ": unknown key '" + key + "'");
  RawTypeSpec t;
  if (entry.contains("temper")) t.temper = rational_from_json(entry.at("temper"));
  if (entry.contains("payoff")) {
    const auto& p = entry.at("payoff");
    PayoffMatrix m;
    if (p.is_array() && p.size() == 4) {
      m = {rational_from_json(p[0]), rational_from_json(p[1]), rational_from_json(p[2]), rational_from_json(p[3])};
    } else if (p.is_object()) {
      m = {rational_from_json(p.at("R")), rational_from_json(p.at("S")), rational_from_json(p.at("T")),
           rational_from_json(p.at("P"))};
    } else {
      throw ConfigError(label + ": payoff must be [R,S,T,P] or {R,S,T,P}");
    }
    t.payoff = m;
  }
  if (entry.contains("uC")) t.cooperator = line_from_json(entry.at("uC"), label + ".uC");
  if (entry.contains("uD")) t.defector = line_from_json(entry.at("uD"), label + ".uD");
  t.best_responders = count_from_json(entry, "bestResponders");
  t.imitators = count_from_json(entry, "imitators");
  return t;
}

}  // namespace

PopulationConfig parse_population_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("population config must be a JSON object");
  PopulationConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "anticoordinating" || key == "coordinating") {
      if (!value.is_array()) throw ConfigError(key + " must be an array");
      auto& list = key == "anticoordinating" ? cfg.raw.anticoordinating : cfg.raw.coordinating;
      for (std::size_t i = 0; i < value.size(); ++i)
        list.push_back(type_from_json(value[i], key + "[" + std::to_string(i) + "]"));
    } else if (key == "activation") {
      ActivationWeights w{rational_from_json(value.at("anticoordinatingImitators")),
                          rational_from_json(value.at("nonconformists")),
                          rational_from_json(value.at("coordinatingImitators")),
                          rational_from_json(value.at("conformists"))};
      cfg.activation = w;
    } else if (key == "description" || key == "notes") {
      continue;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  return cfg;
}

PopulationConfig load_population_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return parse_population_config(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace popdyn
