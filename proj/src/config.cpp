#include "fabopt/config.hpp"

#include <set>
#include <stdexcept>

namespace fabopt {

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("config field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw std::invalid_argument("unknown config field '" + where + k + "'");
  }
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  reject_unknown(j,
                 {"schema_version", "problem", "pitch_nm", "brush", "beta", "normalize_brush", "symmetry", "adam",
                  "budget", "seed", "init_noise", "fixed_border", "tie_break", "stop_when_met", "output_dir"},
                 "");
  if (!j.contains("schema_version")) throw std::invalid_argument("config is missing 'schema_version'");
  const int version = field<int>(j, "schema_version", 0);
  if (version != kConfigSchemaVersion) {
    throw std::invalid_argument("unsupported config schema_version " + std::to_string(version));
  }
  RunConfig c;
  if (!j.contains("problem")) throw std::invalid_argument("config is missing 'problem'");
  const auto& p = j.at("problem");
  c.geometry = p.is_string() ? standard_geometry(p.get<std::string>()) : geometry_from_json(p);
  c.pitch_nm = field<double>(j, "pitch_nm", c.pitch_nm);
  if (!j.contains("brush")) throw std::invalid_argument("config is missing 'brush'");
  auto& t = c.optimize.transform;
  t.brush = parse_brush(field<std::string>(j, "brush", ""));
  t.beta = field<double>(j, "beta", t.beta);
  t.normalize_brush = field<bool>(j, "normalize_brush", t.normalize_brush);
  t.validate();
  if (j.contains("symmetry")) {
    c.geometry.symmetry.clear();
    for (const auto& s : j.at("symmetry")) c.geometry.symmetry.push_back(parse_symmetry(s.get<std::string>()));
  }
  t.symmetry = c.geometry.symmetry;
  if (j.contains("adam")) {
    const auto& a = j.at("adam");
    reject_unknown(a, {"learning_rate", "beta1", "beta2", "epsilon"}, "adam.");
    auto& s = c.optimize.adam;
    s.learning_rate = field<double>(a, "learning_rate", s.learning_rate);
    s.beta1 = field<double>(a, "beta1", s.beta1);
    s.beta2 = field<double>(a, "beta2", s.beta2);
    s.epsilon = field<double>(a, "epsilon", s.epsilon);
    if (!(s.learning_rate > 0) || !(s.beta1 >= 0 && s.beta1 < 1) || !(s.beta2 >= 0 && s.beta2 < 1) ||
        !(s.epsilon > 0)) {
      throw std::invalid_argument("Adam hyperparameters out of range");
    }
  }
  c.optimize.budget = field<int>(j, "budget", c.optimize.budget);
  if (c.optimize.budget < 0) throw std::invalid_argument("budget must be non-negative");
  c.optimize.seed = field<std::uint64_t>(j, "seed", c.optimize.seed);
  c.optimize.generator.seed = c.optimize.seed;
  c.optimize.init_noise = field<double>(j, "init_noise", c.optimize.init_noise);
  c.optimize.fixed_border = field<bool>(j, "fixed_border", c.optimize.fixed_border);
  const auto tie = field<std::string>(j, "tie_break", "lowest_index");
  if (tie == "lowest_index") {
    c.optimize.generator.tie_break = TieBreak::kLowestIndex;
  } else if (tie == "seeded") {
    c.optimize.generator.tie_break = TieBreak::kSeeded;
  } else {
    throw std::invalid_argument("unknown tie_break: " + tie);
  }
  c.optimize.stop_when_met = field<bool>(j, "stop_when_met", c.optimize.stop_when_met);
  c.output_dir = field<std::string>(j, "output_dir", c.output_dir);
  c.problem();  // validates pitch against the geometry
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  const auto& o = c.optimize;
  nlohmann::json sym = nlohmann::json::array();
  for (auto s : o.transform.symmetry) sym.push_back(symmetry_name(s));
  return {{"schema_version", kConfigSchemaVersion},
          {"problem", to_json(c.geometry)},
          {"pitch_nm", c.pitch_nm},
          {"brush", o.transform.brush.spec()},
          {"beta", o.transform.beta},
          {"normalize_brush", o.transform.normalize_brush},
          {"symmetry", sym},
          {"adam",
           {{"learning_rate", o.adam.learning_rate},
            {"beta1", o.adam.beta1},
            {"beta2", o.adam.beta2},
            {"epsilon", o.adam.epsilon}}},
          {"budget", o.budget},
          {"seed", o.seed},
          {"init_noise", o.init_noise},
          {"fixed_border", o.fixed_border},
          {"tie_break", o.generator.tie_break == TieBreak::kSeeded ? "seeded" : "lowest_index"},
          {"stop_when_met", o.stop_when_met},
          {"output_dir", c.output_dir}};
}

}  // namespace fabopt
