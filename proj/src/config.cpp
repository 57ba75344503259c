#include "botimpact/config.hpp"

#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "botimpact/error.hpp"
#include "botimpact/io.hpp"

#ifndef BOTIMPACT_DATA_DIR
#define BOTIMPACT_DATA_DIR "data"
#endif

namespace botimpact {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::json;

void require(bool ok, std::string_view field, std::string_view why) {
  if (!ok) throw ConfigError(fmt::format("config field '{}': {}", field, why));
}

double number(const Json& v, std::string_view field) {
  require(v.is_number(), field, "must be a number");
  const double x = v.get<double>();
  require(std::isfinite(x), field, "must be finite");
  return x;
}

std::size_t count(const Json& v, std::string_view field) {
  require(v.is_number_integer() && v.get<std::int64_t>() >= 0, field,
          "must be a non-negative integer");
  return static_cast<std::size_t>(v.get<std::int64_t>());
}

fs::path path_value(const Json& v, std::string_view field, const fs::path& base) {
  require(v.is_string(), field, "must be a path string");
  fs::path p = v.get<std::string>();
  if (p.empty()) return p;
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

void reject_unknown(const Json& obj, const std::set<std::string>& known, std::string_view prefix) {
  for (const auto& [key, value] : obj.items()) {
    const std::string name = prefix.empty() ? key : fmt::format("{}.{}", prefix, key);
    require(known.contains(key), name, "unknown field");
  }
}

void parse_solver(const Json& j, PipelineConfig& c) {
  require(j.is_object(), "solver", "must be an object");
  reject_unknown(j, {"method", "tolerance", "max_iterations", "dense_fallback"}, "solver");
  if (j.contains("method")) {
    require(j["method"].is_string(), "solver.method", "must be a string");
    const auto m = j["method"].get<std::string>();
    require(m == "linear" || m == "fixed_point", "solver.method",
            "expected \"linear\" or \"fixed_point\"");
    c.method = m == "linear" ? EquilibriumMethod::kLinearSolve : EquilibriumMethod::kFixedPoint;
  }
  if (j.contains("tolerance")) c.solver.tolerance = number(j["tolerance"], "solver.tolerance");
  if (j.contains("max_iterations")) {
    c.solver.max_iterations = count(j["max_iterations"], "solver.max_iterations");
  }
  if (j.contains("dense_fallback")) {
    c.solver.dense_fallback = count(j["dense_fallback"], "solver.dense_fallback");
  }
}

void parse_bot_detect(const Json& j, PipelineConfig& c) {
  require(j.is_object(), "bot_detect", "must be an object");
  auto& p = c.bot_detect;
  const std::map<std::string, double*> doubles = {
      {"prior_bot", &p.prior_bot}, {"psi_hh", &p.psi_hh},           {"psi_hb", &p.psi_hb},
      {"psi_bh", &p.psi_bh},       {"psi_bb", &p.psi_bb},           {"weight_cap", &p.weight_cap},
      {"damping", &p.damping},     {"tolerance", &p.tolerance}};
  for (const auto& [key, value] : j.items()) {
    const std::string name = "bot_detect." + key;
    if (auto it = doubles.find(key); it != doubles.end()) {
      *it->second = number(value, name);
    } else if (key == "max_iterations") {
      p.max_iterations = count(value, name);
    } else {
      require(false, name, "unknown field");
    }
  }
}

Tristate tristate(const Json& v, std::string_view field) {
  if (v.is_boolean()) return v.get<bool>() ? Tristate::kYes : Tristate::kNo;
  require(v.is_string() && v.get<std::string>() == "any", field,
          "must be true, false or \"any\"");
  return Tristate::kAny;
}

void parse_groups(const Json& j, PipelineConfig& c) {
  require(j.is_array() && !j.empty(), "ghic_groups", "must be a non-empty array");
  c.ghic_groups.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string field = fmt::format("ghic_groups[{}]", i);
    const Json& g = j[i];
    require(g.is_object(), field, "must be an object");
    reject_unknown(g, {"name", "partisanship", "qanon"}, field);
    GroupDefinition def;
    require(g.contains("name") && g["name"].is_string() && !g["name"].get<std::string>().empty(),
            field + ".name", "must be a non-empty string");
    def.name = g["name"].get<std::string>();
    if (g.contains("partisanship")) {
      const Json& p = g["partisanship"];
      require(p.is_string(), field + ".partisanship", "must be \"anti\", \"pro\" or \"any\"");
      const auto s = p.get<std::string>();
      if (s == "anti") {
        def.partisanship = Partisanship::kAnti;
      } else if (s == "pro") {
        def.partisanship = Partisanship::kPro;
      } else {
        require(s == "any", field + ".partisanship", "must be \"anti\", \"pro\" or \"any\"");
      }
    }
    if (g.contains("qanon")) def.qanon = tristate(g["qanon"], field + ".qanon");
    c.ghic_groups.push_back(std::move(def));
  }
}

std::string_view tristate_name(Tristate t) {
  switch (t) {
    case Tristate::kAny: return "any";
    case Tristate::kYes: return "true";
    case Tristate::kNo: return "false";
  }
  return "any";
}

}  // namespace

std::vector<GroupDefinition> PipelineConfig::default_groups() {
  return {{"anti", Partisanship::kAnti, Tristate::kAny},
          {"pro_non_qanon", Partisanship::kPro, Tristate::kNo},
          {"pro_qanon", Partisanship::kPro, Tristate::kYes}};
}

void PipelineConfig::validate() const {
  require(stubborn_low > 0.0 && stubborn_low < 0.5, "stubborn_low", "must lie in (0, 0.5)");
  require(stubborn_high > 0.5 && stubborn_high < 1.0, "stubborn_high", "must lie in (0.5, 1)");
  require(partisan_cutoff > 0.0 && partisan_cutoff < 1.0, "partisan_cutoff",
          "must lie in (0, 1)");
  require(bot_threshold > 0.5 && bot_threshold <= 1.0, "bot_threshold", "must lie in (0.5, 1]");
  require(followings_cap >= 1, "followings_cap", "must be at least 1");
  require(histogram_bins >= 2, "histogram_bins", "must be at least 2");
  require(leaderboard_k >= 1, "leaderboard_k", "must be at least 1");
  require(workers >= 1 && workers <= 256, "workers", "must lie in [1, 256]");
  require(solver.tolerance > 0.0 && solver.tolerance < 1e-2, "solver.tolerance",
          "must lie in (0, 1e-2)");
  require(solver.max_iterations >= 1, "solver.max_iterations", "must be at least 1");
  require(!ghic_groups.empty(), "ghic_groups", "must not be empty");
  std::set<std::string> names;
  for (const auto& g : ghic_groups) {
    require(names.insert(g.name).second, "ghic_groups", fmt::format("duplicate name '{}'", g.name));
  }
  bot_detect.validate();
  bot_detect.validate_ordering();
}

fs::path default_keyword_dir() { return fs::path(BOTIMPACT_DATA_DIR) / "keywords"; }

PipelineConfig default_config() {
  PipelineConfig c;
  const fs::path dir = default_keyword_dir();
  c.anti_keywords = dir / "anti_trump.txt";
  c.pro_keywords = dir / "pro_trump.txt";
  c.qanon_keywords = dir / "qanon.txt";
  return c;
}

PipelineConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  PipelineConfig c = default_config();
  const std::map<std::string, fs::path*> paths = {
      {"tweets", &c.tweets},
      {"profiles", &c.profiles},
      {"ratings", &c.ratings},
      {"anti_keywords", &c.anti_keywords},
      {"pro_keywords", &c.pro_keywords},
      {"qanon_keywords", &c.qanon_keywords},
      {"out_dir", &c.out_dir}};
  const std::map<std::string, double*> doubles = {{"stubborn_low", &c.stubborn_low},
                                                  {"stubborn_high", &c.stubborn_high},
                                                  {"partisan_cutoff", &c.partisan_cutoff},
                                                  {"bot_threshold", &c.bot_threshold}};
  const std::map<std::string, std::size_t*> counts = {{"followings_cap", &c.followings_cap},
                                                      {"histogram_bins", &c.histogram_bins},
                                                      {"leaderboard_k", &c.leaderboard_k},
                                                      {"workers", &c.workers}};

  for (const auto& [key, value] : j.items()) {
    if (auto p = paths.find(key); p != paths.end()) {
      *p->second = path_value(value, key, base_dir);
    } else if (auto d = doubles.find(key); d != doubles.end()) {
      *d->second = number(value, key);
    } else if (auto n = counts.find(key); n != counts.end()) {
      *n->second = count(value, key);
    } else if (key == "seed") {
      require(value.is_number_unsigned(), key, "must be a non-negative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "solver") {
      parse_solver(value, c);
    } else if (key == "bot_detect") {
      parse_bot_detect(value, c);
    } else if (key == "ghic_groups") {
      parse_groups(value, c);
    } else {
      require(false, key, "unknown field");
    }
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    LineReader reader(path);
    std::string line;
    while (reader.next(line)) text += line + '\n';
  } catch (const InputError& e) {
    throw ConfigError(fmt::format("cannot read config: {}", e.what()));
  }
  return parse_config(text, path.parent_path());
}

nlohmann::ordered_json config_snapshot(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["tweets"] = c.tweets.string();
  j["profiles"] = c.profiles.string();
  j["ratings"] = c.ratings.string();
  j["anti_keywords"] = c.anti_keywords.string();
  j["pro_keywords"] = c.pro_keywords.string();
  j["qanon_keywords"] = c.qanon_keywords.string();
  j["solver"] = {{"method", c.method == EquilibriumMethod::kLinearSolve ? "linear" : "fixed_point"},
                 {"tolerance", c.solver.tolerance},
                 {"max_iterations", c.solver.max_iterations},
                 {"dense_fallback", c.solver.dense_fallback}};
  const auto& p = c.bot_detect;
  j["bot_detect"] = {{"prior_bot", p.prior_bot},   {"psi_hh", p.psi_hh},
                     {"psi_hb", p.psi_hb},         {"psi_bh", p.psi_bh},
                     {"psi_bb", p.psi_bb},         {"weight_cap", p.weight_cap},
                     {"damping", p.damping},       {"max_iterations", p.max_iterations},
                     {"tolerance", p.tolerance}};
  j["stubborn_low"] = c.stubborn_low;
  j["stubborn_high"] = c.stubborn_high;
  j["partisan_cutoff"] = c.partisan_cutoff;
  j["bot_threshold"] = c.bot_threshold;
  j["followings_cap"] = c.followings_cap;
  j["histogram_bins"] = c.histogram_bins;
  j["leaderboard_k"] = c.leaderboard_k;
  auto groups = nlohmann::ordered_json::array();
  for (const auto& g : c.ghic_groups) {
    groups.push_back({{"name", g.name},
                      {"partisanship", g.partisanship ? std::string(to_string(*g.partisanship))
                                                      : std::string("any")},
                      {"qanon", tristate_name(g.qanon)}});
  }
  j["ghic_groups"] = groups;
  j["seed"] = c.seed;
  return j;
}

}  // namespace botimpact
