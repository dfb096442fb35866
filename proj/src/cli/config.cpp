#include "nhse/cli/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include "nhse/errors.hpp"

namespace nhse::cli {

namespace {

using nlohmann::json;

const std::array<const char*, 8> kHoppingKeys = {"j",         "alpha",     "jl",        "jr",
                                                 "j_left_a",  "j_right_a", "j_left_b",  "j_right_b"};

const std::set<std::string> kKnownKeys = {
    "cells",     "particles",   "stats",       "jp",           "mu",        "u",
    "unn",       "j",           "alpha",       "jl",           "jr",        "j_left_a",
    "j_right_a", "j_left_b",    "j_right_b",   "out",          "workers",   "eps_im",
    "tol",       "gap_factor",  "min_gap",     "selector",     "index",     "axes",
    "observables", "lo",        "hi",          "resolution",   "scan_points",
    "fallback_points", "coefficients", "validate", "mu_min",   "mu_max"};

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::Config, message); }

double number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(std::string("'") + key + "' must be finite");
  return d;
}

std::size_t count(const json& j, const char* key, std::size_t minimum) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    fail(std::string("'") + key + "' must be an integer");
  }
  const auto i = v.get<long long>();
  if (i < static_cast<long long>(minimum)) {
    fail(std::string("'") + key + "' must be >= " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(i);
}

std::string text(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> text_list(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array()) fail(std::string("'") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) fail(std::string("'") + key + "' must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

void read_hopping(const json& j, ModelParams& p) {
  const bool polar = j.contains("j") || j.contains("alpha");
  const bool mirrored = j.contains("jl") || j.contains("jr");
  const bool explicit_form = j.contains("j_left_a") || j.contains("j_right_a") ||
                             j.contains("j_left_b") || j.contains("j_right_b");
  if (polar + mirrored + explicit_form > 1) {
    fail("give hopping as one of (j, alpha), (jl, jr) or the four amplitudes");
  }
  if (polar) {
    const double j0 = j.contains("j") ? number(j, "j") : std::sqrt(p.j_left_a * p.j_right_a);
    const double a0 =
        j.contains("alpha") ? number(j, "alpha") : 0.5 * std::log(p.j_left_a / p.j_right_a);
    p.set_j_alpha(j0, a0);
  } else if (mirrored) {
    p.set_mirrored_hopping(j.contains("jl") ? number(j, "jl") : p.j_left_a,
                           j.contains("jr") ? number(j, "jr") : p.j_right_a);
  } else if (explicit_form) {
    if (j.contains("j_left_a")) p.j_left_a = number(j, "j_left_a");
    if (j.contains("j_right_a")) p.j_right_a = number(j, "j_right_a");
    if (j.contains("j_left_b")) p.j_left_b = number(j, "j_left_b");
    if (j.contains("j_right_b")) p.j_right_b = number(j, "j_right_b");
  }
}

}  // namespace

RunConfig config_from_json(const json& input) {
  if (!input.is_object()) fail("config must be a JSON object");
  const json* source = &input;
  if (input.contains("config") && input.size() <= 2 &&
      (input.size() == 1 || input.contains("metadata"))) {
    source = &input.at("config");
    if (!source->is_object()) fail("'config' must be an object");
  }
  const json& j = *source;
  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.count(key)) fail("unknown config key '" + key + "'");
  }

  RunConfig c;
  ModelParams& p = c.params;
  try {
    if (j.contains("cells")) p.cells = count(j, "cells", 1);
    if (j.contains("particles")) p.particles = count(j, "particles", 1);
    if (j.contains("stats")) p.statistics = parse_statistics(text(j, "stats"));
    if (j.contains("jp")) p.j_p = number(j, "jp");
    if (j.contains("mu")) p.mu = number(j, "mu");
    if (j.contains("u")) p.u = number(j, "u");
    if (j.contains("unn")) p.u_nn = number(j, "unn");
    read_hopping(j, p);
    p.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(e.what());
  }

  if (j.contains("out")) c.out = text(j, "out");
  if (j.contains("workers")) c.workers = static_cast<int>(count(j, "workers", 0));
  if (j.contains("eps_im")) c.eps_im = number(j, "eps_im");
  if (j.contains("tol")) c.tol = number(j, "tol");
  if (j.contains("gap_factor")) c.gap_factor = number(j, "gap_factor");
  if (j.contains("min_gap")) c.min_gap = number(j, "min_gap");
  if (j.contains("selector")) c.selector = text(j, "selector");
  if (j.contains("index") && !j.at("index").is_null()) c.index = count(j, "index", 0);
  if (j.contains("axes")) c.axes = text_list(j, "axes");
  if (j.contains("observables")) c.observables = text_list(j, "observables");
  if (j.contains("lo")) c.lo = number(j, "lo");
  if (j.contains("hi")) c.hi = number(j, "hi");
  if (j.contains("resolution")) c.resolution = number(j, "resolution");
  if (j.contains("scan_points")) c.scan_points = count(j, "scan_points", 2);
  if (j.contains("fallback_points")) c.fallback_points = count(j, "fallback_points", 2);
  if (j.contains("coefficients")) c.coefficients = text(j, "coefficients");
  if (j.contains("validate")) {
    if (!j.at("validate").is_boolean()) fail("'validate' must be a boolean");
    c.validate = j.at("validate").get<bool>();
  }
  if (j.contains("mu_min")) c.mu_min = number(j, "mu_min");
  if (j.contains("mu_max")) c.mu_max = number(j, "mu_max");

  if (c.eps_im < 0.0) fail("'eps_im' must be >= 0");
  if (!(c.tol > 0.0)) fail("'tol' must be > 0");
  if (!(c.gap_factor > 0.0)) fail("'gap_factor' must be > 0");
  if (c.min_gap < 0.0) fail("'min_gap' must be >= 0");
  if (!(c.resolution > 0.0)) fail("'resolution' must be > 0");
  return c;
}

json config_to_json(const RunConfig& c) {
  const ModelParams& p = c.params;
  json j = {
      {"cells", p.cells},
      {"particles", p.particles},
      {"stats", to_string(p.statistics)},
      {"j_left_a", p.j_left_a},
      {"j_right_a", p.j_right_a},
      {"j_left_b", p.j_left_b},
      {"j_right_b", p.j_right_b},
      {"jp", p.j_p},
      {"mu", p.mu},
      {"u", p.u},
      {"unn", p.u_nn},
      {"out", c.out.string()},
      {"workers", c.workers},
      {"eps_im", c.eps_im},
      {"tol", c.tol},
      {"gap_factor", c.gap_factor},
      {"min_gap", c.min_gap},
      {"selector", c.selector},
      {"axes", c.axes},
      {"observables", c.observables},
      {"lo", c.lo},
      {"hi", c.hi},
      {"resolution", c.resolution},
      {"scan_points", c.scan_points},
      {"fallback_points", c.fallback_points},
      {"coefficients", c.coefficients},
      {"validate", c.validate},
      {"mu_min", c.mu_min},
      {"mu_max", c.mu_max},
  };
  j["index"] = c.index ? json(*c.index) : json(nullptr);
  return j;
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

json merge_config(json base, const json& overrides) {
  if (base.contains("config") && base["config"].is_object()) base = base["config"];
  // Hopping forms: (j, alpha), (jl, jr), four amplitudes.
  auto form_of = [](const std::string& key) {
    if (key == "j" || key == "alpha") return 0;
    if (key == "jl" || key == "jr") return 1;
    return 2;
  };
  int form = -1;
  for (const char* k : kHoppingKeys) {
    if (overrides.contains(k)) form = form_of(k);
  }
  if (form >= 0) {
    for (const char* k : kHoppingKeys) {
      if (form_of(k) != form) base.erase(k);
    }
  }
  for (const auto& [key, value] : overrides.items()) base[key] = value;
  return base;
}

}  // namespace nhse::cli
