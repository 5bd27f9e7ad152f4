#include "latgreen/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "latgreen/errors.hpp"

namespace latgreen {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) fail(std::string(where) + ": unknown key '" + key + "'");
  }
}

int get_int(const json& obj, const char* key, int lo, int hi) {
  if (!obj.contains(key)) fail(std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
  const auto n = v.get<std::int64_t>();
  if (n < lo || n > hi)
    fail(std::string("'") + key + "' out of range [" + std::to_string(lo) + ", " +
         std::to_string(hi) + "]");
  return static_cast<int>(n);
}

double get_real(const json& obj, const char* key) {
  if (!obj.contains(key)) fail(std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

Offset parse_offset_key(const std::string& key, int d) {
  Offset ell(d);
  std::istringstream in(key);
  for (int i = 0; i < d; ++i) {
    int c;
    char sep = ',';
    if (!(in >> c)) fail("wpp key '" + key + "' needs " + std::to_string(d) + " integers");
    ell(i) = c;
    if (i + 1 < d && (!(in >> sep) || sep != ','))
      fail("wpp key '" + key + "' must be comma separated");
  }
  std::string rest;
  if (in >> rest) fail("wpp key '" + key + "' has trailing input");
  return ell;
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> parse_point(const json& arr,
                                                           const char* name, int d) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != d)
    fail(std::string("'") + name + "' must be an array of " + std::to_string(d) +
         " integer numerators");
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> k(d);
  for (int i = 0; i < d; ++i) {
    const json& v = arr.at(static_cast<std::size_t>(i));
    if (v.is_number_integer()) {
      k(i) = v.get<std::int64_t>();
    } else if (v.is_number_float()) {
      const double f = v.get<double>();
      if (f != std::floor(f))
        fail(std::string("'") + name + "' coordinate " + std::to_string(i) +
             " is not an integer numerator (point not on the 2^-N grid)");
      k(i) = static_cast<std::int64_t>(f);
    } else {
      fail(std::string("'") + name + "' coordinates must be numbers");
    }
    if (std::abs(k(i)) > (std::int64_t{1} << 40))
      fail(std::string("'") + name + "' numerator out of range");
  }
  return k;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "top level",
             {"model", "points", "sweep", "evaluate", "oracle", "oracle_column",
              "tolerances", "seed"});

  RunConfig cfg;
  cfg.hash = fnv1a64(text);

  if (!root.contains("model") || !root.at("model").is_object())
    fail("missing 'model' object");
  const json& jm = root.at("model");
  check_keys(jm, "model", {"d", "R", "J", "dpp", "wpp"});
  const int d = get_int(jm, "d", 2, 4);
  const int R = get_int(jm, "R", 1, 4);
  const double J = get_real(jm, "J");
  if (!jm.contains("dpp") || !jm.at("dpp").is_string()) fail("'model.dpp' must be a string");
  const std::string dpp = jm.at("dpp").get<std::string>();
  if (!jm.contains("wpp") || !jm.at("wpp").is_object())
    fail("'model.wpp' must be an object keyed by offset or 'all'");
  const json& jw = jm.at("wpp");
  if (jw.contains("all")) {
    if (jw.size() != 1) fail("'model.wpp.all' excludes per-offset keys");
    if (!jw.at("all").is_string()) fail("'model.wpp.all' must be a string");
    cfg.model = make_uniform_model(d, R, J, dpp, jw.at("all").get<std::string>());
  } else {
    std::vector<std::pair<Offset, std::string>> keyed;
    for (const auto& [key, value] : jw.items()) {
      if (!value.is_string()) fail("'model.wpp' values must be strings");
      keyed.emplace_back(parse_offset_key(key, d), value.get<std::string>());
    }
    cfg.model = make_model(d, R, J, dpp, keyed);
  }

  if (!root.contains("points") || !root.at("points").is_object())
    fail("missing 'points' object");
  const json& jp = root.at("points");
  check_keys(jp, "points", {"N", "x", "y"});
  cfg.N = get_int(jp, "N", 0, 30);
  if (!jp.contains("x") || !jp.contains("y")) fail("'points' needs 'x' and 'y'");
  cfg.x_num = parse_point(jp.at("x"), "points.x", d);
  cfg.y_num = parse_point(jp.at("y"), "points.y", d);
  const double hN = std::ldexp(1.0, -cfg.N);
  cfg.x = hN * cfg.x_num.cast<double>();
  cfg.y = hN * cfg.y_num.cast<double>();

  if (root.contains("sweep")) {
    const json& js = root.at("sweep");
    if (!js.is_object()) fail("'sweep' must be an object");
    check_keys(js, "sweep", {"n_min", "n_max"});
    cfg.sweep_n_min = get_int(js, "n_min", 0, 30);
    cfg.sweep_n_max = get_int(js, "n_max", 0, 30);
  }
  if (cfg.sweep_n_min > cfg.sweep_n_max) fail("'sweep.n_min' must not exceed 'sweep.n_max'");
  if (cfg.sweep_n_min < cfg.N)
    fail("'sweep.n_min' below 'points.N': points are not on the coarsest sweep grid");

  cfg.eval_n = cfg.sweep_n_max;
  if (root.contains("evaluate")) {
    const json& je = root.at("evaluate");
    if (!je.is_object()) fail("'evaluate' must be an object");
    check_keys(je, "evaluate", {"n"});
    cfg.eval_n = get_int(je, "n", 0, 30);
    if (cfg.eval_n < cfg.N) fail("'evaluate.n' below 'points.N'");
  }

  if (root.contains("oracle")) {
    if (!root.at("oracle").is_string()) fail("'oracle' must be a string");
    const std::string o = root.at("oracle").get<std::string>();
    if (o == "auto") {
      cfg.oracle = OracleKind::Auto;
    } else if (o == "spectral") {
      cfg.oracle = OracleKind::Spectral;
    } else if (o == "lattice") {
      cfg.oracle = OracleKind::Lattice;
    } else {
      fail("'oracle' must be one of auto|spectral|lattice");
    }
  }
  if (root.contains("oracle_column")) {
    if (!root.at("oracle_column").is_boolean()) fail("'oracle_column' must be a boolean");
    cfg.oracle_column = root.at("oracle_column").get<bool>();
  }

  if (root.contains("tolerances")) {
    const json& jt = root.at("tolerances");
    if (!jt.is_object()) fail("'tolerances' must be an object");
    check_keys(jt, "tolerances", {"rate_lo", "rate_hi", "oracle_target"});
    if (jt.contains("rate_lo")) cfg.rate_lo = get_real(jt, "rate_lo");
    if (jt.contains("rate_hi")) cfg.rate_hi = get_real(jt, "rate_hi");
    if (jt.contains("oracle_target")) cfg.oracle_target = get_real(jt, "oracle_target");
  }
  if (!(cfg.rate_lo > 0.0) || !(cfg.rate_hi > 0.0) || !(cfg.oracle_target > 0.0))
    fail("all tolerances must be positive");
  if (!(cfg.rate_lo < cfg.rate_hi)) fail("'rate_lo' must be below 'rate_hi'");
  if (!(cfg.oracle_target < 1.0)) fail("'oracle_target' must be below 1");

  if (root.contains("seed")) {
    const json& js = root.at("seed");
    if (!js.is_number_unsigned() && !js.is_number_integer()) fail("'seed' must be an integer");
    const auto s = js.get<std::int64_t>();
    if (s < 0) fail("'seed' must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace latgreen
