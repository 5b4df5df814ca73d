#include "horocycle/config.hpp"

#include "horocycle/eigenform.hpp"
#include "horocycle/restriction.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace horocycle {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& s, const std::string& what) {
  size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument("bad integer for " + what + ": '" + s + "'");
  return v;
}

double to_double(const std::string& s, const std::string& what) {
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument("bad number for " + what + ": '" + s + "'");
  return v;
}

}  // namespace

void RunConfig::validate() const {
  for (int k : weights)
    if (k % 2 != 0) throw std::invalid_argument("weights: " + std::to_string(k) + " is odd");
  if (N < 0) throw std::invalid_argument("N must be >= 0");
  if (precision_bits != 0 && precision_bits < 64) throw std::invalid_argument("precision_bits must be >= 64");
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2)");
  if (grid_size < 1) throw std::invalid_argument("grid_size must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(y > 0.0)) throw std::invalid_argument("y must be positive");
  for (double x : shiu_x)
    if (!(x >= 3.0)) throw std::invalid_argument("shiu x values must be >= 3");
  for (double t : shiu_theta)
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("shiu theta values must lie in (0, 1]");
}

std::vector<int> parse_weights(const std::string& spec) {
  std::set<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t dash = item.find("..");
    size_t len = 2;
    if (dash == std::string::npos) {
      dash = item.find('-', 1);
      len = 1;
    }
    if (dash == std::string::npos) {
      out.insert(to_int(item, "weights"));
      continue;
    }
    const int lo = to_int(trim(item.substr(0, dash)), "weights");
    const int hi = to_int(trim(item.substr(dash + len)), "weights");
    if (lo > hi) throw std::invalid_argument("empty weight range '" + item + "'");
    for (int k = lo + (lo % 2 != 0); k <= hi; k += 2) out.insert(k);
  }
  return {out.begin(), out.end()};
}

std::vector<double> parse_doubles(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(item, "list"));
  }
  return out;
}

void apply_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  std::string line;
  int version = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config_version") version = to_int(value, key);
    else if (key == "weights") cfg.weights = parse_weights(value);
    else if (key == "N") cfg.N = to_int(value, key);
    else if (key == "precision_bits") cfg.precision_bits = to_int(value, key);
    else if (key == "delta") cfg.delta = to_double(value, key);
    else if (key == "grid_size") cfg.grid_size = to_int(value, key);
    else if (key == "epsilon") cfg.epsilon = to_double(value, key);
    else if (key == "cache_dir") cfg.cache_dir = value;
    else if (key == "output") {
      if (value == "csv") cfg.output = OutputFormat::csv;
      else if (value == "json") cfg.output = OutputFormat::json;
      else throw std::invalid_argument("output must be csv or json");
    } else if (key == "y") cfg.y = to_double(value, key);
    else if (key == "shiu_x") cfg.shiu_x = parse_doubles(value);
    else if (key == "shiu_theta") cfg.shiu_theta = parse_doubles(value);
    else throw std::invalid_argument(path.string() + ": unknown key '" + key + "'");
  }
  if (version != kConfigVersion)
    throw std::invalid_argument(path.string() + ": config_version must be " + std::to_string(kConfigVersion));
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv(kCacheEnvVar); env != nullptr && *env != '\0') return env;
  return "horocycle-cache";
}

int default_table_size(const RunConfig& cfg) {
  std::int64_t need = 20001;
  for (int k : cfg.weights) {
    if (k < 12 || cusp_dim(k) == 0) continue;
    need = std::max(need, sweep_table_requirement(k, cfg.delta, cfg.grid_size, cfg.epsilon));
    need = std::max(need, truncation_window(k, cfg.y, cfg.epsilon).n_max);
    need = std::max(need, truncation_window(k, 1.0, cfg.epsilon).n_max);
  }
  return static_cast<int>(need);
}

int precision_for(const RunConfig& cfg, int k) {
  return cfg.precision_bits > 0 ? cfg.precision_bits : default_precision_bits(k);
}

}  // namespace horocycle
