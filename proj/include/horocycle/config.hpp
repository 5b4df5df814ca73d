#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace horocycle {

enum class OutputFormat { csv, json };

inline constexpr int kConfigVersion = 1;
inline constexpr const char* kCacheEnvVar = "HOROCYCLE_CACHE";

struct RunConfig {
  std::vector<int> weights;
  int N = 0;               // 0: large enough for every suite (see default_table_size)
  int precision_bits = 0;  // 0: default_precision_bits(k)
  double delta = 0.1;
  int grid_size = 32;
  double epsilon = 1e-12;
  std::filesystem::path cache_dir;
  OutputFormat output = OutputFormat::csv;
  // cross
  double y = 1.0;
  // shiu
  std::vector<double> shiu_x{1e3, 1e4};
  std::vector<double> shiu_theta{0.5, 0.7, 1.0};

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// "12,16,20-40" or "12..40": ranges include both ends and step by 2.
std::vector<int> parse_weights(const std::string& spec);
std::vector<double> parse_doubles(const std::string& spec);

// Applies a flat "key = value" file (# comments) on top of cfg. The file must
// carry config_version = 1.
void apply_config_file(const std::filesystem::path& path, RunConfig& cfg);

// HOROCYCLE_CACHE if set, else ./horocycle-cache.
std::filesystem::path default_cache_dir();

// Table size used when RunConfig::N is 0: at least 20001 (covers the default
// short-interval grid) and every sweep window of the requested weights.
int default_table_size(const RunConfig& cfg);

int precision_for(const RunConfig& cfg, int k);

}  // namespace horocycle
