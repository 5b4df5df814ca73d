// Command-line front end: build eigenvalue caches and run the report suites.
#include "horocycle/commands.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace horocycle;

int main(int argc, char** argv) {
  CLI::App app{"Hecke eigenforms, symmetric-square L-values and horocycle restriction norms"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string weights, output = "csv", config_file, cache_dir, out_file, shiu_x, shiu_theta;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--weights", weights, "even weights, e.g. 12,24 or 12..60 or 12-60");
    sub->add_option("--N", cfg.N, "table size (0 = automatic)");
    sub->add_option("--precision-bits", cfg.precision_bits, "stored precision (0 = 128 for k <= 100, 256 above)");
    sub->add_option("--delta", cfg.delta, "sweep exponent: y ranges over [1/k, k^(1/2 - delta)]");
    sub->add_option("--grid-size", cfg.grid_size, "sweep grid points");
    sub->add_option("--epsilon", cfg.epsilon, "truncation tail budget");
    sub->add_option("--cache-dir", cache_dir, std::string("cache directory (default $") + kCacheEnvVar + ")");
    sub->add_option("--output", output, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", config_file, "flat key = value config file (config_version = 1)");
    sub->add_option("--out", out_file, "write the report here instead of stdout");
  };

  CLI::App* build = app.add_subcommand("build", "compute and cache eigenvalue tables");
  CLI::App* sweep = app.add_subcommand("sweep", "restricted-norm sweeps over y");
  CLI::App* lvalue = app.add_subcommand("lvalue", "L(1, sym^2 f) by three methods");
  CLI::App* shiu = app.add_subcommand("shiu", "short-interval sums against the Shiu bound");
  CLI::App* cross = app.add_subcommand("cross", "cross inner products between eigenforms");
  CLI::App* report = app.add_subcommand("report", "summary of all suites");
  for (CLI::App* sub : {build, sweep, lvalue, shiu, cross, report}) common(sub);
  cross->add_option("--y", cfg.y, "height of the horocycle");
  for (CLI::App* sub : {shiu, report}) {
    sub->add_option("--x", shiu_x, "comma-separated x values");
    sub->add_option("--theta", shiu_theta, "comma-separated exponents, z = x^theta");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    // Precedence: defaults < environment < config file < flags.
    RunConfig flags = cfg;
    cfg.cache_dir = default_cache_dir();
    if (!config_file.empty()) apply_config_file(config_file, cfg);
    CLI::App* sub = app.get_subcommands().front();
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--N")) cfg.N = flags.N;
    if (given("--precision-bits")) cfg.precision_bits = flags.precision_bits;
    if (given("--delta")) cfg.delta = flags.delta;
    if (given("--grid-size")) cfg.grid_size = flags.grid_size;
    if (given("--epsilon")) cfg.epsilon = flags.epsilon;
    if (sub == cross && given("--y")) cfg.y = flags.y;
    if (given("--weights")) cfg.weights = parse_weights(weights);
    if (given("--cache-dir")) cfg.cache_dir = cache_dir;
    if (given("--output")) cfg.output = output == "json" ? OutputFormat::json : OutputFormat::csv;
    if ((sub == shiu || sub == report) && given("--x")) cfg.shiu_x = parse_doubles(shiu_x);
    if ((sub == shiu || sub == report) && given("--theta")) cfg.shiu_theta = parse_doubles(shiu_theta);
    cfg.validate();

    std::ofstream file;
    if (!out_file.empty()) {
      file.open(out_file, std::ios::binary | std::ios::trunc);
      if (!file) throw std::runtime_error("cannot write " + out_file);
    }
    std::ostream& out = out_file.empty() ? std::cout : file;

    if (sub == build) return cmd_build(cfg, out, std::cerr);
    if (sub == sweep) return cmd_sweep(cfg, out, std::cerr);
    if (sub == lvalue) return cmd_lvalue(cfg, out, std::cerr);
    if (sub == shiu) return cmd_shiu(cfg, out, std::cerr);
    if (sub == cross) return cmd_cross(cfg, out, std::cerr);
    return cmd_report(cfg, out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
