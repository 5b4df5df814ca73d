#include "horocycle/commands.hpp"

#include "horocycle/eigen_cache.hpp"
#include "horocycle/restriction.hpp"
#include "horocycle/short_interval.hpp"
#include "horocycle/sym2.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace horocycle {

using nlohmann::ordered_json;

namespace {

std::filesystem::path cache_dir_of(const RunConfig& cfg) {
  return cfg.cache_dir.empty() ? default_cache_dir() : cfg.cache_dir;
}

std::string build_hint(const RunConfig& cfg, int k, int need) {
  std::ostringstream s;
  s << "horocycle build --weights " << k << " --N " << need << " --cache-dir " << cache_dir_of(cfg).string();
  return s.str();
}

// Weights with a nonempty cusp space, ascending.
std::vector<int> active_weights(const RunConfig& cfg, std::ostream& log) {
  std::vector<int> out;
  for (int k : cfg.weights) {
    if (k < 12 || cusp_dim(k) == 0) {
      log << "k=" << k << ": dimension 0, skipped\n";
      continue;
    }
    out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ordered_json envelope(const char* command, const RunConfig& cfg) {
  return {{"format_version", kReportFormatVersion},
          {"command", command},
          {"weights", cfg.weights},
          {"delta", cfg.delta},
          {"grid_size", cfg.grid_size},
          {"epsilon", cfg.epsilon}};
}

void emit_json(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

// ---- per-suite evaluation shared by the individual commands and report ----

struct SweepSuite {
  std::vector<NormProfile> profiles;
  std::vector<ordered_json> y1;
  double global_sup = 0.0;
  double running_mean_min = HUGE_VAL, running_mean_max = -HUGE_VAL, final_mean = 0.0;
  bool ok(const SuiteLimits& lim) const {
    // The asserted quantity is the mean over all available weights; the
    // prefix extremes are reported alongside.
    const bool mean_ok = y1.empty() || (final_mean >= lim.mean_low && final_mean <= lim.mean_high);
    return global_sup <= lim.sup_bound && mean_ok;
  }
};

int sweep_need(const RunConfig& cfg, int k) {
  std::int64_t need = sweep_table_requirement(k, cfg.delta, cfg.grid_size, cfg.epsilon);
  need = std::max(need, truncation_window(k, 1.0, cfg.epsilon).n_max);
  return static_cast<int>(std::max<std::int64_t>(need, 1));
}

SweepSuite run_sweep(const RunConfig& cfg, const std::vector<int>& weights) {
  SweepSuite s;
  double mean_acc = 0.0;
  int mean_count = 0;
  for (int k : weights) {
    const auto forms = load_forms(cfg, k, sweep_need(cfg, k));
    double weight_sum = 0.0;
    for (const auto& f : forms) {
      const double lc2 = petersson_log_c2(k, l_sym2_at_1(f, LMethod::dirichlet_smoothed).value_dirichlet);
      NormProfile p = sweep(f, lc2, cfg.delta, cfg.grid_size, cfg.epsilon);
      const NormValue at1 = restricted_norm(f, lc2, 1.0, cfg.epsilon);
      s.global_sup = std::max(s.global_sup, p.sup_value);
      s.y1.push_back({{"k", k}, {"index", f.index()}, {"value", at1.value}, {"tail_bound", at1.tail_bound}});
      weight_sum += at1.value;
      s.profiles.push_back(std::move(p));
    }
    // Running mean over weights of the per-weight average.
    mean_acc += weight_sum / static_cast<double>(forms.size());
    ++mean_count;
    s.final_mean = mean_acc / mean_count;
    s.running_mean_min = std::min(s.running_mean_min, s.final_mean);
    s.running_mean_max = std::max(s.running_mean_max, s.final_mean);
  }
  return s;
}

struct LRow {
  LValueReport report;
  double lemma3 = 0.0;
  double lower_bound = 0.0;  // 1 / (10 log k)
};

struct LSuite {
  std::vector<LRow> rows;
  double max_spread = 1.0, max_abs_lemma3 = 0.0, min_margin = HUGE_VAL;
  int spread_failures = 0, lemma3_failures = 0, lower_failures = 0;
  bool ok() const { return spread_failures == 0 && lemma3_failures == 0 && lower_failures == 0; }
};

LSuite run_lvalue(const RunConfig& cfg, const std::vector<int>& weights, const SuiteLimits& lim) {
  LSuite s;
  for (int k : weights) {
    const int need = k;  // the proxy reads primes up to k
    for (const auto& f : load_forms(cfg, k, need)) {
      LRow row;
      row.report = l_sym2_report(f);
      row.lemma3 = lemma3_ratio(f, row.report.value_dirichlet);
      row.lower_bound = 1.0 / (10.0 * std::log(static_cast<double>(k)));
      s.max_spread = std::max(s.max_spread, row.report.spread);
      s.max_abs_lemma3 = std::max(s.max_abs_lemma3, std::fabs(row.lemma3));
      const double lo = std::min({row.report.value_dirichlet, row.report.value_euler, row.report.value_proxy});
      s.min_margin = std::min(s.min_margin, lo / row.lower_bound);
      s.spread_failures += row.report.spread > lim.spread_bound;
      s.lemma3_failures += std::fabs(row.lemma3) > lim.lemma3_bound;
      s.lower_failures += lo < row.lower_bound;
      s.rows.push_back(row);
    }
  }
  return s;
}

struct ShiuSuite {
  std::vector<IntervalReport> reports;
  double max_ratio = 0.0;
  int skipped = 0;
  int hypothesis_checks = 0;
};

ShiuSuite run_shiu(const RunConfig& cfg, const std::vector<int>& weights) {
  ShiuSuite s;
  double min_x = HUGE_VAL;
  for (double x : cfg.shiu_x) min_x = std::min(min_x, x);
  for (int k : weights) {
    const int need = std::isfinite(min_x) ? static_cast<int>(min_x) : 3;
    for (const auto& f : load_forms(cfg, k, need)) {
      const ShiuScan scan = shiu_ratio_scan(f, cfg.shiu_x, cfg.shiu_theta);
      s.max_ratio = std::max(s.max_ratio, scan.max_ratio);
      s.skipped += scan.skipped;
      s.reports.insert(s.reports.end(), scan.reports.begin(), scan.reports.end());
      if (!scan.reports.empty()) ++s.hypothesis_checks;
    }
  }
  return s;
}

struct CrossRow {
  int k, i, j;
  double cross, norm_f, norm_g, ratio;
};

struct CrossSuite {
  std::vector<CrossRow> rows;
  double max_ratio = 0.0;
  bool ok() const { return max_ratio < 1.0; }
};

CrossSuite run_cross(const RunConfig& cfg, const std::vector<int>& weights) {
  CrossSuite s;
  for (int k : weights) {
    if (cusp_dim(k) < 2) continue;
    const int need = static_cast<int>(std::max<std::int64_t>(truncation_window(k, cfg.y, cfg.epsilon).n_max, 1));
    const auto forms = load_forms(cfg, k, need);
    std::vector<double> lc2;
    std::vector<NormValue> norms;
    for (const auto& f : forms) {
      lc2.push_back(petersson_log_c2(k, l_sym2_at_1(f, LMethod::dirichlet_smoothed).value_dirichlet));
      norms.push_back(restricted_norm(f, lc2.back(), cfg.y, cfg.epsilon));
    }
    for (size_t i = 0; i < forms.size(); ++i)
      for (size_t j = i + 1; j < forms.size(); ++j) {
        const NormValue c = cross_inner_product(forms[i], lc2[i], forms[j], lc2[j], cfg.y, cfg.epsilon);
        const double ratio = std::fabs(c.value) / std::sqrt(norms[i].value * norms[j].value);
        s.max_ratio = std::max(s.max_ratio, ratio);
        s.rows.push_back({k, static_cast<int>(i), static_cast<int>(j), c.value, norms[i].value, norms[j].value, ratio});
      }
  }
  return s;
}

}  // namespace

std::vector<Eigenform> load_forms(const RunConfig& cfg, int k, int need) {
  const auto dir = cache_dir_of(cfg);
  std::vector<Eigenform> forms;
  const int d = cusp_dim(k);
  for (int i = 0; i < d; ++i) {
    const auto path = cache_file(dir, k, i);
    if (!std::filesystem::exists(path))
      throw MissingCache("no eigenvalue table for k=" + std::to_string(k) + " index " + std::to_string(i) +
                         " in " + dir.string() + "; run: " + build_hint(cfg, k, std::max(need, 20001)));
    Eigenform f = read_cache(path);
    if (f.table_size() < need)
      throw MissingCache("eigenvalue table for k=" + std::to_string(k) + " index " + std::to_string(i) +
                         " has N=" + std::to_string(f.table_size()) + ", need N >= " + std::to_string(need) +
                         "; run: " + build_hint(cfg, k, need));
    forms.push_back(std::move(f));
  }
  return forms;
}

int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.validate();
  const auto dir = cache_dir_of(cfg);
  const int N = cfg.N > 0 ? cfg.N : default_table_size(cfg);
  const auto weights = active_weights(cfg, log);

  std::vector<int> todo;
  for (int k : weights) {
    bool all = true;
    for (int i = 0; i < cusp_dim(k) && all; ++i)
      all = cache_valid(cache_file(dir, k, i), N, precision_for(cfg, k));
    if (!all) todo.push_back(k);
    else log << "k=" << k << ": cached\n";
  }

  EigenformOptions options;
  options.precision_bits = cfg.precision_bits;
  int failures = 0;
  for (int k : todo) {
    // One weight at a time so a failure names its weight and spares the rest.
    try {
      for_each_weight({k}, N, options, [&](int kk, std::vector<Eigenform> forms) {
        for (const auto& f : forms) write_cache(cache_file(dir, kk, f.index()), f);
        log << "k=" << kk << ": built " << forms.size() << " form(s), N=" << N << "\n";
      });
    } catch (const EigenformError& e) {
      log << "k=" << k << ": FAILED: " << e.what() << "\n";
      ++failures;
    }
  }

  // Report the state of every requested table.
  ordered_json entries = ordered_json::array();
  if (cfg.output == OutputFormat::csv) out << "k,index,N,precision_bits,file\n";
  for (int k : weights)
    for (int i = 0; i < cusp_dim(k); ++i) {
      const auto path = cache_file(dir, k, i);
      const auto h = peek_cache(path);
      if (!h) continue;
      if (cfg.output == OutputFormat::csv)
        out << k << ',' << i << ',' << h->N << ',' << h->precision_bits << ',' << path.filename().string() << '\n';
      else
        entries.push_back({{"k", k}, {"index", i}, {"N", h->N}, {"precision_bits", h->precision_bits},
                           {"file", path.filename().string()}});
    }
  if (cfg.output == OutputFormat::json) {
    ordered_json j = {{"format_version", kReportFormatVersion}, {"command", "build"}, {"N", N}, {"tables", entries}};
    emit_json(out, j);
  }
  return failures == 0 ? 0 : 2;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.validate();
  const SuiteLimits lim;
  const SweepSuite s = run_sweep(cfg, active_weights(cfg, log));
  const bool ok = s.ok(lim);
  if (cfg.output == OutputFormat::csv) {
    out << "k,index,y,value,tail_bound\n";
    for (const auto& p : s.profiles) p.write_csv_rows(out);
    out << "# summary,global_sup," << format_double(s.global_sup) << ",bound," << format_double(lim.sup_bound)
        << ",ok," << (ok ? 1 : 0) << '\n';
    out << "# y1,k,index,value,three_over_pi\n";
    for (const auto& r : s.y1)
      out << "# y1," << r["k"].get<int>() << ',' << r["index"].get<int>() << ','
          << format_double(r["value"].get<double>()) << ',' << format_double(kThreeOverPi) << '\n';
    if (!s.y1.empty())
      out << "# y1_mean," << format_double(s.final_mean) << ",prefix_min," << format_double(s.running_mean_min)
          << ",prefix_max," << format_double(s.running_mean_max) << '\n';
  } else {
    ordered_json j = envelope("sweep", cfg);
    ordered_json profiles = ordered_json::array();
    for (const auto& p : s.profiles) profiles.push_back(p.to_json());
    j["profiles"] = profiles;
    j["summary"] = {{"global_sup", s.global_sup},
                    {"sup_bound", lim.sup_bound},
                    {"three_over_pi", kThreeOverPi},
                    {"y1", s.y1},
                    {"y1_mean", s.final_mean},
                    {"y1_prefix_mean_min", s.y1.empty() ? 0.0 : s.running_mean_min},
                    {"y1_prefix_mean_max", s.y1.empty() ? 0.0 : s.running_mean_max},
                    {"ok", ok}};
    emit_json(out, j);
  }
  return ok ? 0 : 1;
}

int cmd_lvalue(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.validate();
  const SuiteLimits lim;
  const LSuite s = run_lvalue(cfg, active_weights(cfg, log), lim);
  if (cfg.output == OutputFormat::csv) {
    out << "k,index,value_dirichlet,value_euler,value_proxy,x_smoothing,prime_cutoff,spread,lemma3_ratio\n";
    for (const auto& r : s.rows)
      out << r.report.weight << ',' << r.report.index << ',' << format_double(r.report.value_dirichlet) << ','
          << format_double(r.report.value_euler) << ',' << format_double(r.report.value_proxy) << ','
          << format_double(r.report.x_smoothing) << ',' << r.report.prime_cutoff << ','
          << format_double(r.report.spread) << ',' << format_double(r.lemma3) << '\n';
    out << "# summary,max_spread," << format_double(s.max_spread) << ",spread_failures," << s.spread_failures
        << ",max_abs_lemma3," << format_double(s.max_abs_lemma3) << ",lemma3_failures," << s.lemma3_failures
        << ",lower_bound_failures," << s.lower_failures << '\n';
  } else {
    ordered_json j = envelope("lvalue", cfg);
    ordered_json rows = ordered_json::array();
    for (const auto& r : s.rows) {
      ordered_json o = r.report.to_json();
      o["lemma3_ratio"] = r.lemma3;
      rows.push_back(o);
    }
    j["reports"] = rows;
    j["summary"] = {{"max_spread", s.max_spread},      {"spread_bound", lim.spread_bound},
                    {"spread_failures", s.spread_failures}, {"max_abs_lemma3", s.max_abs_lemma3},
                    {"lemma3_bound", lim.lemma3_bound},  {"lemma3_failures", s.lemma3_failures},
                    {"lower_bound_failures", s.lower_failures}, {"ok", s.ok()}};
    emit_json(out, j);
  }
  return s.ok() ? 0 : 1;
}

int cmd_shiu(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.validate();
  const SuiteLimits lim;
  const ShiuSuite s = run_shiu(cfg, active_weights(cfg, log));
  const bool ok = s.max_ratio <= lim.shiu_bound;
  if (cfg.output == OutputFormat::csv) {
    out << "k,index,x,z,sum,rhs,ratio\n";
    write_csv_rows(out, s.reports);
    out << "# summary,max_ratio," << format_double(s.max_ratio) << ",bound," << format_double(lim.shiu_bound)
        << ",skipped_cells," << s.skipped << ",ok," << (ok ? 1 : 0) << '\n';
  } else {
    ordered_json j = envelope("shiu", cfg);
    j["x"] = cfg.shiu_x;
    j["theta"] = cfg.shiu_theta;
    ordered_json rows = ordered_json::array();
    for (const auto& r : s.reports)
      rows.push_back({{"k", r.k}, {"index", r.index}, {"x", r.x}, {"theta", r.theta}, {"z", r.z},
                      {"sum", r.sum_value}, {"sum_error", r.sum_error}, {"rhs", r.shiu_rhs}, {"ratio", r.ratio}});
    j["reports"] = rows;
    j["summary"] = {{"max_ratio", s.max_ratio}, {"bound", lim.shiu_bound}, {"skipped_cells", s.skipped}, {"ok", ok}};
    emit_json(out, j);
  }
  return ok ? 0 : 1;
}

int cmd_cross(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.validate();
  const CrossSuite s = run_cross(cfg, active_weights(cfg, log));
  if (cfg.output == OutputFormat::csv) {
    out << "k,index_f,index_g,y,cross,norm_f,norm_g,ratio\n";
    for (const auto& r : s.rows)
      out << r.k << ',' << r.i << ',' << r.j << ',' << format_double(cfg.y) << ',' << format_double(r.cross) << ','
          << format_double(r.norm_f) << ',' << format_double(r.norm_g) << ',' << format_double(r.ratio) << '\n';
    out << "# summary,max_ratio," << format_double(s.max_ratio) << ",ok," << (s.ok() ? 1 : 0) << '\n';
  } else {
    ordered_json j = envelope("cross", cfg);
    j["y"] = cfg.y;
    ordered_json rows = ordered_json::array();
    for (const auto& r : s.rows)
      rows.push_back({{"k", r.k}, {"index_f", r.i}, {"index_g", r.j}, {"cross", r.cross},
                      {"norm_f", r.norm_f}, {"norm_g", r.norm_g}, {"ratio", r.ratio}});
    j["pairs"] = rows;
    j["summary"] = {{"max_ratio", s.max_ratio}, {"ok", s.ok()}};
    emit_json(out, j);
  }
  return s.ok() ? 0 : 1;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.validate();
  const SuiteLimits lim;
  const auto weights = active_weights(cfg, log);
  const SweepSuite sw = run_sweep(cfg, weights);
  const LSuite lv = run_lvalue(cfg, weights, lim);
  const ShiuSuite sh = run_shiu(cfg, weights);
  const CrossSuite cr = run_cross(cfg, weights);

  struct Line {
    const char* suite;
    const char* metric;
    double value;
    double bound;
    bool ok;
  };
  const std::vector<Line> lines{
      {"sweep", "global_sup", sw.global_sup, lim.sup_bound, sw.global_sup <= lim.sup_bound},
      {"sweep", "y1_mean_lower", sw.final_mean, lim.mean_low, sw.y1.empty() || sw.final_mean >= lim.mean_low},
      {"sweep", "y1_mean_upper", sw.final_mean, lim.mean_high, sw.y1.empty() || sw.final_mean <= lim.mean_high},
      {"lvalue", "max_spread", lv.max_spread, lim.spread_bound, lv.spread_failures == 0},
      {"lvalue", "max_abs_lemma3", lv.max_abs_lemma3, lim.lemma3_bound, lv.lemma3_failures == 0},
      {"lvalue", "min_value_over_lower_bound", lv.rows.empty() ? 1.0 : lv.min_margin, 1.0, lv.lower_failures == 0},
      {"shiu", "max_ratio", sh.max_ratio, lim.shiu_bound, sh.max_ratio <= lim.shiu_bound},
      {"cross", "max_ratio", cr.max_ratio, 1.0, cr.ok()},
  };
  bool ok = true;
  for (const auto& l : lines) ok = ok && l.ok;
  if (cfg.output == OutputFormat::csv) {
    out << "suite,metric,value,bound,ok\n";
    for (const auto& l : lines)
      out << l.suite << ',' << l.metric << ',' << format_double(l.value) << ',' << format_double(l.bound) << ','
          << (l.ok ? 1 : 0) << '\n';
  } else {
    ordered_json j = envelope("report", cfg);
    ordered_json rows = ordered_json::array();
    for (const auto& l : lines)
      rows.push_back({{"suite", l.suite}, {"metric", l.metric}, {"value", l.value}, {"bound", l.bound}, {"ok", l.ok}});
    j["checks"] = rows;
    j["ok"] = ok;
    emit_json(out, j);
  }
  return ok ? 0 : 1;
}

}  // namespace horocycle
