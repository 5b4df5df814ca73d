// Acceptance suite: one PASS/FAIL line per criterion, with measured values and
// timings. Exit status is 0 unless --strict is given and a criterion fails.
#include "horocycle/arith.hpp"
#include "horocycle/commands.hpp"
#include "horocycle/eigenform.hpp"
#include "horocycle/qseries.hpp"
#include "horocycle/restriction.hpp"
#include "horocycle/short_interval.hpp"
#include "horocycle/sym2.hpp"

#include "CLI11.hpp"

#include <mpfr.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace horocycle;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Accumulates wall time spent inside a scope.
struct Stopwatch {
  double total = 0.0;
  template <class F>
  auto time(F&& f) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      total += seconds_since(t0);
    } else {
      auto r = f();
      total += seconds_since(t0);
      return r;
    }
  }
};

enum class Status { pass, fail, partial };

struct Outcome {
  int id;
  Status status;
  std::string detail;
  double seconds;
};

std::vector<Outcome> outcomes;

void report(int id, Status status, const std::string& detail, double seconds) {
  const char* tag = status == Status::pass ? "PASS" : status == Status::fail ? "FAIL" : "PARTIAL";
  char head[64];
  std::snprintf(head, sizeof head, "criterion %2d %-7s [%8.1fs] ", id, tag, seconds);
  std::cout << head << detail << std::endl;
  outcomes.push_back({id, status, detail, seconds});
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// ---- 1: tau from the product expansion ---------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  const int N = 1000;
  // q prod (1 - q^m)^24 by repeated multiplication, independent of the library.
  std::vector<mpz_class> c(N, 0);
  c[0] = 1;
  for (int m = 1; m < N; ++m)
    for (int r = 0; r < 24; ++r)
      for (int n = N - 1; n >= m; --n) c[n] -= c[n - m];

  const auto forms = eigenforms(12, N);
  int mismatches = 0;
  double worst = 0.0;
  mpfr_t v, s;
  mpfr_inits2(512, v, s, static_cast<mpfr_ptr>(nullptr));
  for (int n = 1; n <= N; ++n) {
    mpfr_set(v, forms.at(0).lambda(n).raw(), MPFR_RNDN);
    mpfr_set_ui(s, static_cast<unsigned long>(n), MPFR_RNDN);
    mpfr_pow_ui(s, s, 11, MPFR_RNDN);
    mpfr_sqrt(s, s, MPFR_RNDN);
    mpfr_mul(v, v, s, MPFR_RNDN);
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), v, MPFR_RNDN);
    mpfr_sub_z(s, v, z.get_mpz_t(), MPFR_RNDN);
    worst = std::max(worst, std::fabs(mpfr_get_d(s, MPFR_RNDN)));
    if (z != c[n - 1]) ++mismatches;
  }
  mpfr_clears(v, s, static_cast<mpfr_ptr>(nullptr));
  const double secs = seconds_since(t0);
  report(1, mismatches == 0 && worst < 0.5 && secs < 5 ? Status::pass : Status::fail,
         "k=12, n<=1000: " + std::to_string(mismatches) + " mismatches against the product expansion, max |lambda n^(11/2) - tau| = " +
             fmt(worst) + " (limit 5 s)",
         secs);
}

// ---- 3: Parseval against the rectangle rule ---------------------------------

double rectangle_rule(const Eigenform& f, double lc2, double y, int N) {
  const int k = f.weight(), M = 2 * N + 1;
  const double pi = std::numbers::pi;
  std::vector<double> t(static_cast<size_t>(N) + 1);
  for (int n = 1; n <= N; ++n)
    t[n] = std::exp(0.5 * lc2 + 0.5 * (k - 1) * std::log(4 * pi * n) + 0.5 * k * std::log(y) - 2 * pi * n * y) *
           f.lambda_value(n);
  double total = 0;
  for (int j = 0; j < M; ++j) {
    std::complex<double> s = 0;
    for (int n = 1; n <= N; ++n)
      s += t[n] * std::polar(1.0, 2 * pi * static_cast<double>((static_cast<long long>(n) * j) % M) / M);
    total += std::norm(s);
  }
  return total / M;
}

void criterion3() {
  const auto t0 = Clock::now();
  double worst = 0.0;  // max |diff| / (tail + 1e-8 |q|)
  int cases = 0;
  for (int k : {12, 16, 24})
    for (const Eigenform& f : eigenforms(k, 3000)) {
      const double lc2 = petersson_log_c2(k, l_sym2_at_1(f, LMethod::dirichlet_smoothed).value_dirichlet);
      for (double y : {0.5, 1.0, 2.0}) {
        const NormValue v = restricted_norm(f, lc2, y);
        const int N = static_cast<int>(truncation_window(k, y, 1e-12).n_max) + 5;
        const double q = rectangle_rule(f, lc2, y, N);
        worst = std::max(worst, std::fabs(v.value - q) / (v.tail_bound + 1e-8 * std::fabs(q)));
        ++cases;
      }
    }
  const double secs = seconds_since(t0);
  report(3, worst <= 1.0 && secs < 60 ? Status::pass : Status::fail,
         std::to_string(cases) + " (form, y) cases, max |norm - quadrature| / (tail_bound + 1e-8 rel) = " + fmt(worst) +
             " (limit 1, 60 s)",
         secs);
}

// ---- 4: envelope sandwich ----------------------------------------------------

void criterion4() {
  const auto t0 = Clock::now();
  double lo = HUGE_VAL, hi = -HUGE_VAL, oracle_gap = 0.0;
  mpfr_t g;
  mpfr_init2(g, 256);
  for (int k : {12, 60, 120, 200}) {
    mpfr_set_ui(g, static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_lngamma(g, g, MPFR_RNDN);
    const double lgk = mpfr_get_d(g, MPFR_RNDN);
    const double a = std::log(5.0 * k * 1e-6), b = std::log(5.0 * k);
    for (int i = 0; i < 200; ++i) {
      const double xi = std::exp(a + (b - a) * i / 199);
      const double lw = log_term_weight(k, 1.0, xi / (4 * std::numbers::pi));
      oracle_gap = std::max(oracle_gap, std::fabs(lw - (k * std::log(xi) - xi - lgk)));
      const double ratio = std::exp(lw - (0.5 * std::log(k) + k * std::log(xi / k) + k - xi));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  mpfr_clear(g);
  const double secs = seconds_since(t0);
  report(4, lo >= 0.35 && hi <= 0.45 && oracle_gap < 1e-9 ? Status::pass : Status::fail,
         "k in {12,60,120,200}, 200 xi each: ratio in [" + fmt(lo, "%.6f") + ", " + fmt(hi, "%.6f") +
             "] (required [0.35, 0.45], Stirling 0.398942); max |log weight - 256-bit oracle| = " + fmt(oracle_gap),
         secs);
}

// ---- 2, 5, 6, 7, 8, 9: streamed over the full build -------------------------

struct Streamed {
  int forms = 0, weights = 0;
  // 2
  int table_failures = 0;
  double max_err = 0.0, max_mult = 0.0, max_rec = 0.0, max_deligne = -HUGE_VAL;
  std::vector<std::string> build_failures;
  // 5
  double sup = 0.0, sup_y = 0.0;
  int sup_k = 0, sup_i = 0, sup_over = 0;
  // 6
  std::map<int, double> y1_weight_mean;
  double y1_min = HUGE_VAL, y1_max = 0.0;
  // 7
  double max_spread = 0.0, max_lemma3 = 0.0, min_lower_margin = HUGE_VAL, max_de_spread = 1.0;
  std::string max_spread_at;
  std::vector<std::pair<int, std::string>> spread_fail;  // (k, label)
  int lemma3_fail = 0, lower_fail = 0;
  // 8
  double shiu_max = 0.0;
  int shiu_cells = 0, shiu_skipped = 0;
  // 9
  double cross_max = 0.0;
  int cross_pairs = 0, cross_k = 0;
  Stopwatch t2, t5, t7, t8, t9;
};

void stream_suite(int kmin, int kmax, int N, double delta, int grid, Streamed& s) {
  std::vector<int> weights;
  for (int k = kmin; k <= kmax; k += 2)
    if (cusp_dim(k) > 0) weights.push_back(k);
  const SuiteLimits lim;

  const auto t0 = Clock::now();
  Stopwatch analysis;
  std::cerr << "building " << weights.size() << " weights, N=" << N << std::endl;
  for_each_weight(weights, N, {}, [&](int k, std::vector<Eigenform> forms) {
    analysis.time([&] {
      ++s.weights;
      s.forms += static_cast<int>(forms.size());
      // 2: table checks
      s.t2.time([&] {
        for (const auto& f : forms) {
          const TableCheck c = check_table(f, 10000);
          s.max_err = std::max(s.max_err, c.max_error);
          s.max_mult = std::max(s.max_mult, c.max_multiplicative_ratio);
          s.max_rec = std::max(s.max_rec, c.max_recursion_ratio);
          s.max_deligne = std::max(s.max_deligne, c.max_deligne_excess);
          if (!c.ok() || c.max_error >= 1e-20) ++s.table_failures;
        }
      });
      // 7: L-values (also the Petersson constants for 5, 6, 9)
      std::vector<double> lc2;
      s.t7.time([&] {
        for (const auto& f : forms) {
          const LValueReport r = l_sym2_report(f);
          const double l3 = lemma3_ratio(f, r.value_dirichlet);
          lc2.push_back(petersson_log_c2(k, r.value_dirichlet));
          if (r.spread > s.max_spread) {
            s.max_spread = r.spread;
            s.max_spread_at = std::to_string(k) + "#" + std::to_string(f.index());
          }
          s.max_de_spread = std::max(s.max_de_spread, std::max(r.value_dirichlet, r.value_euler) /
                                                          std::min(r.value_dirichlet, r.value_euler));
          s.max_lemma3 = std::max(s.max_lemma3, std::fabs(l3));
          if (r.spread > lim.spread_bound)
            s.spread_fail.emplace_back(k, std::to_string(k) + "#" + std::to_string(f.index()) + ":" + fmt(r.spread, "%.3f"));
          if (std::fabs(l3) > lim.lemma3_bound) ++s.lemma3_fail;
          const double low = std::min({r.value_dirichlet, r.value_euler, r.value_proxy});
          const double bound = 1.0 / (10.0 * std::log(static_cast<double>(k)));
          s.min_lower_margin = std::min(s.min_lower_margin, low / bound);
          if (low < bound) ++s.lower_fail;
        }
      });
      // 5 and 6: sweeps and y = 1
      s.t5.time([&] {
        double y1_sum = 0.0;
        for (size_t i = 0; i < forms.size(); ++i) {
          const NormProfile p = sweep(forms[i], lc2[i], delta, grid);
          if (p.sup_value > 10.0) ++s.sup_over;
          if (p.sup_value > s.sup) {
            s.sup = p.sup_value;
            s.sup_k = k;
            s.sup_i = forms[i].index();
            for (const auto& pt : p.grid)
              if (pt.value == p.sup_value) s.sup_y = pt.y;
          }
          const double v = restricted_norm(forms[i], lc2[i], 1.0).value;
          s.y1_min = std::min(s.y1_min, v);
          s.y1_max = std::max(s.y1_max, v);
          y1_sum += v;
        }
        s.y1_weight_mean[k] = y1_sum / static_cast<double>(forms.size());
      });
      // 8: short intervals
      s.t8.time([&] {
        for (const auto& f : forms) {
          const ShiuScan scan = shiu_ratio_scan(f, kDefaultShiuX, kDefaultShiuTheta);
          s.shiu_max = std::max(s.shiu_max, scan.max_ratio);
          s.shiu_cells += static_cast<int>(scan.reports.size());
          s.shiu_skipped += scan.skipped;
        }
      });
      // 9: cross ratios at y = 1
      s.t9.time([&] {
        if (forms.size() < 2) return;
        ++s.cross_k;
        std::vector<double> norms;
        for (size_t i = 0; i < forms.size(); ++i) norms.push_back(restricted_norm(forms[i], lc2[i], 1.0).value);
        for (size_t i = 0; i < forms.size(); ++i)
          for (size_t j = i + 1; j < forms.size(); ++j) {
            const double c = cross_inner_product(forms[i], lc2[i], forms[j], lc2[j], 1.0).value;
            s.cross_max = std::max(s.cross_max, std::fabs(c) / std::sqrt(norms[i] * norms[j]));
            ++s.cross_pairs;
          }
      });
    });
    std::cerr << "  k=" << k << " d=" << forms.size() << " elapsed " << fmt(seconds_since(t0), "%.1f") << "s"
              << std::endl;
  });
  // Build time: everything outside the analyses, plus the table checks.
  s.t2.total += seconds_since(t0) - analysis.total;
}

// ---- 10: determinism ----------------------------------------------------------

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (p == nullptr) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  status = ::pclose(p);
  return out;
}

void criterion10(const std::string& cli, const fs::path& work) {
  const auto t0 = Clock::now();
  const fs::path cache = work / "determinism-cache";
  fs::remove_all(cache);
  RunConfig cfg;
  cfg.weights = parse_weights("12..60");
  cfg.N = 4000;
  cfg.cache_dir = cache;
  std::ostringstream sink;
  bool ok = cmd_build(cfg, sink, sink) == 0;
  std::string detail;

  // In process.
  for (OutputFormat o : {OutputFormat::csv, OutputFormat::json}) {
    cfg.output = o;
    std::ostringstream a, b;
    cmd_sweep(cfg, a, sink);
    cmd_sweep(cfg, b, sink);
    ok = ok && a.str() == b.str() && !a.str().empty();
  }
  detail = "in-process csv+json " + std::string(ok ? "identical" : "DIFFER");

  // Two separate processes of the command-line tool.
  if (!cli.empty()) {
    bool same = true;
    for (const char* format : {"csv", "json"}) {
      const std::string cmd = "'" + cli + "' sweep --weights 12..60 --cache-dir '" + cache.string() + "' --output " +
                              format + " 2>/dev/null";
      int s1 = 0, s2 = 0;
      const std::string a = run_capture(cmd, s1), b = run_capture(cmd, s2);
      same = same && s1 == s2 && a == b && !a.empty();
    }
    ok = ok && same;
    detail += "; two CLI processes csv+json " + std::string(same ? "identical" : "DIFFER");
  } else {
    detail += "; CLI not given";
  }
  fs::remove_all(cache);
  report(10, ok ? Status::pass : Status::fail, "cmd_sweep k=12..60: " + detail, seconds_since(t0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  int kmin = 12, kmax = 300, N = 20001, grid = 32;
  double delta = 0.1;
  bool strict = false;
  std::string cli, work_dir;
  app.add_option("--kmax", kmax, "largest weight of the streamed suite (300 for the full run)");
  app.add_option("--N", N, "table size of the streamed suite");
  app.add_option("--cli", cli, "path of the horocycle executable (determinism check)");
  app.add_option("--work-dir", work_dir, "scratch directory");
  app.add_flag("--strict", strict, "exit 1 when a criterion fails");
  CLI11_PARSE(app, argc, argv);

  const fs::path work = work_dir.empty() ? fs::temp_directory_path() / ("horocycle-acceptance-" + std::to_string(::getpid()))
                                         : fs::path(work_dir);
  fs::create_directories(work);
  const auto t_all = Clock::now();

  criterion1();
  criterion3();
  criterion4();

  Streamed s;
  try {
    stream_suite(kmin, kmax, N, delta, grid, s);
  } catch (const std::exception& e) {
    s.build_failures.push_back(e.what());
    std::cerr << "streamed suite aborted: " << e.what() << std::endl;
  }
  const bool full = kmax >= 300 && s.build_failures.empty();
  const std::string range = "k=" + std::to_string(kmin) + ".." + std::to_string(kmax) + " (" + std::to_string(s.forms) +
                            " forms, N=" + std::to_string(N) + ")";
  auto status = [&](bool ok) { return !ok ? Status::fail : full ? Status::pass : Status::partial; };

  {
    const bool ok = s.table_failures == 0 && s.build_failures.empty() && s.t2.total < 600;
    std::string d = range + ", n<=10^4: " + std::to_string(s.table_failures) + " failing tables; max Deligne excess " +
                    fmt(s.max_deligne) + ", max tracked error " + fmt(s.max_err) +
                    ", multiplicativity/recursion residual over tracked error " + fmt(s.max_mult) + "/" +
                    fmt(s.max_rec) + "; build+check " + fmt(s.t2.total, "%.0f") + " s (limit 600 s)";
    for (const auto& e : s.build_failures) d += "; ERROR " + e;
    report(2, status(ok), d, s.t2.total);
  }
  report(5, status(s.sup <= 10.0 && s.t5.total < 900),
         range + ", delta=0.1, 32-point grid: sup restricted norm " + fmt(s.sup) + " at k=" + std::to_string(s.sup_k) +
             " #" + std::to_string(s.sup_i) + ", y=" + fmt(s.sup_y) + " (limit 10); " + std::to_string(s.sup_over) +
             " forms over the limit",
         s.t5.total);
  {
    double mean = 0.0, pmin = HUGE_VAL, pmax = -HUGE_VAL;
    int count = 0;
    for (const auto& [k, v] : s.y1_weight_mean) {
      mean = (mean * count + v) / (count + 1);
      ++count;
      pmin = std::min(pmin, mean);
      pmax = std::max(pmax, mean);
    }
    const double last = s.y1_weight_mean.empty() ? 0.0 : s.y1_weight_mean.rbegin()->second;
    const bool mean_ok = count > 0 && mean >= 0.3 && mean <= 3.0;
    report(6, status(mean_ok && s.sup <= 10.0),
           std::string(mean_ok ? "mean in range" : "mean OUT OF RANGE") + ", boundedness (criterion 5) " +
               (s.sup <= 10.0 ? "holds" : "fails") + "; y=1: mean over " + std::to_string(count) + " weights " + fmt(mean) + " (required [0.3, 3]; 3/pi = " +
               fmt(kThreeOverPi, "%.9f") + "), values in [" + fmt(s.y1_min) + ", " + fmt(s.y1_max) +
               "], running mean range [" + fmt(pmin) + ", " + fmt(pmax) + "], k=" + std::to_string(kmax) +
               " average " + fmt(last),
           s.t5.total);
  }
  {
    std::string d = range + ": max |log L - sum_{p<=k} lambda(p^2)/p| " + fmt(s.max_lemma3) + " (limit 2, " +
                    std::to_string(s.lemma3_fail) + " over); max three-method spread " + fmt(s.max_spread) + " at " +
                    s.max_spread_at + " (limit 1.5, " + std::to_string(s.spread_fail.size()) + " over";
    std::sort(s.spread_fail.begin(), s.spread_fail.end());
    for (size_t i = 0; i < s.spread_fail.size() && i < 8; ++i) d += (i == 0 ? ": " : ", ") + s.spread_fail[i].second;
    if (s.spread_fail.size() > 8) d += ", ...";
    d += "); Dirichlet/Euler alone max ratio " + fmt(s.max_de_spread) + "; min value / (1/(10 log k)) " +
         fmt(s.min_lower_margin);
    report(7, status(s.lemma3_fail == 0 && s.spread_fail.empty() && s.lower_fail == 0 && s.t7.total < 300), d,
           s.t7.total);
  }
  report(8, status(s.shiu_max <= 5.0 && s.t8.total < 120),
         range + ", x in {1e3,1e4}, theta in {0.5,0.7,1}: max ratio " + fmt(s.shiu_max) + " over " +
             std::to_string(s.shiu_cells) + " cells, " + std::to_string(s.shiu_skipped) + " skipped (limit 5)",
         s.t8.total);
  report(9, status(s.cross_max < 1.0 && s.cross_pairs > 0),
         range + ", y=1: max |cross|/sqrt(norm norm) " + fmt(s.cross_max, "%.10f") + " over " +
             std::to_string(s.cross_pairs) + " pairs in " + std::to_string(s.cross_k) + " weights (strict < 1)",
         s.t9.total);

  criterion10(cli, work);
  if (work_dir.empty()) fs::remove_all(work);

  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  int pass = 0, fail = 0, partial = 0;
  std::cout << "\nsummary (" << fmt(seconds_since(t_all), "%.0f") << " s):";
  for (const auto& o : outcomes) {
    pass += o.status == Status::pass;
    fail += o.status == Status::fail;
    partial += o.status == Status::partial;
    std::cout << ' ' << o.id << '=' << (o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "PARTIAL");
  }
  std::cout << "\n" << pass << " passed, " << fail << " failed, " << partial << " partial" << std::endl;
  return strict && (fail > 0 || partial > 0) ? 1 : 0;
}
