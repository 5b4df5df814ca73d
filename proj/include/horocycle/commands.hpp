#pragma once

#include "horocycle/config.hpp"
#include "horocycle/eigenform.hpp"

#include <ostream>
#include <stdexcept>
#include <vector>

namespace horocycle {

// Suite constants asserted by the report commands.
struct SuiteLimits {
  double sup_bound = 10.0;        // restricted-norm sup over the sweep grid
  double spread_bound = 1.5;      // max/min of the three L-values
  double lemma3_bound = 2.0;      // |log L - sum_{p<=k} lambda(p^2)/p|
  double shiu_bound = 5.0;        // short-interval ratio
  double mean_low = 0.3;          // running mean of the y = 1 values
  double mean_high = 3.0;
};

inline constexpr int kReportFormatVersion = 1;
inline constexpr double kThreeOverPi = 0.95492965855137202;

// A requested table is missing or too short; the message names the build
// command that fixes it.
class MissingCache : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads every eigenform of weight k from the cache, requiring N >= need.
std::vector<Eigenform> load_forms(const RunConfig& cfg, int k, int need);

// Each command writes its report to out and progress notes to log, and
// returns the process exit code: 0 iff every suite assertion passed.
int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_lvalue(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_shiu(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_cross(const RunConfig& cfg, std::ostream& out, std::ostream& log);
// All four suites, summary only.
int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace horocycle
