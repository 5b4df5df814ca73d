#pragma once

#include "horocycle/eigenform.hpp"

#include "json.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace horocycle {

// k log(4 pi n y) - 4 pi n y - log Gamma(k).
double log_term_weight(int k, double n, double y);

// Upper envelope for xi^k e^{-xi} / Gamma(k):
// sqrt(k) exp(-(k - xi)^2 / (4k)) for xi <= 2k, sqrt(k) (e/2)^(k - xi) beyond.
double log_weight_envelope(int k, double xi);

// Integer range [n_min, n_max] outside which
//   sum lambda(n)^2 / n * xi_n^k e^{-xi_n} / Gamma(k),  xi_n = 4 pi n y,
// is certified to be at most tail_bound <= eps, using |lambda(n)| <= d(n) and
// the explicit divisor majorant. Empty when n_min > n_max.
struct TruncationWindow {
  std::int64_t n_min = 1;
  std::int64_t n_max = 0;
  double tail_bound = 0.0;

  bool empty() const { return n_min > n_max; }
};

// Throws std::invalid_argument for k < 12, y <= 0 or eps outside (0, 1), and
// std::range_error when the window would pass n = 10^9.
TruncationWindow truncation_window(int k, double y, double eps);

struct NormValue {
  double value = 0.0;
  double tail_bound = 0.0;  // window tail plus propagated lambda errors, scaled
};

// scale = C_f^2 Gamma(k) / (4 pi) = exp(log_c2 + log Gamma(k) - log 4 pi).
double norm_scale(int k, double log_c2);

// int_0^1 y^k |f(x + iy)|^2 dx for the L^2-normalized form with log C_f^2 = log_c2.
// Throws std::out_of_range naming the needed N when the table is too short.
NormValue restricted_norm(const Eigenform& f, double log_c2, double y, double eps = 1e-12);

// (C_f C_g / 4 pi) sum lambda_f(n) lambda_g(n) / n (4 pi n y)^k e^{-4 pi n y}.
NormValue cross_inner_product(const Eigenform& f, double log_c2_f, const Eigenform& g,
                              double log_c2_g, double y, double eps = 1e-12);

inline constexpr int kNormProfileSchemaVersion = 1;

struct NormPoint {
  double y = 0.0;
  double value = 0.0;
  double tail_bound = 0.0;
};

struct NormProfile {
  int k = 0;
  int index = 0;
  double delta = 0.0;
  std::vector<NormPoint> grid;
  double sup_value = 0.0;

  nlohmann::ordered_json to_json() const;
  // Rows "k,index,y,value,tail_bound" (no header).
  void write_csv_rows(std::ostream& out) const;
};

// Geometric grid of grid_size points from 1/k to k^(1/2 - delta), inclusive.
std::vector<double> sweep_grid(int k, double delta, int grid_size);

NormProfile sweep(const Eigenform& f, double log_c2, double delta, int grid_size = 32,
                  double eps = 1e-12);

// The restricted-norm sum over the window terms with
// j sqrt(k) <= |4 pi n y - k| < (j + 1) sqrt(k), normalized like restricted_norm.
double binned_contribution(const Eigenform& f, double log_c2, double y, int j, double eps = 1e-12);

// Largest n needed by truncation_window over the sweep grid for weight k.
std::int64_t sweep_table_requirement(int k, double delta, int grid_size, double eps = 1e-12);

// Formats with 17 significant digits.
std::string format_double(double v);

}  // namespace horocycle
