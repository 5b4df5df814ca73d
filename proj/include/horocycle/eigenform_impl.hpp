#pragma once

// Template definitions for eigenform.hpp.

#include <algorithm>
#include <set>

namespace horocycle {

template <class Sink>
void for_each_weight(const std::vector<int>& weights, int N, const EigenformOptions& options,
                     Sink&& sink) {
  std::set<int> wanted;
  for (int k : weights)
    if (k >= 12 && k % 2 == 0 && cusp_dim(k) > 0) wanted.insert(k);

  for (int residue = 0; residue < 12; residue += 2) {
    int top = 0;
    for (int k : wanted)
      if (k % 12 == residue) top = std::max(top, k);
    if (top == 0) continue;

    const int trunc = std::max(N, 3 * cusp_dim(top));
    WeightLadder ladder(residue, trunc);
    for (;;) {
      const int k = ladder.weight();
      if (wanted.count(k) != 0) sink(k, eigenforms_from_basis(k, ladder.basis(), N, options));
      if (k >= top) break;
      ladder.step();
    }
  }
}

}  // namespace horocycle
