// System state at an ordering epoch: on-hand stock after the morning arrival
// plus the outstanding orders still in the pipeline.

#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace lsinv {

struct PipelineState {
  double on_hand = 0.0;              // I_t, after replenishment arrival
  std::vector<double> outstanding;   // Q_{t-L+1}..Q_{t-1}, oldest first; size L-1

  int lead_time() const { return static_cast<int>(outstanding.size()) + 1; }

  double total_stock() const {
    return on_hand + std::accumulate(outstanding.begin(), outstanding.end(), 0.0);
  }

  void check() const {
    if (on_hand < 0.0) throw std::invalid_argument("PipelineState: negative on-hand");
    for (double q : outstanding) {
      if (q < 0.0) throw std::invalid_argument("PipelineState: negative outstanding order");
    }
  }
};

}  // namespace lsinv
