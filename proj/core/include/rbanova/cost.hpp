#pragma once

namespace rbanova {

/// Cost accounting in "cost units": one full finite-element solve is one
/// unit, a reduced solve of size N_r costs N_r/N_h where N_h is the total
/// node count of the grid the model lives on.
struct CostLedger {
  long full_solve_count = 0;
  double reduced_cost = 0.0;
  double n_h = 1.0;

  void add_full_solve() { ++full_solve_count; }
  void add_reduced_solve(int n_r) { reduced_cost += static_cast<double>(n_r) / n_h; }
  double total() const { return static_cast<double>(full_solve_count) + reduced_cost; }

  CostLedger& operator+=(const CostLedger& o) {
    full_solve_count += o.full_solve_count;
    reduced_cost += o.reduced_cost;
    return *this;
  }
};

}  // namespace rbanova
