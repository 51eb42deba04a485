#pragma once

#include "monoracle/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace monoracle {

//! Thread count used by the OpenMP kernels: min(omp max threads,
//! MONORACLE_THREADS) when the environment variable is set and positive.
int effective_threads();

//! Complex sums S(w_k) = sum_j e^{i w_k X_j} at the bin midpoints of `grid`.
//!
//! Both variants produce bit-identical output for any thread count: bins are
//! processed in fixed-size blocks, and within a block each bin accumulates the
//! sample terms in sample order via a phase recurrence that is restarted at
//! the block boundary.
struct CfSums
{
  std::vector<double> re;
  std::vector<double> im;
};

CfSums cf_sums_serial(std::span<const double> xs, const FrequencyGrid& grid);
CfSums cf_sums_parallel(std::span<const double> xs, const FrequencyGrid& grid);
CfSums cf_sums(std::span<const double> xs, const FrequencyGrid& grid);

//! Kernel density estimate (1/n) sum_i K(X_i - x) at each point.
std::vector<double> kde_eval_serial(std::span<const double> xs, const KernelJumps& jumps,
                                    std::span<const double> points);
std::vector<double> kde_eval_parallel(std::span<const double> xs, const KernelJumps& jumps,
                                      std::span<const double> points);
std::vector<double> kde_eval(std::span<const double> xs, const KernelJumps& jumps,
                             std::span<const double> points);

} // namespace monoracle
