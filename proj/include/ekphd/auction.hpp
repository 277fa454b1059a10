#pragma once

#include <vector>

#include <Eigen/Core>

namespace ekphd {

/// Solves max sum_i benefit(i, col[i]) over injective row -> column maps that
/// give every row one column. Entries equal to -infinity are forbidden pairs
/// and never enter arithmetic. Rows with no admissible column are left at -1.
///
/// Benefits are mapped to an integer grid (about 2^40 levels across the
/// finite range) and multiplied by (N + 1); epsilon-scaling then ends at
/// epsilon = 1, which makes the result exactly optimal on that grid. Ties are
/// broken toward the lowest column index.
std::vector<int> auction_maximize(const Eigen::MatrixXd& benefit);

}  // namespace ekphd
