#include "ekphd/auction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>

namespace ekphd {

namespace {

constexpr std::int64_t kForbidden = std::numeric_limits<std::int64_t>::min();

struct Problem {
  // Square integer benefit matrix: real rows, then dummy rows.
  std::vector<std::int64_t> a;
  int size = 0;
  int real_rows = 0;
  int real_cols = 0;
  std::int64_t span = 0;  // max - min over admissible entries
  std::int64_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * size + j]; }
};

// Columns: [original columns | one private fallback column per real row].
// Dummy rows may take any column at zero benefit, which turns the rectangular
// problem into a square one with a guaranteed perfect matching.
Problem build(const Eigen::MatrixXd& benefit, const std::vector<int>& rows) {
  const int n = static_cast<int>(rows.size());
  const int cols = static_cast<int>(benefit.cols());
  Problem pr;
  pr.real_rows = n;
  pr.real_cols = cols;
  pr.size = cols + n;

  double lo = 0.0;
  double hi = 0.0;
  for (int r : rows) {
    for (int j = 0; j < cols; ++j) {
      const double v = benefit(r, j);
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  const double range = hi - lo;

  const auto N = static_cast<std::uint64_t>(pr.size);
  const int headroom = std::bit_width((N + 1) * (static_cast<std::uint64_t>(n) + 2));
  const int bits = std::clamp(58 - headroom, 8, 40);
  const double levels = std::ldexp(1.0, bits);
  const auto mult = static_cast<std::int64_t>(N + 1);

  auto quantize = [&](double v) -> std::int64_t {
    if (range <= 0.0) return 0;
    return std::llround((v - lo) / range * levels) * mult;
  };
  const std::int64_t top = static_cast<std::int64_t>(levels) * mult;
  const std::int64_t fallback = -(static_cast<std::int64_t>(n) + 1) * top - mult;
  const std::int64_t dummy = quantize(0.0);

  pr.a.assign(static_cast<std::size_t>(pr.size) * pr.size, kForbidden);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = benefit(rows[i], j);
      if (std::isfinite(v)) pr.a[static_cast<std::size_t>(i) * pr.size + j] = quantize(v);
    }
    pr.a[static_cast<std::size_t>(i) * pr.size + cols + i] = fallback;
  }
  for (int i = n; i < pr.size; ++i) {
    std::fill_n(pr.a.begin() + static_cast<std::ptrdiff_t>(i) * pr.size, pr.size, dummy);
  }
  pr.span = std::max<std::int64_t>(top, dummy) - fallback;
  return pr;
}

void run_phase(const Problem& pr, std::int64_t eps, std::vector<std::int64_t>& price,
               std::vector<int>& row_of_col, std::vector<int>& col_of_row) {
  std::fill(row_of_col.begin(), row_of_col.end(), -1);
  std::fill(col_of_row.begin(), col_of_row.end(), -1);
  std::deque<int> queue;
  for (int i = 0; i < pr.size; ++i) queue.push_back(i);

  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    int best_j = -1;
    std::int64_t best = 0;
    std::int64_t second = 0;
    bool have_second = false;
    for (int j = 0; j < pr.size; ++j) {
      const std::int64_t aij = pr.at(i, j);
      if (aij == kForbidden) continue;
      const std::int64_t v = aij - price[j];
      if (best_j < 0 || v > best) {
        if (best_j >= 0) {
          second = best;
          have_second = true;
        }
        best = v;
        best_j = j;
      } else if (!have_second || v > second) {
        second = v;
        have_second = true;
      }
    }
    const std::int64_t gap = have_second ? best - second : pr.span;
    price[best_j] += gap + eps;
    const int prev = row_of_col[best_j];
    row_of_col[best_j] = i;
    col_of_row[i] = best_j;
    if (prev >= 0) {
      col_of_row[prev] = -1;
      queue.push_back(prev);
    }
  }
}

}  // namespace

std::vector<int> auction_maximize(const Eigen::MatrixXd& benefit) {
  const int rows_total = static_cast<int>(benefit.rows());
  std::vector<int> result(static_cast<std::size_t>(rows_total), -1);

  std::vector<int> rows;
  for (int i = 0; i < rows_total; ++i) {
    bool any = false;
    for (int j = 0; j < benefit.cols() && !any; ++j) any = std::isfinite(benefit(i, j));
    if (any) rows.push_back(i);
  }
  if (rows.empty()) return result;

  const Problem pr = build(benefit, rows);
  std::vector<std::int64_t> price(static_cast<std::size_t>(pr.size), 0);
  std::vector<int> row_of_col(static_cast<std::size_t>(pr.size), -1);
  std::vector<int> col_of_row(static_cast<std::size_t>(pr.size), -1);

  std::int64_t eps = std::max<std::int64_t>(1, pr.span / 2);
  for (;;) {
    run_phase(pr, eps, price, row_of_col, col_of_row);
    if (eps == 1) break;
    eps = std::max<std::int64_t>(1, eps / 5);
  }

  for (int k = 0; k < pr.real_rows; ++k) {
    const int j = col_of_row[k];
    result[static_cast<std::size_t>(rows[k])] = j < pr.real_cols ? j : -1;
  }
  return result;
}

}  // namespace ekphd
