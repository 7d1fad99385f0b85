#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "radlabel/error.hpp"

namespace radlabel {

// Dense row-major matrix.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, const T &fill = T{})
      : rows_(rows), cols_(cols), cells_(rows * cols, fill) {}

  // Rows must all have the same length.
  static Grid from_rows(const std::vector<std::vector<T>> &rows) {
    Grid g(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != g.cols_) {
        throw Error(ErrorCode::ShapeMismatch, "row " + std::to_string(r) + " has a different length");
      }
      for (std::size_t c = 0; c < g.cols_; ++c) g(r, c) = rows[r][c];
    }
    return g;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return cells_.size(); }

  decltype(auto) operator()(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
  decltype(auto) operator()(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }

  template <typename U>
  bool same_shape(const Grid<U> &o) const {
    return rows_ == o.rows() && cols_ == o.cols();
  }

  bool operator==(const Grid &) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> cells_;
};

}  // namespace radlabel
