#include "umbir/sparse.hpp"

#include "umbir/error.hpp"

#include <string>

namespace umbir {

SparseColumns::SparseColumns(std::size_t rows, std::size_t cols,
                             std::vector<std::size_t> run_begin,
                             std::vector<Run> runs)
    : rows_(rows), cols_(cols), run_begin_(std::move(run_begin)),
      runs_(std::move(runs)) {
  if (run_begin_.size() != cols_ + 1 || run_begin_.front() != 0 ||
      run_begin_.back() != runs_.size()) {
    throw DataError("sparse column index does not match run list");
  }
  value_begin_.resize(runs_.size());
  std::size_t total = 0;
  for (std::size_t r = 0; r < runs_.size(); ++r) {
    if (static_cast<std::size_t>(runs_[r].row) + runs_[r].length > rows_) {
      throw DataError("sparse run " + std::to_string(r) +
                      " exceeds matrix rows");
    }
    value_begin_[r] = total;
    total += runs_[r].length;
  }
  values_.assign(total, 0.0F);
}

std::size_t SparseColumns::column_nnz(std::size_t col) const {
  std::size_t n = 0;
  for (std::size_t r = first_run(col); r < last_run(col); ++r) {
    n += runs_[r].length;
  }
  return n;
}

double SparseColumns::dot(std::size_t col, std::span<const double> y,
                          std::size_t row_offset) const {
  double acc = 0.0;
  for (std::size_t r = first_run(col); r < last_run(col); ++r) {
    const float *v = values_.data() + value_begin_[r];
    const double *yy = y.data() + row_offset + runs_[r].row;
    const std::uint32_t n = runs_[r].length;
    for (std::uint32_t i = 0; i < n; ++i) {
      acc += static_cast<double>(v[i]) * yy[i];
    }
  }
  return acc;
}

void SparseColumns::axpy(std::size_t col, double a, std::span<double> y,
                         std::size_t row_offset) const {
  for (std::size_t r = first_run(col); r < last_run(col); ++r) {
    const float *v = values_.data() + value_begin_[r];
    double *yy = y.data() + row_offset + runs_[r].row;
    const std::uint32_t n = runs_[r].length;
    for (std::uint32_t i = 0; i < n; ++i) {
      yy[i] += a * static_cast<double>(v[i]);
    }
  }
}

double SparseColumns::norm2(std::size_t col) const {
  double acc = 0.0;
  for (std::size_t r = first_run(col); r < last_run(col); ++r) {
    for (float v : run_values(r)) {
      acc += static_cast<double>(v) * static_cast<double>(v);
    }
  }
  return acc;
}

void SparseColumns::apply_add(std::span<const double> x, std::span<double> y,
                              std::size_t row_offset, double scale) const {
  for (std::size_t c = 0; c < cols_; ++c) {
    if (x[c] != 0.0) {
      axpy(c, scale * x[c], y, row_offset);
    }
  }
}

void SparseColumns::apply_transpose_add(std::span<const double> y,
                                        std::span<double> x,
                                        std::size_t row_offset,
                                        double scale) const {
  const auto count = static_cast<std::ptrdiff_t>(cols_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < count; ++c) {
    x[static_cast<std::size_t>(c)] +=
        scale * dot(static_cast<std::size_t>(c), y, row_offset);
  }
}

BlockColumns::BlockColumns(std::size_t rows, std::size_t cols,
                           std::vector<Block> blocks)
    : rows_(rows), cols_(cols), blocks_(std::move(blocks)) {
  for (const auto &b : blocks_) {
    if (!b.matrix || b.row_offset + b.matrix->rows() > rows_ ||
        b.col_offset + b.matrix->cols() > cols_) {
      throw DataError("block does not fit inside the stacked matrix");
    }
  }
}

BlockColumns BlockColumns::single(std::shared_ptr<const SparseColumns> m) {
  const std::size_t rows = m->rows();
  const std::size_t cols = m->cols();
  return BlockColumns(rows, cols, {Block{std::move(m), 0, 0, 1.0}});
}

double BlockColumns::dot(std::size_t col, std::span<const double> y) const {
  double acc = 0.0;
  for (const auto &b : blocks_) {
    if (col >= b.col_offset && col < b.col_offset + b.matrix->cols()) {
      acc += b.scale * b.matrix->dot(col - b.col_offset, y, b.row_offset);
    }
  }
  return acc;
}

void BlockColumns::axpy(std::size_t col, double a, std::span<double> y) const {
  for (const auto &b : blocks_) {
    if (col >= b.col_offset && col < b.col_offset + b.matrix->cols()) {
      b.matrix->axpy(col - b.col_offset, a * b.scale, y, b.row_offset);
    }
  }
}

double BlockColumns::norm2(std::size_t col) const {
  double acc = 0.0;
  for (const auto &b : blocks_) {
    if (col >= b.col_offset && col < b.col_offset + b.matrix->cols()) {
      acc += b.scale * b.scale * b.matrix->norm2(col - b.col_offset);
    }
  }
  return acc;
}

void BlockColumns::apply_add(std::span<const double> x,
                             std::span<double> y) const {
  for (const auto &b : blocks_) {
    b.matrix->apply_add(x.subspan(b.col_offset, b.matrix->cols()), y,
                        b.row_offset, b.scale);
  }
}

std::vector<double> BlockColumns::apply(std::span<const double> x) const {
  if (x.size() != cols_) {
    throw DataError("operand length does not match matrix columns");
  }
  std::vector<double> y(rows_, 0.0);
  apply_add(x, y);
  return y;
}

std::vector<double>
BlockColumns::apply_transpose(std::span<const double> y) const {
  if (y.size() != rows_) {
    throw DataError("operand length does not match matrix rows");
  }
  std::vector<double> x(cols_, 0.0);
  for (const auto &b : blocks_) {
    b.matrix->apply_transpose_add(
        y, std::span<double>(x).subspan(b.col_offset, b.matrix->cols()),
        b.row_offset, b.scale);
  }
  return x;
}

} // namespace umbir
