#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace umbir {

/// Column-major sparse matrix whose columns are lists of contiguous row runs.
/// Values are stored as 32-bit floats; all arithmetic accumulates in double.
class SparseColumns {
public:
  struct Run {
    std::uint32_t row{};
    std::uint32_t length{};
  };

  SparseColumns() = default;
  /// `run_begin` has cols + 1 entries indexing into `runs`. Runs of one
  /// column must not overlap. Values start zeroed.
  SparseColumns(std::size_t rows, std::size_t cols,
                std::vector<std::size_t> run_begin, std::vector<Run> runs);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::size_t nnz() const { return values_.size(); }
  [[nodiscard]] std::size_t run_count() const { return runs_.size(); }

  /// Global run indices [first, last) belonging to column `col`.
  [[nodiscard]] std::size_t first_run(std::size_t col) const {
    return run_begin_[col];
  }
  [[nodiscard]] std::size_t last_run(std::size_t col) const {
    return run_begin_[col + 1];
  }
  [[nodiscard]] const Run &run(std::size_t r) const { return runs_[r]; }
  [[nodiscard]] std::span<const float> run_values(std::size_t r) const {
    return {values_.data() + value_begin_[r], runs_[r].length};
  }
  [[nodiscard]] std::span<float> run_values(std::size_t r) {
    return {values_.data() + value_begin_[r], runs_[r].length};
  }
  [[nodiscard]] std::size_t column_nnz(std::size_t col) const;

  [[nodiscard]] double dot(std::size_t col, std::span<const double> y,
                           std::size_t row_offset = 0) const;
  void axpy(std::size_t col, double a, std::span<double> y,
            std::size_t row_offset = 0) const;
  [[nodiscard]] double norm2(std::size_t col) const;

  /// y += A x
  void apply_add(std::span<const double> x, std::span<double> y,
                 std::size_t row_offset = 0, double scale = 1.0) const;
  /// x += A^T y
  void apply_transpose_add(std::span<const double> y, std::span<double> x,
                           std::size_t row_offset = 0, double scale = 1.0) const;

  [[nodiscard]] const std::vector<std::size_t> &run_begin() const {
    return run_begin_;
  }
  [[nodiscard]] const std::vector<Run> &runs() const { return runs_; }
  [[nodiscard]] const std::vector<float> &values() const { return values_; }
  [[nodiscard]] std::vector<float> &values() { return values_; }

private:
  std::size_t rows_{};
  std::size_t cols_{};
  std::vector<std::size_t> run_begin_{0};
  std::vector<Run> runs_;
  std::vector<std::size_t> value_begin_;
  std::vector<float> values_;
};

/// Block-structured view over shared SparseColumns blocks. Each block sits at
/// (row_offset, col_offset) and is multiplied by `scale`. Vertical stacking
/// uses col_offset 0 for every block; block-diagonal placement advances both
/// offsets.
class BlockColumns {
public:
  struct Block {
    std::shared_ptr<const SparseColumns> matrix;
    std::size_t row_offset{};
    std::size_t col_offset{};
    double scale{1.0};
  };

  BlockColumns() = default;
  BlockColumns(std::size_t rows, std::size_t cols, std::vector<Block> blocks);

  [[nodiscard]] static BlockColumns single(std::shared_ptr<const SparseColumns> m);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] const std::vector<Block> &blocks() const { return blocks_; }
  [[nodiscard]] bool empty() const { return cols_ == 0; }

  [[nodiscard]] double dot(std::size_t col, std::span<const double> y) const;
  void axpy(std::size_t col, double a, std::span<double> y) const;
  [[nodiscard]] double norm2(std::size_t col) const;

  [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
  [[nodiscard]] std::vector<double>
  apply_transpose(std::span<const double> y) const;
  void apply_add(std::span<const double> x, std::span<double> y) const;

  /// Calls f(global_row, value) for every stored entry of column `col`.
  template <typename F> void for_each_in_column(std::size_t col, F &&f) const {
    for (const auto &b : blocks_) {
      if (col < b.col_offset || col >= b.col_offset + b.matrix->cols()) {
        continue;
      }
      const std::size_t c = col - b.col_offset;
      for (std::size_t r = b.matrix->first_run(c); r < b.matrix->last_run(c);
           ++r) {
        const auto &run = b.matrix->run(r);
        const auto vals = b.matrix->run_values(r);
        for (std::size_t i = 0; i < run.length; ++i) {
          f(b.row_offset + run.row + i, b.scale * static_cast<double>(vals[i]));
        }
      }
    }
  }

private:
  std::size_t rows_{};
  std::size_t cols_{};
  std::vector<Block> blocks_;
};

} // namespace umbir
