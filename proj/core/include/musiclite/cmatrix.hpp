#pragma once

#include <complex>
#include <vector>

namespace musiclite {

using cdouble = std::complex<double>;

/// Dense row-major complex matrix in host double precision.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  static CMatrix identity(int n);

  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  [[nodiscard]] cdouble& operator()(int r, int c) noexcept { return data_[index(r, c)]; }
  [[nodiscard]] const cdouble& operator()(int r, int c) const noexcept { return data_[index(r, c)]; }
  [[nodiscard]] const std::vector<cdouble>& data() const noexcept { return data_; }

  [[nodiscard]] CMatrix conj_transpose() const;
  [[nodiscard]] CMatrix columns(int first, int count) const;
  [[nodiscard]] double frobenius_norm() const;

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator-(const CMatrix& a, const CMatrix& b);

 private:
  [[nodiscard]] std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<cdouble> data_;
};

/// max |a_ij - b_ij|
[[nodiscard]] double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// max |(M^H M - I)_ij|
[[nodiscard]] double unitarity_residual(const CMatrix& m);

}  // namespace musiclite
