#include "musiclite/fixed_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "musiclite/errors.hpp"

namespace musiclite {

// ---- CMatrix ------------------------------------------------------------------

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

CMatrix CMatrix::conj_transpose() const {
  CMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      t(c, r) = std::conj((*this)(r, c));
    }
  }
  return t;
}

CMatrix CMatrix::columns(int first, int count) const {
  if (first < 0 || count < 0 || first + count > cols_) {
    throw std::out_of_range("column range outside matrix");
  }
  CMatrix out(rows_, count);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < count; ++c) {
      out(r, c) = (*this)(r, first + c);
    }
  }
  return out;
}

double CMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (const cdouble& v : data_) {
    sum += std::norm(v);
  }
  return std::sqrt(sum);
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matrix product dimension mismatch");
  }
  CMatrix out(a.rows(), b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int k = 0; k < a.cols(); ++k) {
      const cdouble av = a(r, k);
      for (int c = 0; c < b.cols(); ++c) {
        out(r, c) += av * b(k, c);
      }
    }
  }
  return out;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix difference dimension mismatch");
  }
  CMatrix out(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      out(r, c) = a(r, c) - b(r, c);
    }
  }
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  const CMatrix d = a - b;
  double worst = 0.0;
  for (const cdouble& v : d.data()) {
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

double unitarity_residual(const CMatrix& m) {
  return max_abs_diff(m.conj_transpose() * m, CMatrix::identity(m.cols()));
}

// ---- FixedMatrix ----------------------------------------------------------------

FixedMatrix::FixedMatrix(int rows, int cols, FixedFormat format, int scale_exponent)
    : rows_(rows), cols_(cols), format_(format), scale_exponent_(scale_exponent) {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("matrix dimensions must be positive");
  }
  format_.validate();
  re_.assign(static_cast<std::size_t>(rows) * cols, 0);
  im_.assign(static_cast<std::size_t>(rows) * cols, 0);
}

FixedMatrix FixedMatrix::identity(int n, FixedFormat format) {
  FixedMatrix m(n, n, format);
  const std::int64_t one = format.quantize(1.0);
  for (int i = 0; i < n; ++i) {
    m.re(i, i) = one;
  }
  return m;
}

int FixedMatrix::prescale_headroom_bits(const FixedFormat& format) noexcept {
  return std::max(0, format.width - format.frac - 3);
}

FixedMatrix FixedMatrix::from_complex(const CMatrix& m, FixedFormat format) {
  const double norm = m.frobenius_norm();
  if (!std::isfinite(norm)) {
    throw std::invalid_argument("matrix has non-finite entries");
  }
  const int headroom = prescale_headroom_bits(format);
  int exponent = 0;
  if (norm > 0.0) {
    (void)std::frexp(norm, &exponent);  // norm = mantissa * 2^exponent, mantissa in [0.5, 1)
    exponent -= headroom;
  }
  FixedMatrix out(m.rows(), m.cols(), format, exponent);
  // an entry just below the bound may round up onto it; keep every component below
  const std::int64_t top = (std::int64_t{1} << (format.frac + headroom)) - 1;
  const auto ingest = [&](double v) {
    return std::clamp(format.quantize(std::ldexp(v, -exponent)), -top, top);
  };
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out.re(r, c) = ingest(m(r, c).real());
      out.im(r, c) = ingest(m(r, c).imag());
    }
  }
  return out;
}

FixedMatrix FixedMatrix::quantize(const CMatrix& m, FixedFormat format) {
  FixedMatrix out(m.rows(), m.cols(), format, 0);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out.re(r, c) = format.quantize(m(r, c).real());
      out.im(r, c) = format.quantize(m(r, c).imag());
    }
  }
  return out;
}

ComplexFixed FixedMatrix::at(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    throw std::out_of_range("matrix index out of range");
  }
  return {FixedWord{format_, re(r, c)}, FixedWord{format_, im(r, c)}};
}

void FixedMatrix::set(int r, int c, const ComplexFixed& value) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    throw std::out_of_range("matrix index out of range");
  }
  if (!(value.re.format == format_) || !(value.im.format == format_)) {
    throw ConfigError("entry format does not match matrix format");
  }
  re(r, c) = value.re.raw;
  im(r, c) = value.im.raw;
}

CMatrix FixedMatrix::to_complex_unscaled() const {
  CMatrix out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      out(r, c) = {format_.to_double(re(r, c)), format_.to_double(im(r, c))};
    }
  }
  return out;
}

CMatrix FixedMatrix::to_complex() const {
  CMatrix out = to_complex_unscaled();
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      out(r, c) = {std::ldexp(out(r, c).real(), scale_exponent_),
                   std::ldexp(out(r, c).imag(), scale_exponent_)};
    }
  }
  return out;
}

FixedMatrix FixedMatrix::conj_transpose() const {
  FixedMatrix t(cols_, rows_, format_, scale_exponent_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      t.re(c, r) = re(r, c);
      t.im(c, r) = format_.wrap(-im(r, c));
    }
  }
  return t;
}

}  // namespace musiclite
