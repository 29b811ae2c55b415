#include "musiclite/gk_svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "musiclite/errors.hpp"

namespace musiclite {

NonConvergence::NonConvergence(double residual, int sweeps)
    : std::runtime_error("SVD diagonalization did not converge after " + std::to_string(sweeps) +
                         " sweeps (residual superdiagonal " + std::to_string(residual) + ")"),
      residual_(residual),
      sweeps_(sweeps) {}

namespace {

void check_format(const FixedFormat& f, const CordicConfig& cfg) {
  if (!(f == cfg.format())) {
    throw ConfigError("matrix format does not match the CORDIC configuration");
  }
}

// ---- rotation kernels --------------------------------------------------------
//
// Each applies one prepared rotation (by -theta) to a set of pairs. Complex
// entries rotate their real and imaginary parts as two independent pairs.

void rotate_rows(FixedMatrix& m, int p, int q, int c0, int c1, const PreparedRotation& rot,
                 const CordicConfig& cfg) {
  for (int c = c0; c < c1; ++c) {
    const RotationRaw re = cfg.apply(rot, m.re(p, c), m.re(q, c));
    const RotationRaw im = cfg.apply(rot, m.im(p, c), m.im(q, c));
    m.re(p, c) = re.x;
    m.re(q, c) = re.y;
    m.im(p, c) = im.x;
    m.im(q, c) = im.y;
  }
}

void rotate_cols(FixedMatrix& m, int p, int q, int r0, int r1, const PreparedRotation& rot,
                 const CordicConfig& cfg) {
  for (int r = r0; r < r1; ++r) {
    const RotationRaw re = cfg.apply(rot, m.re(r, p), m.re(r, q));
    const RotationRaw im = cfg.apply(rot, m.im(r, p), m.im(r, q));
    m.re(r, p) = re.x;
    m.re(r, q) = re.y;
    m.im(r, p) = im.x;
    m.im(r, q) = im.y;
  }
}

// multiplies entries by exp(-j*phi)
void phase_row(FixedMatrix& m, int r, int c0, int c1, const PreparedRotation& rot,
               const CordicConfig& cfg) {
  for (int c = c0; c < c1; ++c) {
    const RotationRaw v = cfg.apply(rot, m.re(r, c), m.im(r, c));
    m.re(r, c) = v.x;
    m.im(r, c) = v.y;
  }
}

void phase_col(FixedMatrix& m, int c, int r0, int r1, const PreparedRotation& rot,
               const CordicConfig& cfg) {
  for (int r = r0; r < r1; ++r) {
    const RotationRaw v = cfg.apply(rot, m.re(r, c), m.im(r, c));
    m.re(r, c) = v.x;
    m.im(r, c) = v.y;
  }
}

PreparedRotation undo(std::int64_t angle, const CordicConfig& cfg) {
  return cfg.prepare(cfg.arith().negate(angle));
}

// The vectoring pass only supplies the angle. The pivot pair itself goes
// through the same rotation as every other pair: the vectoring magnitude
// carries a systematic upward bias from the truncating shifts, and that bias
// compounds over sweeps.
std::int64_t pivot(const PreparedRotation& rot, std::int64_t keep, std::int64_t zero,
                   const CordicConfig& cfg) {
  return cfg.apply(rot, keep, zero).x;
}

// ---- bidiagonalization ---------------------------------------------------------

class Bidiagonalizer {
 public:
  Bidiagonalizer(FixedMatrix& a, FixedMatrix* uh, FixedMatrix* v, const CordicConfig& cfg)
      : a_(a), uh_(uh), v_(v), cfg_(cfg), m_(a.rows()), n_(a.cols()) {}

  void run() {
    for (int j = 0; j < n_; ++j) {
      eliminate_column(j);
      if (j + 1 < n_) {
        eliminate_row(j);
      }
    }
  }

 private:
  // makes A(r, j) real nonnegative by a phase rotation of row r
  void real_row_entry(int r, int j) {
    if (a_.im(r, j) == 0 && a_.re(r, j) >= 0) {
      return;
    }
    const PreparedRotation rot = undo(cfg_.vector_raw(a_.re(r, j), a_.im(r, j)).angle, cfg_);
    phase_row(a_, r, j + 1, n_, rot, cfg_);
    if (uh_ != nullptr) {
      phase_row(*uh_, r, 0, m_, rot, cfg_);
    }
    a_.re(r, j) = pivot(rot, a_.re(r, j), a_.im(r, j), cfg_);
    a_.im(r, j) = 0;
  }

  // makes A(j, c) real nonnegative by a phase rotation of column c
  void real_col_entry(int j, int c) {
    if (a_.im(j, c) == 0 && a_.re(j, c) >= 0) {
      return;
    }
    const PreparedRotation rot = undo(cfg_.vector_raw(a_.re(j, c), a_.im(j, c)).angle, cfg_);
    phase_col(a_, c, j + 1, m_, rot, cfg_);
    if (v_ != nullptr) {
      phase_col(*v_, c, 0, n_, rot, cfg_);
    }
    a_.re(j, c) = pivot(rot, a_.re(j, c), a_.im(j, c), cfg_);
    a_.im(j, c) = 0;
  }

  // zeroes column j below the diagonal, bottom-up
  void eliminate_column(int j) {
    real_row_entry(m_ - 1, j);
    for (int i = m_ - 1; i > j; --i) {
      real_row_entry(i - 1, j);
      if (a_.re(i, j) == 0) {
        continue;
      }
      const PreparedRotation rot = undo(cfg_.vector_raw(a_.re(i - 1, j), a_.re(i, j)).angle, cfg_);
      rotate_rows(a_, i - 1, i, j + 1, n_, rot, cfg_);
      if (uh_ != nullptr) {
        rotate_rows(*uh_, i - 1, i, 0, m_, rot, cfg_);
      }
      a_.re(i - 1, j) = pivot(rot, a_.re(i - 1, j), a_.re(i, j), cfg_);
      a_.re(i, j) = 0;
    }
  }

  // zeroes row j right of the superdiagonal, right-to-left
  void eliminate_row(int j) {
    real_col_entry(j, n_ - 1);
    for (int k = n_ - 1; k > j + 1; --k) {
      real_col_entry(j, k - 1);
      if (a_.re(j, k) == 0) {
        continue;
      }
      const PreparedRotation rot = undo(cfg_.vector_raw(a_.re(j, k - 1), a_.re(j, k)).angle, cfg_);
      rotate_cols(a_, k - 1, k, j + 1, m_, rot, cfg_);
      if (v_ != nullptr) {
        rotate_cols(*v_, k - 1, k, 0, n_, rot, cfg_);
      }
      a_.re(j, k - 1) = pivot(rot, a_.re(j, k - 1), a_.re(j, k), cfg_);
      a_.re(j, k) = 0;
    }
  }

  FixedMatrix& a_;
  FixedMatrix* uh_;
  FixedMatrix* v_;
  const CordicConfig& cfg_;
  int m_;
  int n_;
};

Bidiagonal extract_bidiagonal(const FixedMatrix& a) {
  const int n = a.cols();
  Bidiagonal b{a.format(), std::vector<std::int64_t>(static_cast<std::size_t>(n)),
               std::vector<std::int64_t>(static_cast<std::size_t>(n - 1))};
  for (int j = 0; j < n; ++j) {
    b.diag[static_cast<std::size_t>(j)] = a.re(j, j);
    if (j + 1 < n) {
      b.super[static_cast<std::size_t>(j)] = a.re(j, j + 1);
    }
  }
  return b;
}

// ---- diagonalization -----------------------------------------------------------

class Diagonalizer {
 public:
  Diagonalizer(std::vector<std::int64_t>& d, std::vector<std::int64_t>& e, FixedMatrix* uh,
               FixedMatrix* v, const CordicConfig& cfg, const SvdOptions& options)
      : d_(d),
        e_(e),
        uh_(uh),
        v_(v),
        cfg_(cfg),
        n_(static_cast<int>(d.size())),
        shift_(cfg.format().frac - options.threshold_shift),
        floor_(noise_floor(d, e, cfg, options)),
        cap_(options.sweeps_per_dimension * static_cast<int>(d.size())) {
    if (options.threshold_shift < 0 || options.threshold_shift >= cfg.format().frac) {
      throw ConfigError("SVD threshold shift must be in [0, F)");
    }
    if (options.noise_floor_lsb < 0 || options.sweeps_per_dimension < 1) {
      throw ConfigError("SVD noise floor must be >= 0 and the sweep factor >= 1");
    }
  }

  int run() {
    int hi = n_ - 1;
    while (hi > 0) {
      deflate();
      while (hi > 0 && e(hi - 1) == 0) {
        --hi;
      }
      if (hi == 0) {
        break;
      }
      int lo = hi - 1;
      while (lo > 0 && e(lo - 1) != 0) {
        --lo;
      }
      if (lo != block_lo_ || hi != block_hi_) {
        block_lo_ = lo;
        block_hi_ = hi;
        shift_hi_ = hi;
        unshifted_next_ = false;
      }
      if (sweeps_ >= cap_) {
        std::int64_t worst = 0;
        for (std::int64_t x : e_) {
          worst = std::max(worst, x < 0 ? -x : x);
        }
        throw NonConvergence(cfg_.format().to_double(worst), sweeps_);
      }
      ++sweeps_;
      step(lo, hi);
    }
    return sweeps_;
  }

 private:
  // Rounding noise of one rotation plus its angle-resolution error, which
  // grows with the size of the rotated values.
  static std::int64_t noise_floor(const std::vector<std::int64_t>& d,
                                  const std::vector<std::int64_t>& e, const CordicConfig& cfg,
                                  const SvdOptions& options) {
    std::int64_t base = options.noise_floor_lsb > 0 ? options.noise_floor_lsb : 2 * cfg.iterations();
    std::int64_t largest = 0;
    for (std::int64_t x : d) largest = std::max(largest, abs(x));
    for (std::int64_t x : e) largest = std::max(largest, abs(x));
    return base + (largest >> std::max(0, cfg.iterations() - 2));
  }

  std::int64_t& d(int i) { return d_[static_cast<std::size_t>(i)]; }
  std::int64_t& e(int i) { return e_[static_cast<std::size_t>(i)]; }

  static std::int64_t abs(std::int64_t x) { return x < 0 ? -x : x; }

  bool negligible(std::int64_t x) const { return abs(x) <= floor_; }

  // superdiagonal entries below the threshold become exact zeros
  void deflate() {
    for (int i = 0; i + 1 < n_; ++i) {
      const std::int64_t x = abs(e(i));
      if (x == 0) {
        continue;
      }
      const std::int64_t scale = abs(d(i)) + abs(d(i + 1));
      if (x <= floor_ || x <= (scale >> shift_)) {
        e(i) = 0;
      }
    }
  }

  void left(int p, int q, const PreparedRotation& rot) {
    if (uh_ != nullptr) {
      rotate_rows(*uh_, p, q, 0, uh_->cols(), rot, cfg_);
    }
  }

  void right(int p, int q, const PreparedRotation& rot) {
    if (v_ != nullptr) {
      rotate_cols(*v_, p, q, 0, v_->rows(), rot, cfg_);
    }
  }

  void step(int lo, int hi) {
    for (int k = lo; k < hi; ++k) {
      if (negligible(d(k))) {
        d(k) = 0;
        chase_row(k, hi);
        return;
      }
    }
    if (negligible(d(hi))) {
      d(hi) = 0;
      chase_column(lo, hi);
      return;
    }
    const std::int64_t before = coupling(lo, hi);
    const int reached = qr_sweep(lo, hi, shift_hi_, unshifted_next_);
    unshifted_next_ = !unshifted_next_ && coupling(lo, hi) >= before;
    // A chase that died early (its bulge underflowed) never touched the rows
    // below `reached`; aim the next shift at the part it did reach.
    shift_hi_ = reached < hi ? std::max(reached, lo + 1) : hi;
  }

  // sum of |e| over the block
  std::int64_t coupling(int lo, int hi) {
    std::int64_t sum = 0;
    for (int k = lo; k < hi; ++k) {
      sum += abs(e(k));
    }
    return sum;
  }

  // d_k = 0: rotate row k against rows k+1..hi until its superdiagonal entry is gone
  void chase_row(int k, int hi) {
    std::int64_t x = e(k);
    e(k) = 0;
    for (int j = k + 1; j <= hi && x != 0; ++j) {
      const PreparedRotation rot = undo(cfg_.vector_raw(d(j), x).angle, cfg_);
      d(j) = pivot(rot, d(j), x, cfg_);
      x = 0;
      if (j < hi) {
        const RotationRaw r = cfg_.apply(rot, e(j), 0);
        e(j) = r.x;
        x = r.y;
      }
      left(j, k, rot);
    }
  }

  // d_hi = 0: rotate column hi against columns hi-1..lo
  void chase_column(int lo, int hi) {
    std::int64_t x = e(hi - 1);
    e(hi - 1) = 0;
    for (int j = hi - 1; j >= lo && x != 0; --j) {
      const PreparedRotation rot = undo(cfg_.vector_raw(d(j), x).angle, cfg_);
      d(j) = pivot(rot, d(j), x, cfg_);
      x = 0;
      if (j > lo) {
        const RotationRaw r = cfg_.apply(rot, e(j - 1), 0);
        e(j - 1) = r.x;
        x = r.y;
      }
      right(j, hi, rot);
    }
  }

  // Direction of the first rotation of an implicit Wilkinson-shift sweep. The
  // shift is scalar bookkeeping evaluated on the host; the rotation angle
  // itself comes from the CORDIC vectoring datapath.
  std::int64_t first_angle(int lo, int hi, bool unshifted) {
    // shift from the trailing 2x2 of B^T B restricted to rows/cols lo..hi
    const FixedFormat& f = cfg_.format();
    const double dl = f.to_double(d(hi - 1));
    const double dh = f.to_double(d(hi));
    const double el = f.to_double(e(hi - 1));
    const double ell = hi - 1 > lo ? f.to_double(e(hi - 2)) : 0.0;
    const double t11 = dl * dl + ell * ell;
    const double t12 = dl * el;
    const double t22 = dh * dh + el * el;
    double mu = t22;
    if (t12 != 0.0) {
      const double delta = 0.5 * (t11 - t22);
      const double root = std::hypot(delta, t12);
      mu = t22 - t12 * t12 / (delta + (delta >= 0.0 ? root : -root));
    }
    const double d0 = f.to_double(d(lo));
    const double z = d0 * f.to_double(e(lo));
    const auto direction = [&](double y) -> std::optional<std::int64_t> {
      const double scale = std::max(std::abs(y), std::abs(z));
      if (scale == 0.0) {
        return std::int64_t{0};
      }
      const std::int64_t qz = f.quantize(0.5 * z / scale);
      if (qz == 0) {
        return std::nullopt;
      }
      return cfg_.vector_raw(f.quantize(0.5 * y / scale), qz).angle;
    };
    // A shifted first rotation within an angle LSB of 0 or pi quantizes to a
    // plain identity or sign flip and the sweep stalls; so does one that the
    // previous sweep showed to make no progress. The unshifted rotation always
    // moves the block.
    if (!unshifted) {
      if (const auto angle = direction(d0 * d0 - mu)) {
        return *angle;
      }
    }
    return direction(d0 * d0).value_or(0);
  }

  // Returns the last row the chase reached.
  int qr_sweep(int lo, int hi, int shift_hi, bool unshifted) {
    std::int64_t bulge = 0;
    for (int k = lo; k < hi; ++k) {
      // right rotation on columns k, k+1 (for k > lo the bulge is nonzero here)
      PreparedRotation rot;
      if (k == lo) {
        rot = undo(first_angle(lo, shift_hi, unshifted), cfg_);
      } else {
        rot = undo(cfg_.vector_raw(e(k - 1), bulge).angle, cfg_);
        e(k - 1) = pivot(rot, e(k - 1), bulge, cfg_);
      }
      const RotationRaw top = cfg_.apply(rot, d(k), e(k));
      const RotationRaw low = cfg_.apply(rot, 0, d(k + 1));
      d(k) = top.x;
      e(k) = top.y;
      bulge = low.x;
      d(k + 1) = low.y;
      right(k, k + 1, rot);

      // left rotation on rows k, k+1 removes the bulge below the diagonal
      if (bulge == 0) {
        return k;
      }
      const PreparedRotation lrot = undo(cfg_.vector_raw(d(k), bulge).angle, cfg_);
      d(k) = pivot(lrot, d(k), bulge, cfg_);
      const RotationRaw mid = cfg_.apply(lrot, e(k), d(k + 1));
      e(k) = mid.x;
      d(k + 1) = mid.y;
      bulge = 0;
      if (k + 1 < hi) {
        const RotationRaw next = cfg_.apply(lrot, 0, e(k + 1));
        bulge = next.x;
        e(k + 1) = next.y;
      }
      left(k, k + 1, lrot);
      if (bulge == 0) {
        return k + 1;
      }
    }
    return hi;
  }

  std::vector<std::int64_t>& d_;
  std::vector<std::int64_t>& e_;
  FixedMatrix* uh_;
  FixedMatrix* v_;
  const CordicConfig& cfg_;
  int n_;
  int shift_;
  std::int64_t floor_;
  int cap_;
  int sweeps_ = 0;
  int block_lo_ = -1;
  int block_hi_ = -1;
  int shift_hi_ = -1;
  bool unshifted_next_ = false;
};

// Negative singular values flip sign together with their right vector.
void fix_signs(std::vector<std::int64_t>& s, FixedMatrix* v, const FixedFormat& f) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= 0) {
      continue;
    }
    s[i] = f.wrap(-s[i]);
    if (v != nullptr) {
      const int c = static_cast<int>(i);
      for (int r = 0; r < v->rows(); ++r) {
        v->re(r, c) = f.wrap(-v->re(r, c));
        v->im(r, c) = f.wrap(-v->im(r, c));
      }
    }
  }
}

SvdResult svd_tall(const FixedMatrix& a, const CordicConfig& cfg, const SvdOptions& options) {
  const int m = a.rows();
  const int n = a.cols();
  const FixedFormat& f = a.format();
  FixedMatrix work = a;
  FixedMatrix uh = FixedMatrix::identity(m, f);
  FixedMatrix v = FixedMatrix::identity(n, f);
  FixedMatrix* uh_ptr = options.compute_u ? &uh : nullptr;
  FixedMatrix* v_ptr = options.compute_v ? &v : nullptr;

  Bidiagonalizer(work, uh_ptr, v_ptr, cfg).run();
  Bidiagonal b = extract_bidiagonal(work);
  const int sweeps = Diagonalizer(b.diag, b.super, uh_ptr, v_ptr, cfg, options).run();
  fix_signs(b.diag, v_ptr, f);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return b.diag[static_cast<std::size_t>(x)] > b.diag[static_cast<std::size_t>(y)];
  });

  SvdResult result{FixedMatrix(m, m, f), {}, FixedMatrix(n, n, f), a.scale_exponent(), sweeps};
  result.s.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    result.s.push_back(FixedWord{f, b.diag[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]});
  }
  // U = UH^H with its first n columns permuted like S
  for (int c = 0; c < m; ++c) {
    const int src = c < n ? order[static_cast<std::size_t>(c)] : c;
    for (int r = 0; r < m; ++r) {
      result.u.re(r, c) = uh.re(src, r);
      result.u.im(r, c) = f.wrap(-uh.im(src, r));
    }
  }
  for (int c = 0; c < n; ++c) {
    const int src = order[static_cast<std::size_t>(c)];
    for (int r = 0; r < n; ++r) {
      result.v.re(r, c) = v.re(r, src);
      result.v.im(r, c) = v.im(r, src);
    }
  }
  if (!options.compute_u) {
    result.u = FixedMatrix::identity(m, f);
  }
  if (!options.compute_v) {
    result.v = FixedMatrix::identity(n, f);
  }
  return result;
}

}  // namespace

// ---- public operations ---------------------------------------------------------

GivensRotation givens_from(const FixedWord& keep, const FixedWord& zero, const CordicConfig& cfg) {
  const CordicVectorResult v = cordic_vector(keep, zero, cfg);
  return {v.magnitude, v.angle};
}

std::pair<FixedWord, FixedWord> apply_givens(const GivensRotation& rotation, const FixedWord& x,
                                             const FixedWord& y, const CordicConfig& cfg) {
  check_format(x.format, cfg);
  check_format(y.format, cfg);
  if (rotation.angle.raw == 0) {
    return {x, y};
  }
  const RotationRaw r = cfg.apply(undo(rotation.angle.raw, cfg), x.raw, y.raw);
  return {FixedWord{cfg.format(), r.x}, FixedWord{cfg.format(), r.y}};
}

PhaseNormalization phase_normalize(const ComplexFixed& entry, const CordicConfig& cfg) {
  const CordicVectorResult v = cordic_vector(entry.re, entry.im, cfg);
  return {v.magnitude, v.angle};
}

BidiagonalForm bidiagonalize(const FixedMatrix& a, const CordicConfig& cfg) {
  check_format(a.format(), cfg);
  if (a.rows() < a.cols()) {
    throw std::invalid_argument("bidiagonalize requires rows >= cols");
  }
  FixedMatrix work = a;
  FixedMatrix uh = FixedMatrix::identity(a.rows(), a.format());
  FixedMatrix v = FixedMatrix::identity(a.cols(), a.format());
  Bidiagonalizer(work, &uh, &v, cfg).run();
  return {std::move(uh), extract_bidiagonal(work), std::move(v)};
}

DiagonalForm diagonalize(const Bidiagonal& b, const CordicConfig& cfg, const SvdOptions& options) {
  check_format(b.format, cfg);
  const std::size_t n = b.diag.size();
  if (n == 0 || b.super.size() + 1 != n) {
    throw std::invalid_argument("bidiagonal needs n diagonal and n-1 superdiagonal entries");
  }
  const int ni = static_cast<int>(n);
  DiagonalForm out{FixedMatrix::identity(ni, b.format), b.diag, FixedMatrix::identity(ni, b.format), 0};
  std::vector<std::int64_t> e = b.super;
  out.sweeps = Diagonalizer(out.s, e, &out.p_h, &out.q, cfg, options).run();
  fix_signs(out.s, &out.q, b.format);
  return out;
}

SvdResult svd(const FixedMatrix& a, const CordicConfig& cfg, const SvdOptions& options) {
  check_format(a.format(), cfg);
  if (a.rows() >= a.cols()) {
    return svd_tall(a, cfg, options);
  }
  // A^H = U' S V'^H  =>  A = V' S U'^H
  SvdOptions swapped = options;
  std::swap(swapped.compute_u, swapped.compute_v);
  SvdResult t = svd_tall(a.conj_transpose(), cfg, swapped);
  return {std::move(t.v), std::move(t.s), std::move(t.u), t.scale_exponent, t.sweeps};
}

std::vector<double> SvdResult::singular_values() const {
  std::vector<double> out;
  out.reserve(s.size());
  for (const FixedWord& w : s) {
    out.push_back(std::ldexp(w.to_double(), scale_exponent));
  }
  return out;
}

CMatrix SvdResult::reconstruct() const {
  const CMatrix uc = u.to_complex_unscaled();
  const CMatrix vc = v.to_complex_unscaled();
  CMatrix us(u.rows(), v.rows());
  const std::vector<double> sv = singular_values();
  for (int r = 0; r < u.rows(); ++r) {
    for (std::size_t k = 0; k < sv.size(); ++k) {
      us(r, static_cast<int>(k)) = uc(r, static_cast<int>(k)) * sv[k];
    }
  }
  return us * vc.conj_transpose();
}

}  // namespace musiclite
