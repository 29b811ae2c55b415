#include <doctest.h>

#include <cmath>
#include <numbers>

#include "musiclite/cordic.hpp"
#include "musiclite/errors.hpp"
#include "oracles/rng.hpp"

using namespace musiclite;

namespace {

struct Pair {
  double x;
  double y;
};

// random vector with |v| <= 1
Pair random_vector(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double x = u(g);
  double y = u(g);
  const double m = std::hypot(x, y);
  if (m > 1.0) {
    x /= m;
    y /= m;
  }
  return {x, y};
}

double rotation_bound(const CordicConfig& c) {
  const int i = c.iterations();
  return std::ldexp(1.0, -(i - 1)) + i * std::ldexp(1.0, -c.format().frac + 1);
}

// worst component error over random in-range rotations against std::sin/cos
double worst_rotation_error(const CordicConfig& c, int trials, std::uint64_t seed) {
  auto g = oracle::rng(seed);
  const FixedFormat& f = c.format();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double limit = f.to_double(c.angle_limit_raw());
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Pair v = random_vector(g);
    const std::int64_t theta = f.quantize(u(g) * limit);
    const std::int64_t xr = f.quantize(v.x);
    const std::int64_t yr = f.quantize(v.y);
    const RotationRaw r = c.rotate_raw(xr, yr, theta);
    const double th = f.to_double(theta);
    const double x = f.to_double(xr);
    const double y = f.to_double(yr);
    worst = std::max({worst, std::abs(f.to_double(r.x) - (x * std::cos(th) - y * std::sin(th))),
                      std::abs(f.to_double(r.y) - (x * std::sin(th) + y * std::cos(th)))});
  }
  return worst;
}

}  // namespace

TEST_CASE("configuration") {
  const CordicConfig c(FixedFormat{16, 13}, AdderModel::ripple(16));
  CHECK(c.iterations() == 14);
  CHECK(c.rounding() == ShiftRounding::Nearest);
  REQUIRE(c.angle_table().size() == 14);
  for (int i = 0; i < 14; ++i) {
    CHECK(c.angle_table()[static_cast<std::size_t>(i)] ==
          std::llround(std::atan(std::ldexp(1.0, -i)) * 8192.0));
  }
  CHECK(c.gain() == doctest::Approx(1.6467602581));
  CHECK(c.inverse_gain_bits() == 26);
  CHECK(c.half_pi_raw() == std::llround(std::numbers::pi / 2 * 8192.0));
  // the quantized table stops decreasing after F+1 entries
  CHECK(c.angle_table().back() == 1);

  CHECK(CordicConfig(FixedFormat{32, 24}, AdderModel::ripple(32)).iterations() == 25);
  CHECK(CordicConfig(FixedFormat{16, 13}, AdderModel::ripple(16), 10).iterations() == 10);
  CHECK_THROWS_AS(CordicConfig(FixedFormat{16, 13}, AdderModel::ripple(16), 63), ConfigError);
  CHECK_THROWS_AS(CordicConfig(FixedFormat{16, 13}, AdderModel::ripple(12)), ConfigError);
}

TEST_CASE("rotation error stays within the iteration and rounding bound") {
  for (const ShiftRounding mode : {ShiftRounding::Nearest, ShiftRounding::Truncate}) {
    for (const FixedFormat f : {FixedFormat{16, 13}, FixedFormat{32, 24}, FixedFormat{24, 20}}) {
      const CordicConfig c(f, AdderModel::ripple(f.width), 0, mode);
      CAPTURE(f.width);
      CHECK(worst_rotation_error(c, 5000, 1) <= rotation_bound(c));
    }
  }
}

TEST_CASE("round-to-nearest removes the truncation drift") {
  // mean signed error of x over many rotations
  const FixedFormat f{16, 13};
  auto bias = [&](ShiftRounding mode) {
    const CordicConfig c(f, AdderModel::ripple(16), 0, mode);
    auto g = oracle::rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double sum = 0.0;
    for (int t = 0; t < 20000; ++t) {
      const Pair v = random_vector(g);
      const std::int64_t theta = f.quantize(u(g));
      const double th = f.to_double(theta);
      const std::int64_t xr = f.quantize(v.x);
      const std::int64_t yr = f.quantize(v.y);
      const RotationRaw r = c.rotate_raw(xr, yr, theta);
      sum += f.to_double(r.x) - (f.to_double(xr) * std::cos(th) - f.to_double(yr) * std::sin(th));
    }
    return std::abs(sum / 20000) / f.lsb();
  };
  CHECK(bias(ShiftRounding::Nearest) < 0.25);
  CHECK(bias(ShiftRounding::Truncate) > 4 * bias(ShiftRounding::Nearest));
}

TEST_CASE("rotation mode rejects angles beyond the convergence range") {
  const CordicConfig c(FixedFormat{16, 13}, AdderModel::ripple(16));
  CHECK_THROWS_AS((void)c.rotate_raw(100, 0, c.angle_limit_raw() + 1), std::domain_error);
  CHECK_NOTHROW((void)c.rotate_raw(100, 0, -c.angle_limit_raw()));
}

TEST_CASE("prepared rotations cover the full circle") {
  const FixedFormat f{16, 13};
  const CordicConfig c(f, AdderModel::ripple(16));
  auto g = oracle::rng(4);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (int t = 0; t < 2000; ++t) {
    const Pair v = random_vector(g);
    const std::int64_t theta = f.quantize(u(g));
    const PreparedRotation p = c.prepare(theta);
    CHECK(std::abs(p.residual) <= c.angle_limit_raw());
    const std::int64_t xr = f.quantize(v.x);
    const std::int64_t yr = f.quantize(v.y);
    const RotationRaw r = c.apply(p, xr, yr);
    const double th = f.to_double(theta);
    const double x = f.to_double(xr);
    const double y = f.to_double(yr);
    CHECK(std::abs(f.to_double(r.x) - (x * std::cos(th) - y * std::sin(th))) <= rotation_bound(c));
    CHECK(std::abs(f.to_double(r.y) - (x * std::sin(th) + y * std::cos(th))) <= rotation_bound(c));
  }
}

TEST_CASE("vectoring returns magnitude and angle") {
  const FixedFormat f{16, 13};
  const CordicConfig c(f, AdderModel::ripple(16));
  auto g = oracle::rng(6);
  for (int t = 0; t < 5000; ++t) {
    const Pair v = random_vector(g);
    const std::int64_t xr = f.quantize(v.x);
    const std::int64_t yr = f.quantize(v.y);
    const VectorRaw r = c.vector_raw(xr, yr);
    const double x = f.to_double(xr);
    const double y = f.to_double(yr);
    CHECK(std::abs(f.to_double(r.magnitude) - std::hypot(x, y)) <= rotation_bound(c));
    if (std::hypot(x, y) > 0.05) {
      // the residual y after the last iteration is a few LSB, so the angle
      // error scales with 1/|v|
      double d = f.to_double(r.angle) - std::atan2(y, x);
      d = std::remainder(d, 2 * std::numbers::pi);
      CHECK(std::abs(d) <= rotation_bound(c) / std::hypot(x, y));
    }
  }
  const VectorRaw zero = c.vector_raw(0, 0);
  CHECK(zero.magnitude == 0);
  CHECK(zero.angle == 0);
}

TEST_CASE("rotating by theta then by -theta returns the vector") {
  const FixedFormat f{16, 13};
  const CordicConfig c(f, AdderModel::ripple(16));
  auto g = oracle::rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int t = 0; t < 2000; ++t) {
    const Pair v = random_vector(g);
    const std::int64_t theta = f.quantize(u(g));
    const std::int64_t xr = f.quantize(v.x);
    const std::int64_t yr = f.quantize(v.y);
    const RotationRaw there = c.rotate_raw(xr, yr, theta);
    const RotationRaw back = c.rotate_raw(there.x, there.y, -theta);
    CHECK(std::abs(back.x - xr) <= 8);
    CHECK(std::abs(back.y - yr) <= 8);
  }
}

TEST_CASE("gain compensation divides by the CORDIC gain") {
  const FixedFormat f{16, 13};
  for (const ShiftRounding mode : {ShiftRounding::Nearest, ShiftRounding::Truncate}) {
    const CordicConfig c(f, AdderModel::ripple(16), 0, mode);
    for (std::int64_t v = -16000; v <= 16000; v += 37) {
      CHECK(std::abs(static_cast<double>(c.compensate_raw(v)) - v / c.gain()) <= 1.0);
    }
  }
  const CordicConfig c(f, AdderModel::ripple(16));
  CHECK(std::abs(gain_compensate(FixedWord{f, 8192}, c).raw - 8192 / c.gain()) <= 1.0);
}

TEST_CASE("word-level wrappers check formats") {
  const FixedFormat f{16, 13};
  const CordicConfig c(f, AdderModel::ripple(16));
  const auto [x, y] = cordic_rotate(FixedWord::from_double(0.5, f), FixedWord::from_double(0.0, f),
                                    FixedWord::from_double(std::numbers::pi / 6, f), c);
  CHECK(x.to_double() == doctest::Approx(0.5 * std::cos(std::numbers::pi / 6)).epsilon(0.002));
  CHECK(y.to_double() == doctest::Approx(0.25).epsilon(0.002));
  const CordicVectorResult v =
      cordic_vector(FixedWord::from_double(0.3, f), FixedWord::from_double(0.4, f), c);
  CHECK(v.magnitude.to_double() == doctest::Approx(0.5).epsilon(0.002));
  const FixedWord other{FixedFormat{16, 12}, 1};
  CHECK_THROWS_AS((void)cordic_vector(other, other, c), ConfigError);
}

TEST_CASE("approximate adders still produce bounded rotations") {
  const FixedFormat f{16, 13};
  const CordicConfig c(f, AdderModel::acla(16, {}));
  auto g = oracle::rng(9);
  for (int t = 0; t < 1000; ++t) {
    const Pair v = random_vector(g);
    const RotationRaw r = c.rotate_raw(f.quantize(v.x), f.quantize(v.y), f.quantize(0.7));
    CHECK(r.x >= f.raw_min());
    CHECK(r.x <= f.raw_max());
  }
}
