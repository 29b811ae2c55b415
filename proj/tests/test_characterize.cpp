#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "musiclite/characterize.hpp"
#include "musiclite/errors.hpp"

using namespace musiclite;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string field;
  while (std::getline(s, field, ',')) {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

}  // namespace

TEST_CASE("acla 8/4 exhaustive metrics match the brute-force golden file") {
  std::ifstream f(std::string(MUSICLITE_TEST_DIR) + "/golden/acla8_k4_exhaustive.csv");
  REQUIRE(f);
  std::string header;
  std::string row;
  std::getline(f, header);
  std::getline(f, row);
  CHECK(header == kCharacterizeCsvHeader);

  const AdderModel adder = AdderModel::acla(8, {});
  const ErrorMetrics m = characterize(adder, Exhaustive{});
  const auto want = split(row);
  const auto got = split(characterize_csv_row(adder, m));
  REQUIRE(want.size() == 10);
  REQUIRE(got.size() == 10);
  for (std::size_t i = 0; i < 8; ++i) {  // through wce: bit-exact
    CAPTURE(i);
    CHECK(got[i] == want[i]);
  }
  CHECK(std::stod(got[8]) == doctest::Approx(std::stod(want[8])).epsilon(1e-8));
  CHECK(std::stod(got[9]) == doctest::Approx(std::stod(want[9])).epsilon(1e-8));
}

TEST_CASE("exact adders have zero error") {
  const ErrorMetrics m = characterize(AdderModel::ripple(8), Exhaustive{});
  CHECK(m.exhaustive);
  CHECK(m.sample_count == 65536);
  CHECK(m.error_rate == 0.0);
  CHECK(m.worst_case_error == 0);
  CHECK(m.normalized_error_distance == 0.0);
  const ErrorMetrics s = characterize(AdderModel::cla(32), Sampled{10000, 3});
  CHECK(s.error_rate == 0.0);
  CHECK(s.seed == 3);
}

TEST_CASE("exhaustive cap") {
  CHECK_NOTHROW((void)characterize(AdderModel::ripple(4), Exhaustive{}));
  CHECK_THROWS_AS((void)characterize(AdderModel::ripple(14), Exhaustive{}), ConfigError);
  CHECK_THROWS_AS((void)characterize(AdderModel::ripple(17), Exhaustive{}), ConfigError);
  CHECK_THROWS_AS((void)characterize(AdderModel::ripple(8), Sampled{0, 1}), ConfigError);
}

TEST_CASE("sampled characterization is seeded and converges to the exhaustive one") {
  const AdderModel adder = AdderModel::acla(8, {});
  const ErrorMetrics a = characterize(adder, Sampled{200000, 9});
  const ErrorMetrics b = characterize(adder, Sampled{200000, 9});
  const ErrorMetrics c = characterize(adder, Sampled{200000, 10});
  CHECK(characterize_csv_row(adder, a) == characterize_csv_row(adder, b));
  CHECK(a.mean_absolute_error != c.mean_absolute_error);

  const ErrorMetrics full = characterize(adder, Exhaustive{});
  const double p = full.error_rate;
  CHECK(std::abs(a.error_rate - p) <= 4 * std::sqrt(p * (1 - p) / 200000));
  CHECK(a.worst_case_error <= full.worst_case_error);
}

TEST_CASE("metric definitions on a truncated adder") {
  // trunc:4:1 loses (a0 + b0) whenever both low bits are not zero
  const ErrorMetrics m = characterize(AdderModel::truncated(4, 1), Exhaustive{});
  CHECK(m.error_rate == doctest::Approx(0.75));
  CHECK(m.mean_absolute_error == doctest::Approx(1.0));  // (0 + 1 + 1 + 2) / 4
  CHECK(m.worst_case_error == 2);
  CHECK(m.normalized_error_distance == doctest::Approx(m.mean_absolute_error / 2.0));
  CHECK(m.normalized_mae(4) == doctest::Approx(m.mean_absolute_error / 16.0));
}

TEST_CASE("csv row format") {
  const AdderModel adder = AdderModel::ripple(8);
  CHECK(characterize_csv_row(adder, characterize(adder, Exhaustive{})) ==
        "exact:8,8,exhaustive,65536,,0,0,0,0,0");
  CHECK(characterize_csv_row(adder, characterize(adder, Sampled{5, 42})) ==
        "exact:8,8,sampled,5,42,0,0,0,0,0");
}
