#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "musiclite/dse.hpp"
#include "musiclite/errors.hpp"
#include "oracles/rng.hpp"

using namespace musiclite;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

DsePoint point(const char* name, double err, double area, double power) {
  DsePoint p;
  p.adder = name;
  p.mean_error_pct = err;
  p.area_proxy = area;
  p.power_proxy = power;
  return p;
}

// pairwise definition, written independently of the library
std::vector<bool> dominance_oracle(const std::vector<DsePoint>& pts) {
  std::vector<bool> out(pts.size(), false);
  auto key = [](double e) { return std::isnan(e) ? INFINITY : e; };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double a[3] = {key(pts[j].mean_error_pct), pts[j].area_proxy, pts[j].power_proxy};
      const double b[3] = {key(pts[i].mean_error_pct), pts[i].area_proxy, pts[i].power_proxy};
      int le = 0;
      int lt = 0;
      for (int k = 0; k < 3; ++k) {
        le += a[k] <= b[k] ? 1 : 0;
        lt += a[k] < b[k] ? 1 : 0;
      }
      if (i != j && le == 3 && lt > 0) {
        out[i] = true;
      }
    }
  }
  return out;
}

SweepPlan tiny_plan() {
  SweepPlan p;
  p.adders = {"cla:16", "trunc:16:2"};
  p.snr_db = {5.0, 10.0};
  p.runs = 2;
  p.seed = 3;
  return p;
}

}  // namespace

TEST_CASE("pareto flags agree with the pairwise oracle") {
  auto g = oracle::rng(21);
  std::uniform_int_distribution<int> small(0, 5);
  std::uniform_int_distribution<int> size(1, 64);
  for (int t = 0; t < 300; ++t) {
    std::vector<DsePoint> pts;
    const int n = size(g);
    for (int i = 0; i < n; ++i) {
      // coarse values so ties are common
      const double err = small(g) == 0 ? std::nan("") : small(g);
      pts.push_back(point("p", err, small(g), small(g)));
    }
    pareto_filter(pts);
    const auto want = dominance_oracle(pts);
    for (int i = 0; i < n; ++i) {
      REQUIRE(pts[static_cast<std::size_t>(i)].dominated == want[static_cast<std::size_t>(i)]);
    }
  }
  std::vector<DsePoint> one{point("x", 1, 1, 1)};
  pareto_filter(one);
  CHECK_FALSE(one[0].dominated);
  std::vector<DsePoint> two{point("a", 1, 1, 1), point("b", 2, 2, 2)};
  pareto_filter(two);
  CHECK_FALSE(two[0].dominated);
  CHECK(two[1].dominated);
}

TEST_CASE("aggregates recompute from the run rows") {
  auto g = oracle::rng(22);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<RunRow> rows;
  for (const char* a : {"x", "y"}) {
    for (const double snr : {0.0, 5.0}) {
      for (int run = 0; run < 7; ++run) {
        rows.push_back({a, snr, run, 0, 0.0, u(g), run != 3});
      }
    }
  }
  const auto agg = aggregate(rows);
  REQUIRE(agg.size() == 4);
  for (const AggregateRow& a : agg) {
    std::vector<double> v;
    for (const RunRow& r : rows) {
      if (r.adder == a.adder && r.snr_db == a.snr_db && r.converged) v.push_back(r.abs_error_pct);
    }
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    CHECK(a.runs == 7);
    CHECK(a.converged == 6);
    CHECK(a.mean_abs_error_pct == doctest::Approx(mean));
    CHECK(a.std_abs_error_pct == doctest::Approx(std::sqrt(ss / 5.0)));
  }
  std::vector<RunRow> failed{{"z", 1.0, 0, 0, 0.0, 0.0, false}};
  CHECK(std::isnan(aggregate(failed).front().mean_abs_error_pct));
}

TEST_CASE("sweeps are deterministic and independent of the worker count") {
  const Scenario s;
  const SweepPlan plan = tiny_plan();
  const SweepResult a = run_sweep(plan, s, 1);
  const SweepResult b = run_sweep(plan, s, 3);
  CHECK(runs_csv(a.rows) == runs_csv(b.rows));
  CHECK(aggregates_csv(a.aggregates) == aggregates_csv(b.aggregates));
  REQUIRE(a.rows.size() == 8);
  CHECK(a.rows[0].adder == "cla:16");
  CHECK(a.rows[7].adder == "trunc:16:2");
  // common random numbers: run r at a given SNR uses the same stream for every adder
  CHECK(a.rows[0].seed == a.rows[4].seed);
  CHECK(run_rng(3, 5.0, 1).derived_seed() == a.rows[1].seed);
}

TEST_CASE("tiny plan matches the committed report") {
  const Scenario s;
  const SweepPlan plan = tiny_plan();
  const SweepResult r = run_sweep(plan, s, 1);
  const auto points = build_points(r, plan.adders);
  const auto dir = std::filesystem::temp_directory_path() / "musiclite_test_dse";
  std::filesystem::remove_all(dir);
  emit_report(r, points, dir);
  const std::filesystem::path golden = std::filesystem::path(MUSICLITE_TEST_DIR) / "golden" / "dse_tiny";
  for (const char* f : {"runs.csv", "aggregates.csv", "dse.csv"}) {
    CAPTURE(f);
    CHECK(read_file(dir / f) == read_file(golden / f));
  }
}

TEST_CASE("points, savings and constraints") {
  SweepResult r;
  r.rows = {{"cla:16", 5.0, 0, 0, 50.0, 0.2, true},  {"cla:16", -5.0, 0, 0, 50.0, 9.0, true},
            {"acla:16:4", 5.0, 0, 0, 0.0, 80.0, true}, {"acla:16:4", 10.0, 0, 0, 0.0, 0.0, false},
            {"trunc:16:2", 5.0, 0, 0, 0.0, 0.5, true}};
  const auto pts = build_points(r, {"cla:16", "acla:16:4", "trunc:16:2"});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].mean_error_pct == 0.2);  // the -5 dB run is not in the accuracy objective
  CHECK(pts[0].area_saving_pct == 0.0);
  CHECK(pts[0].power_saving_pct == 0.0);
  CHECK(pts[1].area_saving_pct == doctest::Approx(8.0));
  CHECK(pts[1].converged_fraction == 0.5);
  CHECK(pts[2].area_saving_pct > 0.0);

  QualityConstraints qc = QualityConstraints::parse("max_error_pct=1.0");
  auto sel = apply_constraints(pts, qc);
  REQUIRE(sel.size() == 2);
  CHECK(sel[0].adder == "cla:16");
  qc = QualityConstraints::parse("max_error_pct=1,min_area_saving_pct=5");
  sel = apply_constraints(pts, qc);
  REQUIRE(sel.size() == 1);
  CHECK(sel[0].adder == "trunc:16:2");
  CHECK(apply_constraints(pts, QualityConstraints::parse("max_error_pct=0.01")).empty());

  CHECK_THROWS_AS((void)apply_constraints(pts, QualityConstraints{}), ConfigError);
  const auto no_base = build_points(r, {"acla:16:4", "trunc:16:2"});
  CHECK_FALSE(no_base[0].area_saving_pct.has_value());
  CHECK_THROWS_AS((void)apply_constraints(no_base, qc), ConfigError);
  CHECK_THROWS_AS((void)QualityConstraints::parse("max_error_pct"), ConfigError);
  CHECK_THROWS_AS((void)QualityConstraints::parse("max_error=1"), ConfigError);
  CHECK_THROWS_AS((void)QualityConstraints::parse("max_error_pct=1x"), ConfigError);
}

TEST_CASE("csv output") {
  CHECK(runs_csv({}) == std::string(kRunsHeader) + "\n");
  CHECK(aggregates_csv({}) == std::string(kAggregatesHeader) + "\n");
  CHECK(dse_csv({}) == std::string(kDseHeader) + "\n");
  CHECK(std::string(kDseHeader) ==
        "adder,mean_error_pct,area_proxy,power_proxy,area_saving_pct,power_saving_pct,dominated");
  DsePoint p = point("loa:16:4", 0.5, 154, 77);
  CHECK(dse_csv({p}) == std::string(kDseHeader) + "\nloa:16:4,0.5,154,77,,,0\n");

  const auto dir = std::filesystem::temp_directory_path() / "musiclite_test_empty";
  std::filesystem::remove_all(dir);
  emit_report({}, {}, dir);
  CHECK(read_file(dir / "runs.csv") == std::string(kRunsHeader) + "\n");
  CHECK_THROWS_AS(emit_report({}, {}, "/proc/musiclite_no_such_dir"), std::runtime_error);
}

TEST_CASE("plan validation") {
  SweepPlan p = tiny_plan();
  CHECK_NOTHROW(p.validate());
  p.runs = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = tiny_plan();
  p.snr_db.clear();
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = tiny_plan();
  p.adders.clear();
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
