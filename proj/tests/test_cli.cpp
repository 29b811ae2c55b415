#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "musiclite/errors.hpp"
#include "musiclite_cli/app.hpp"
#include "musiclite_cli/config.hpp"

using namespace musiclite;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / "musiclite_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("version and help") {
  const Outcome v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(contains(v.out, "music_lite 0.1.0"));
  const Outcome h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(contains(h.out, "characterize"));
  CHECK(contains(h.out, "svd-check"));
  CHECK(run({}).code == cli::kExitConfig);
  CHECK(run({"frobnicate"}).code == cli::kExitConfig);
}

TEST_CASE("characterize") {
  const Outcome exact = run({"characterize", "--adder", "exact:8", "--exhaustive"});
  CHECK(exact.code == 0);
  CHECK(exact.out == "adder,width,mode,samples,seed,er,mae,wce,mre,ned\nexact:8,8,exhaustive,65536,,0,0,0,0,0\n");
  CHECK(contains(exact.err, "ER 0"));

  const Outcome sampled = run({"characterize", "--adder", "acla:16:4", "--sampled", "4194304", "--seed", "7"});
  CHECK(sampled.code == 0);
  CHECK(contains(sampled.out,
                 "acla:16:4,16,sampled,4194304,7,0.087187767,2044.65948,65792,0.0312648625,0.0310776308\n"));

  const Outcome capped = run({"characterize", "--adder", "exact:17", "--exhaustive"});
  CHECK(capped.code == cli::kExitConfig);
  CHECK(contains(capped.err, "cap is 2^26"));

  CHECK(run({"characterize", "--adder", "exact:8"}).code == cli::kExitConfig);
  CHECK(run({"characterize", "--adder", "bogus:8", "--exhaustive"}).code == cli::kExitConfig);

  const fs::path file = scratch("char.csv");
  CHECK(run({"characterize", "--adder", "exact:4", "--exhaustive", "--output", file.string()}).code == 0);
  CHECK(contains(read_file(file), "exact:4,4,exhaustive,256"));
}

TEST_CASE("simulate") {
  const Outcome clean = run({"simulate", "--no-noise"});
  CHECK(clean.code == 0);
  CHECK(contains(clean.out, "estimated_range_m=49.996638\n"));  // grid point 1601
  CHECK(contains(clean.out, "converged=true"));
  CHECK(contains(clean.err, "cyclic prefix"));

  const Outcome noisy = run({"simulate", "--snr", "0", "--seed", "42"});
  CHECK(noisy.code == 0);
  CHECK(contains(noisy.out, "estimated_range_m=50.059095\n"));
  CHECK(run({"simulate", "--snr", "0", "--seed", "42"}).out == noisy.out);

  const fs::path spectrum = scratch("spectrum.csv");
  CHECK(run({"simulate", "--no-noise", "--spectrum", spectrum.string()}).code == 0);
  const std::string csv = read_file(spectrum);
  CHECK(csv.rfind("range_m,p_mu\n0,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5001);

  CHECK(run({"simulate", "--adder", "exact:32"}).code == cli::kExitConfig);
}

TEST_CASE("config files") {
  const fs::path dir = scratch("configs");
  fs::create_directories(dir);

  write_file(dir / "bad.json", "{\"ofdm\": {\"n_subcarriers\": 32,}\n");
  const Outcome malformed = run({"simulate", "--config", (dir / "bad.json").string()});
  CHECK(malformed.code == cli::kExitConfig);
  CHECK(contains(malformed.err, "line 1, column"));

  write_file(dir / "typo.json", R"({"scene": {"target_rang_m": 40}})");
  const Outcome typo = run({"simulate", "--config", (dir / "typo.json").string()});
  CHECK(typo.code == cli::kExitConfig);
  CHECK(contains(typo.err, "target_rang_m"));

  CHECK(run({"simulate", "--config", (dir / "missing.json").string()}).code == cli::kExitConfig);

  write_file(dir / "seeded.json", R"({"scene": {"snr_db": 0}, "sweep": {"seed": 42}, "adder": "exact:16"})");
  const Outcome from_config = run({"simulate", "--config", (dir / "seeded.json").string()});
  CHECK(contains(from_config.out, "estimated_range_m=50.059095\n"));
  const Outcome overridden = run({"simulate", "--config", (dir / "seeded.json").string(), "--seed", "3"});
  CHECK(contains(overridden.out, "seed=3\n"));
  CHECK(contains(overridden.out, "estimated_range_m=49.934181\n"));

  CHECK_THROWS_AS((void)cli::parse_config(R"({"adder": "exact:16", "adders": ["cla:16"]})"), ConfigError);
  CHECK_THROWS_AS((void)cli::parse_config(R"({"cordic": {"rounding": "up"}})"), ConfigError);
  CHECK_THROWS_AS((void)cli::parse_config(R"({"sweep": {"runs": "many"}})"), ConfigError);
  CHECK_THROWS_AS((void)cli::parse_config(R"({"ofdm": {"modulation": "16-QAM"}})"), ConfigError);
  CHECK_THROWS_AS((void)cli::parse_config("[]"), ConfigError);

  const cli::CliConfig defaults = cli::parse_config("{}");
  CHECK(defaults.scenario.ofdm.n_subcarriers == 32);
  CHECK(defaults.adders == std::vector<std::string>{"exact:16"});
  CHECK(cli::dump_config(cli::parse_config(cli::dump_config(defaults))) == cli::dump_config(defaults));
  const cli::CliConfig custom = cli::parse_config(
      R"({"cordic": {"width": 32, "frac": 24, "rounding": "truncate"}, "adders": ["cla:32", "acla:32:8"],
          "music": {"range_max_m": 100, "grid_points": 1000}, "output": {"dir": "x", "spectrum": "s.csv"}})");
  CHECK(custom.scenario.format.width == 32);
  CHECK(custom.scenario.rounding == ShiftRounding::Truncate);
  CHECK(custom.sweep.adders.size() == 2);
  CHECK(*custom.scenario.music.range_max_m == 100.0);
  CHECK(custom.output.spectrum->string() == "s.csv");
}

TEST_CASE("sweep smoke plan emits all reports deterministically") {
  const fs::path a = scratch("sweep_a");
  const fs::path b = scratch("sweep_b");
  const std::vector<std::string> base{"sweep", "--adder", "cla:16", "--adder", "trunc:16:2",
                                      "--snr", "5", "--snr", "10", "--runs", "3"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  const auto start = std::chrono::steady_clock::now();
  CHECK(run(with({"--output", a.string()})).code == 0);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(60));
  CHECK(run(with({"--output", b.string(), "--jobs", "2"})).code == 0);
  for (const char* f : {"runs.csv", "aggregates.csv", "dse.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(read_file(a / f) == read_file(b / f));
  }
  const std::string runs = read_file(a / "runs.csv");
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 13);  // header + 2 x 2 x 3
}

TEST_CASE("dse constraints") {
  const fs::path out = scratch("dse");
  const Outcome r = run({"dse", "--adder", "cla:16", "--adder", "trunc:16:2", "--snr", "5", "--runs", "2",
                         "--constraints", "max_error_pct=1.0", "--output", out.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "1 of 2 adders meet the constraints"));
  CHECK(contains(r.out, "illustrative"));
  const std::string dse = read_file(out / "dse.csv");
  CHECK(contains(dse, "cla:16,"));
  CHECK_FALSE(contains(dse, "trunc:16:2"));

  const Outcome no_base = run({"dse", "--adder", "trunc:16:2", "--snr", "5", "--runs", "1",
                               "--constraints", "max_error_pct=1.0", "--output", out.string()});
  CHECK(no_base.code == cli::kExitConfig);
  CHECK(contains(no_base.err, "baseline"));
  CHECK(run({"dse", "--adder", "cla:16", "--constraints", "nonsense", "--output", out.string()}).code ==
        cli::kExitConfig);
}

TEST_CASE("jobs from the environment") {
  ::setenv("MUSIC_LITE_JOBS", "many", 1);
  CHECK(run({"cordic-check", "--trials", "10"}).code == cli::kExitConfig);
  ::setenv("MUSIC_LITE_JOBS", "2", 1);
  CHECK(run({"cordic-check", "--trials", "10"}).code == 0);
  ::unsetenv("MUSIC_LITE_JOBS");
}

TEST_CASE("cordic and svd checks") {
  const Outcome c = run({"cordic-check"});
  CHECK(c.code == 0);
  CHECK(contains(c.out, "violations=0"));
  CHECK(contains(c.out, "Q2.13"));
  const Outcome s = run({"svd-check", "--trials", "10", "--size", "4"});
  CHECK(s.code == 0);
  CHECK(contains(s.out, "non_converged=0"));
  CHECK(run({"svd-check", "--size", "0"}).code == cli::kExitConfig);
}
