#include "musiclite/dse.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "musiclite/adder_spec.hpp"
#include "musiclite/errors.hpp"

namespace musiclite {

void SweepPlan::validate() const {
  if (adders.empty()) {
    throw ConfigError("sweep needs at least one adder");
  }
  if (snr_db.empty()) {
    throw ConfigError("sweep.snr_db must not be empty");
  }
  for (double s : snr_db) {
    if (!std::isfinite(s)) {
      throw ConfigError("sweep.snr_db entries must be finite");
    }
  }
  if (runs < 1) {
    throw ConfigError("sweep.runs must be >= 1");
  }
}

RngSpec run_rng(std::uint64_t seed, double snr_db, int run) {
  // SNR in millidecibels keeps the stream id stable under list reordering
  const auto milli = static_cast<std::uint64_t>(std::llround(snr_db * 1000.0));
  return {seed, splitmix64(milli) ^ static_cast<std::uint64_t>(run)};
}

SweepResult run_sweep(const SweepPlan& plan, const Scenario& scenario, int jobs) {
  plan.validate();
  scenario.validate();
  std::vector<CordicConfig> cordics;
  cordics.reserve(plan.adders.size());
  for (const std::string& spec : plan.adders) {
    cordics.emplace_back(scenario.format, parse_adder_spec(spec), scenario.cordic_iterations,
                                    scenario.rounding);
  }

  const std::size_t n_snr = plan.snr_db.size();
  const std::size_t n_runs = static_cast<std::size_t>(plan.runs);
  const std::size_t total = plan.adders.size() * n_snr * n_runs;
  std::vector<RunRow> rows(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t a = i / (n_snr * n_runs);
      const std::size_t s = (i / n_runs) % n_snr;
      const int run = static_cast<int>(i % n_runs);
      Scenario sc = scenario;
      sc.scene.snr_db = plan.snr_db[s];
      const RngSpec rng = run_rng(plan.seed, plan.snr_db[s], run);
      RunRow& row = rows[i];
      row.adder = plan.adders[a];
      row.snr_db = plan.snr_db[s];
      row.run = run;
      row.seed = rng.derived_seed();
      try {
        const RunResult res = run_pipeline(sc, cordics[a], rng);
        row.converged = res.converged;
        row.estimated_range_m = res.estimated_range_m;
        row.abs_error_pct = res.abs_error_pct;
      } catch (const std::exception&) {
        row.converged = false;
      }
    }
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
  }

  SweepResult out;
  out.rows = std::move(rows);
  out.aggregates = aggregate(out.rows);
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<double>> samples;
  for (const RunRow& r : rows) {
    if (out.empty() || out.back().adder != r.adder || out.back().snr_db != r.snr_db) {
      out.push_back({r.adder, r.snr_db, 0, 0, 0.0, 0.0});
      samples.emplace_back();
    }
    ++out.back().runs;
    if (r.converged) {
      ++out.back().converged;
      samples.back().push_back(r.abs_error_pct);
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::vector<double>& v = samples[i];
    if (v.empty()) {
      out[i].mean_abs_error_pct = nan;
      out[i].std_abs_error_pct = nan;
      continue;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[i].mean_abs_error_pct = mean;
    out[i].std_abs_error_pct = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return out;
}

std::vector<DsePoint> build_points(const SweepResult& result,
                                   const std::vector<std::string>& adder_specs) {
  std::vector<DsePoint> points;
  for (const std::string& spec : adder_specs) {
    const AdderModel model = parse_adder_spec(spec);
    DsePoint p;
    p.adder = spec;
    p.family = model.family();
    p.area_proxy = model.cost().area_units;
    p.power_proxy = model.cost().energy_units;
    double sum = 0.0;
    int used = 0;
    int total = 0;
    int converged = 0;
    for (const RunRow& r : result.rows) {
      if (r.adder != spec) continue;
      ++total;
      if (r.converged) ++converged;
      if (r.snr_db > 0.0 && r.converged) {
        sum += r.abs_error_pct;
        ++used;
      }
    }
    p.mean_error_pct = used > 0 ? sum / used : std::numeric_limits<double>::quiet_NaN();
    p.converged_fraction = total > 0 ? static_cast<double>(converged) / total : 0.0;
    points.push_back(std::move(p));
  }
  const DsePoint* base = nullptr;
  for (const DsePoint& p : points) {
    if (p.family == AdderFamily::CarryLookaheadExact) {
      base = &p;
      break;
    }
  }
  if (base != nullptr) {
    const double area = base->area_proxy;
    const double power = base->power_proxy;
    for (DsePoint& p : points) {
      p.area_saving_pct = 100.0 * (area - p.area_proxy) / area;
      p.power_saving_pct = 100.0 * (power - p.power_proxy) / power;
    }
  }
  pareto_filter(points);
  return points;
}

namespace {

double error_key(const DsePoint& p) {
  return std::isnan(p.mean_error_pct) ? std::numeric_limits<double>::infinity() : p.mean_error_pct;
}

bool dominates(const DsePoint& a, const DsePoint& b) {
  const double ea = error_key(a);
  const double eb = error_key(b);
  const bool no_worse = ea <= eb && a.area_proxy <= b.area_proxy && a.power_proxy <= b.power_proxy;
  const bool better = ea < eb || a.area_proxy < b.area_proxy || a.power_proxy < b.power_proxy;
  return no_worse && better;
}

}  // namespace

void pareto_filter(std::vector<DsePoint>& points) {
  for (DsePoint& p : points) {
    p.dominated = false;
    for (const DsePoint& q : points) {
      if (&p != &q && dominates(q, p)) {
        p.dominated = true;
        break;
      }
    }
  }
}

QualityConstraints QualityConstraints::parse(const std::string& text) {
  QualityConstraints qc;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("constraint '" + item + "' is not key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError("constraint '" + key + "' has non-numeric value '" + value + "'");
    }
    if (key == "max_error_pct") {
      qc.max_error_pct = v;
    } else if (key == "min_area_saving_pct") {
      qc.min_area_saving_pct = v;
    } else if (key == "min_power_saving_pct") {
      qc.min_power_saving_pct = v;
    } else {
      throw ConfigError("unknown constraint '" + key + "'");
    }
  }
  return qc;
}

std::vector<DsePoint> apply_constraints(const std::vector<DsePoint>& points,
                                        const QualityConstraints& qc) {
  if (!qc.any()) {
    throw ConfigError("quality constraints need at least one bound");
  }
  bool have_base = false;
  for (const DsePoint& p : points) {
    have_base = have_base || p.family == AdderFamily::CarryLookaheadExact;
  }
  if (!have_base) {
    throw ConfigError("constraints are relative to a carry-lookahead baseline (cla:W), none in the adder list");
  }
  std::vector<DsePoint> out;
  for (const DsePoint& p : points) {
    if (qc.max_error_pct && !(p.mean_error_pct <= *qc.max_error_pct)) continue;
    if (qc.min_area_saving_pct && !(p.area_saving_pct.value_or(-INFINITY) >= *qc.min_area_saving_pct)) continue;
    if (qc.min_power_saving_pct && !(p.power_saving_pct.value_or(-INFINITY) >= *qc.min_power_saving_pct)) continue;
    out.push_back(p);
  }
  return out;
}

namespace {

std::string num(double v) {
  return fmt::format("{}", v);
}

std::string opt(const std::optional<double>& v) {
  return v ? num(*v) : std::string();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  f << content;
  f.close();
  if (!f) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

}  // namespace

std::string runs_csv(const std::vector<RunRow>& rows) {
  std::string out = std::string(kRunsHeader) + "\n";
  for (const RunRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.adder, num(r.snr_db), r.run, r.seed,
                       num(r.estimated_range_m), num(r.abs_error_pct), r.converged ? 1 : 0);
  }
  return out;
}

std::string aggregates_csv(const std::vector<AggregateRow>& rows) {
  std::string out = std::string(kAggregatesHeader) + "\n";
  for (const AggregateRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.adder, num(r.snr_db), r.runs, r.converged,
                       num(r.mean_abs_error_pct), num(r.std_abs_error_pct));
  }
  return out;
}

std::string dse_csv(const std::vector<DsePoint>& points) {
  std::string out = std::string(kDseHeader) + "\n";
  for (const DsePoint& p : points) {
    out += fmt::format("{},{},{},{},{},{},{}\n", p.adder, num(p.mean_error_pct), num(p.area_proxy),
                       num(p.power_proxy), opt(p.area_saving_pct), opt(p.power_saving_pct),
                       p.dominated ? 1 : 0);
  }
  return out;
}

void emit_report(const SweepResult& result, const std::vector<DsePoint>& points,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  }
  write_file(dir / "runs.csv", runs_csv(result.rows));
  write_file(dir / "aggregates.csv", aggregates_csv(result.aggregates));
  write_file(dir / "dse.csv", dse_csv(points));
}

}  // namespace musiclite
