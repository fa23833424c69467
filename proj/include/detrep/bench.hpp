#pragma once

// Seeded random systems and the timing/accuracy benchmark over them.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "detrep/error.hpp"
#include "detrep/polycore.hpp"
#include "detrep/rng.hpp"
#include "detrep/twopar.hpp"

namespace detrep {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

enum class Field { Real, Complex };
enum class Scenario { Full, SquaredFactor };

inline std::string to_string(Field f) { return f == Field::Real ? "real" : "complex"; }
inline std::string to_string(Scenario s) { return s == Scenario::Full ? "full" : "squared_factor"; }

inline Field parse_field(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw Error(Errc::ParseError, "field must be real or complex, got " + s);
}

inline Scenario parse_scenario(const std::string& s) {
  if (s == "full") return Scenario::Full;
  if (s == "squared_factor") return Scenario::SquaredFactor;
  throw Error(Errc::ParseError, "scenario must be full or squared_factor, got " + s);
}

/// Uniform on [0,1], or with real and imaginary parts each uniform on [0,1].
inline cplx random_coeff(Field f, Rng& rng) {
  const double re = rng.uniform();
  return f == Field::Real ? cplx(re) : cplx(re, rng.uniform());
}

inline HomoPoly random_homo(int n, Field f, Rng& rng) {
  HomoPoly p(n);
  for (int i = n; i >= 0; --i)
    for (int j = 0; i + j <= n; ++j) p(i, j) = random_coeff(f, rng);
  return p;
}

/// Dense random affine polynomial of degree n.
inline AffinePoly random_full(int n, Field f, Rng& rng) { return dehomogenize(random_homo(n, f, rng)); }

/// (a x + b y + c)^2 q(x, y) with q random of degree n - 2.
inline AffinePoly random_squared_factor(int n, Field f, Rng& rng) {
  if (n < 2) throw Error(Errc::InvalidArgument, "squared factor needs degree >= 2");
  const cplx a = random_coeff(f, rng), b = random_coeff(f, rng), c = random_coeff(f, rng);
  const HomoPoly line = LinearForm{a, b, c}.to_poly();
  return dehomogenize(line * line * random_homo(n - 2, f, rng));
}

struct BenchConfig {
  std::vector<int> degrees{3, 4, 5};
  int samples = 500;
  Field field = Field::Real;
  Scenario scenario = Scenario::Full;
  std::uint64_t seed = 1;
  int threads = 1;
  bool timing = true;  ///< false writes null timings so reports are byte-identical

  void validate() const {
    if (samples < 1) throw Error(Errc::InvalidArgument, "samples must be >= 1");
    if (degrees.empty()) throw Error(Errc::InvalidArgument, "no degrees given");
    for (int d : degrees)
      if (d < 2 || d > 5) throw Error(Errc::UnsupportedDegree, "bench degrees must lie in 2..5");
    if (scenario == Scenario::SquaredFactor)
      for (int d : degrees)
        if (d < 3) throw Error(Errc::InvalidArgument, "squared_factor needs degrees >= 3");
    if (threads < 1) throw Error(Errc::InvalidArgument, "threads must be >= 1");
  }
};

struct BenchCell {
  int degree = 0;
  Field field = Field::Real;
  Scenario scenario = Scenario::Full;
  int samples = 0;
  int failures = 0;         ///< samples that raised; excluded from the means
  int incomplete = 0;       ///< successful samples with fewer than n^2 roots
  int clustered_roots = 0;
  int unreliable_roots = 0;
  double geo_mean_accuracy = 0.0;
  double geo_mean_forward_error = 0.0;
  std::optional<double> mean_time_ms;
  std::optional<PhaseTimes> mean_phase_ms;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchCell> cells;
};

/// Outcome of one random system; also used by tests.
struct SampleResult {
  bool ok = false;
  std::string error;
  int roots = 0;
  int clustered = 0;
  int unreliable = 0;
  AccuracyMetric metric;
  PhaseTimes times;
};

inline std::pair<AffinePoly, AffinePoly> bench_system(int n, Field f, Scenario s, std::uint64_t sample_seed) {
  Rng rng(sample_seed);
  AffinePoly p = random_full(n, f, rng);
  AffinePoly q = s == Scenario::Full ? random_full(n, f, rng) : random_squared_factor(n, f, rng);
  return {std::move(p), std::move(q)};
}

inline std::uint64_t sample_seed(std::uint64_t seed, int degree, int sample) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(degree)), static_cast<std::uint64_t>(sample));
}

inline SampleResult run_sample(int n, Field f, Scenario s, std::uint64_t sseed) {
  SampleResult r;
  try {
    const auto [p, q] = bench_system(n, f, s, sseed);
    SolveOptions opts;
    opts.build.seed = sseed;
    const RootSet rs = solve_system(p, q, opts);
    r.times = rs.times;
    r.roots = static_cast<int>(rs.roots.size());
    for (const Root& root : rs.roots) {
      r.clustered += root.flag == RootFlag::Clustered;
      r.unreliable += root.flag == RootFlag::Unreliable;
    }
    if (rs.roots.empty()) {
      r.error = "no roots";
      return r;
    }
    r.metric = accuracy_metric(p, q, rs);
    r.ok = r.metric.counted > 0;
    if (!r.ok) r.error = "every root has a singular Jacobian";
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

inline BenchCell run_cell(const BenchConfig& cfg, int degree) {
  std::vector<SampleResult> results(static_cast<std::size_t>(cfg.samples));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < cfg.samples; k = next++)
      results[static_cast<std::size_t>(k)] =
          run_sample(degree, cfg.field, cfg.scenario, sample_seed(cfg.seed, degree, k));
  };
  if (cfg.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BenchCell c;
  c.degree = degree;
  c.field = cfg.field;
  c.scenario = cfg.scenario;
  c.samples = cfg.samples;
  double log_acc = 0.0, log_fwd = 0.0;
  PhaseTimes sum;
  int ok = 0;
  for (const SampleResult& r : results) {
    if (!r.ok) {
      ++c.failures;
      continue;
    }
    ++ok;
    if (r.roots < degree * degree) ++c.incomplete;
    c.clustered_roots += r.clustered;
    c.unreliable_roots += r.unreliable;
    log_acc += std::log(std::max(r.metric.accuracy, 1e-300));
    log_fwd += std::log(std::max(r.metric.forward_error_estimate, 1e-300));
    sum.build_ms += r.times.build_ms;
    sum.assemble_ms += r.times.assemble_ms;
    sum.eigensolve_ms += r.times.eigensolve_ms;
    sum.polish_ms += r.times.polish_ms;
  }
  if (ok > 0) {
    c.geo_mean_accuracy = std::exp(log_acc / ok);
    c.geo_mean_forward_error = std::exp(log_fwd / ok);
    if (cfg.timing) {
      PhaseTimes mean{sum.build_ms / ok, sum.assemble_ms / ok, sum.eigensolve_ms / ok, sum.polish_ms / ok};
      c.mean_phase_ms = mean;
      c.mean_time_ms = mean.total();
    }
  }
  return c;
}

inline BenchReport run_bench(const BenchConfig& cfg) {
  cfg.validate();
  BenchReport rep;
  rep.config = cfg;
  for (int d : cfg.degrees) rep.cells.push_back(run_cell(cfg, d));
  return rep;
}

namespace bench_json {

using nlohmann::json;

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace bench_json

inline nlohmann::json report_to_json(const BenchReport& r) {
  using nlohmann::json;
  json cells = json::array();
  for (const BenchCell& c : r.cells) {
    json phase = nullptr;
    if (c.mean_phase_ms)
      phase = {{"build", c.mean_phase_ms->build_ms},
               {"assemble", c.mean_phase_ms->assemble_ms},
               {"eigensolve", c.mean_phase_ms->eigensolve_ms},
               {"polish", c.mean_phase_ms->polish_ms}};
    cells.push_back({{"degree", c.degree},
                     {"field", to_string(c.field)},
                     {"scenario", to_string(c.scenario)},
                     {"samples", c.samples},
                     {"mean_time_ms", bench_json::opt(c.mean_time_ms)},
                     {"phase_ms", phase},
                     {"geo_mean_accuracy", c.geo_mean_accuracy},
                     {"geo_mean_forward_error", c.geo_mean_forward_error},
                     {"failures", c.failures},
                     {"excluded", c.failures},
                     {"incomplete", c.incomplete},
                     {"clustered_roots", c.clustered_roots},
                     {"unreliable_roots", c.unreliable_roots}});
  }
  return {{"schema_version", kReportSchema},
          {"version", kVersion},
          {"config",
           {{"degrees", r.config.degrees},
            {"samples", r.config.samples},
            {"field", to_string(r.config.field)},
            {"scenario", to_string(r.config.scenario)},
            {"seed", r.config.seed},
            {"timing", r.config.timing}}},
          {"cells", cells}};
}

inline BenchReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchema)
      throw Error(Errc::ParseError, "unsupported report schema version");
    BenchReport r;
    const auto& cfg = j.at("config");
    r.config.degrees = cfg.at("degrees").get<std::vector<int>>();
    r.config.samples = cfg.at("samples").get<int>();
    r.config.field = parse_field(cfg.at("field").get<std::string>());
    r.config.scenario = parse_scenario(cfg.at("scenario").get<std::string>());
    r.config.seed = cfg.at("seed").get<std::uint64_t>();
    r.config.timing = cfg.at("timing").get<bool>();
    for (const auto& cj : j.at("cells")) {
      BenchCell c;
      c.degree = cj.at("degree").get<int>();
      c.field = parse_field(cj.at("field").get<std::string>());
      c.scenario = parse_scenario(cj.at("scenario").get<std::string>());
      c.samples = cj.at("samples").get<int>();
      c.mean_time_ms = bench_json::opt_from(cj.at("mean_time_ms"));
      if (const auto& ph = cj.at("phase_ms"); !ph.is_null())
        c.mean_phase_ms = PhaseTimes{ph.at("build").get<double>(), ph.at("assemble").get<double>(),
                                     ph.at("eigensolve").get<double>(), ph.at("polish").get<double>()};
      c.geo_mean_accuracy = cj.at("geo_mean_accuracy").get<double>();
      c.geo_mean_forward_error = cj.at("geo_mean_forward_error").get<double>();
      c.failures = cj.at("failures").get<int>();
      c.incomplete = cj.at("incomplete").get<int>();
      c.clustered_roots = cj.at("clustered_roots").get<int>();
      c.unreliable_roots = cj.at("unreliable_roots").get<int>();
      r.cells.push_back(c);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("malformed report: ") + e.what());
  }
}

inline std::string report_table(const BenchReport& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "scenario %s, field %s, %d samples per degree, seed %llu\n",
                to_string(r.config.scenario).c_str(), to_string(r.config.field).c_str(), r.config.samples,
                static_cast<unsigned long long>(r.config.seed));
  out += buf;
  out += "degree  time[ms]  accuracy   fwd.error  failures  incomplete  clustered\n";
  for (const BenchCell& c : r.cells) {
    const std::string t = c.mean_time_ms ? [&] {
      char tb[32];
      std::snprintf(tb, sizeof tb, "%8.3f", *c.mean_time_ms);
      return std::string(tb);
    }() : std::string("       -");
    std::snprintf(buf, sizeof buf, "%6d  %s  %9.2e  %9.2e  %8d  %10d  %9d\n", c.degree, t.c_str(),
                  c.geo_mean_accuracy, c.geo_mean_forward_error, c.failures, c.incomplete, c.clustered_roots);
    out += buf;
  }
  return out;
}

}  // namespace detrep
