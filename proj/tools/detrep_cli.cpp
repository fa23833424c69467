// detrep build|verify|solve|bench
//
// Exit codes: 0 success, 2 bad input or usage, 3 unsupported degree,
// 4 numerical failure, 5 singular two-parameter problem.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "detrep/bench.hpp"
#include "detrep/detrep.hpp"
#include "detrep/error.hpp"
#include "detrep/io.hpp"
#include "detrep/twopar.hpp"

namespace {

using nlohmann::json;
using namespace detrep;

constexpr int kOk = 0, kParse = 2, kDegree = 3, kNumeric = 4, kSingular = 5;

int exit_code(Errc c) {
  switch (c) {
    case Errc::ParseError:
    case Errc::InvalidArgument: return kParse;
    case Errc::UnsupportedDegree: return kDegree;
    case Errc::SingularDelta0: return kSingular;
    default: return kNumeric;
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::ParseError, "cannot write " + path);
  f << text;
}

constexpr double kBuildTol = 1e-7;
constexpr double kSolveTol = 1e-6;

int cmd_build(const std::string& input, const std::string& out, std::uint64_t seed, double tol_rank,
              int samples) {
  const AffinePoly q = io::read_poly(input);
  BuildOptions opts;
  opts.seed = seed;
  opts.rank_tol = tol_rank;
  const DetRep rep = build(q, opts);
  const double res = verify(rep.source, rep, samples, seed);
  json j = io::rep_to_json(rep);
  j["residual"] = res;
  j["polynomial"] = io::poly_to_json(q);
  emit(out, j.dump(2) + "\n");
  std::cerr << "n=" << rep.n << " structure=" << to_string(rep.structure) << " residual=" << res << "\n";
  return res <= kBuildTol ? kOk : kNumeric;
}

int cmd_verify(const std::string& input, const std::string& rep_path, std::uint64_t seed, int samples) {
  const AffinePoly q = io::read_poly(input);
  json j;
  try {
    j = json::parse(io::read_file(rep_path));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("invalid representation JSON: ") + e.what());
  }
  const DetRep rep = io::rep_from_json(j);
  const int d = q.effective_degree();
  if (d < 1) throw Error(Errc::DegenerateInput, "constant polynomial");
  AffinePoly t(d);
  for (int i = 0; i <= d; ++i)
    for (int k = 0; i + k <= d; ++k) t(i, k) = q(i, k);
  const double res = verify(homogenize(t), rep, samples, seed);
  std::cout << json{{"residual", res}, {"samples", samples}, {"seed", seed}}.dump() << "\n";
  return res <= kBuildTol ? kOk : kNumeric;
}

int cmd_solve(const std::string& pp, const std::string& qp, const std::string& out, std::uint64_t seed,
              double tol_rank, bool timing) {
  const AffinePoly p = io::read_poly(pp);
  const AffinePoly q = io::read_poly(qp);
  SolveOptions opts;
  opts.build.seed = seed;
  opts.build.rank_tol = tol_rank;
  const RootSet rs = solve_system(p, q, opts);
  json j = io::roots_to_json(rs);
  if (!rs.roots.empty()) {
    const AccuracyMetric m = accuracy_metric(p, q, rs);
    j["accuracy"] = m.accuracy;
    j["forward_error_estimate"] = m.forward_error_estimate;
    j["unreliable"] = m.unreliable;
  }
  if (timing)
    j["phase_ms"] = {{"build", rs.times.build_ms},
                     {"assemble", rs.times.assemble_ms},
                     {"eigensolve", rs.times.eigensolve_ms},
                     {"polish", rs.times.polish_ms}};
  emit(out, j.dump(2) + "\n");
  bool ok = true;
  for (const Root& r : rs.roots)
    if (r.flag != RootFlag::Clustered && !(r.rel_res <= kSolveTol)) ok = false;
  std::cerr << rs.roots.size() << " roots, " << rs.dropped << " dropped\n";
  return ok ? kOk : kNumeric;
}

int cmd_bench(const BenchConfig& cfg, const std::string& out) {
  const BenchReport rep = run_bench(cfg);
  const std::string text = report_to_json(rep).dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cerr << report_table(rep);
  } else {
    emit(out, text);
    std::cout << report_table(rep);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determinantal representations of plane curves (degree <= 5) and bivariate system solving"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int samples = 100;
  double tol_rank = 1e-8;
  std::string out;
  bool no_timing = false;

  auto* b = app.add_subcommand("build", "build an n x n representation of a polynomial file");
  std::string build_in;
  b->add_option("input", build_in, "polynomial file (text or JSON)")->required();
  b->add_option("--out", out, "output JSON (default stdout)");
  b->add_option("--seed", seed, "seed for rotations and verification");
  b->add_option("--samples", samples, "verification points")->check(CLI::PositiveNumber);
  b->add_option("--tol-rank", tol_rank, "relative rank threshold for conic factoring");

  auto* v = app.add_subcommand("verify", "check a representation JSON against a polynomial file");
  std::string verify_in, verify_rep;
  v->add_option("input", verify_in, "polynomial file")->required();
  v->add_option("rep", verify_rep, "representation JSON written by build")->required();
  v->add_option("--seed", seed, "seed for the verification points");
  v->add_option("--samples", samples, "verification points")->check(CLI::PositiveNumber);

  auto* s = app.add_subcommand("solve", "solve p = q = 0");
  std::string solve_p, solve_q;
  s->add_option("p", solve_p, "first polynomial file")->required();
  s->add_option("q", solve_q, "second polynomial file")->required();
  s->add_option("--out", out, "output JSON (default stdout)");
  s->add_option("--seed", seed, "seed for rotations");
  s->add_option("--tol-rank", tol_rank, "relative rank threshold for conic factoring");
  s->add_flag("--no-timing", no_timing, "omit phase timings");

  auto* be = app.add_subcommand("bench", "timing and accuracy on random systems");
  BenchConfig cfg;
  std::string field = "real", scenario = "full";
  be->add_option("--degrees", cfg.degrees, "degrees in 2..5")->delimiter(',');
  be->add_option("--samples", cfg.samples, "systems per degree")->check(CLI::PositiveNumber);
  be->add_option("--field", field, "real or complex")->check(CLI::IsMember({"real", "complex"}));
  be->add_option("--scenario", scenario, "full or squared_factor")
      ->check(CLI::IsMember({"full", "squared_factor"}));
  be->add_option("--seed", cfg.seed, "base seed");
  be->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
  be->add_option("--out", out, "report JSON (default stdout)");
  be->add_flag("--no-timing", no_timing, "write null timings for byte-identical reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParse;
  }

  try {
    if (*b) return cmd_build(build_in, out, seed, tol_rank, samples);
    if (*v) return cmd_verify(verify_in, verify_rep, seed, samples);
    if (*s) return cmd_solve(solve_p, solve_q, out, seed, tol_rank, !no_timing);
    cfg.field = parse_field(field);
    cfg.scenario = parse_scenario(scenario);
    cfg.timing = !no_timing;
    return cmd_bench(cfg, out);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
