// satfactor: factoring-as-SAT pipeline driver.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 solve unknown.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "satfactor/analysis.hpp"
#include "satfactor/bench.hpp"
#include "satfactor/dimacs.hpp"
#include "satfactor/encoder.hpp"
#include "satfactor/numtheory.hpp"
#include "satfactor/solver.hpp"

namespace {

using namespace satfactor;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUnknown = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Globals {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string format;
  std::string out;
};

// Output is buffered and written once; files are replaced atomically.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  namespace fs = std::filesystem;
  fs::path target(g.out);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    f << text;
    if (!f.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename to '" + target.string() + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Natural parse_n(const std::string& text) {
  try {
    return parse_natural(text);
  } catch (const std::exception&) {
    throw UsageError("not a non-negative decimal integer: '" + text + "'");
  }
}

std::vector<unsigned> parse_bits(const std::string& text) {
  std::vector<unsigned> out;
  auto to_u = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw UsageError("bad bit-length spec '" + text + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("bit range must be a:b or a:b:step");
    unsigned lo = to_u(parts[0]);
    unsigned hi = to_u(parts[1]);
    unsigned step = parts.size() == 3 ? to_u(parts[2]) : 1;
    if (step == 0 || lo > hi) throw UsageError("bad bit range '" + text + "'");
    for (unsigned n = lo; n <= hi; n += step) out.push_back(n);
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(to_u(part));
  }
  if (out.empty()) throw UsageError("empty bit-length spec");
  return out;
}

std::pair<unsigned, unsigned> parse_split(const std::string& text) {
  auto sep = text.find_first_of(":,x");
  if (sep == std::string::npos) throw UsageError("split must look like m_p:m_q");
  try {
    return {static_cast<unsigned>(std::stoul(text.substr(0, sep))),
            static_cast<unsigned>(std::stoul(text.substr(sep + 1)))};
  } catch (const std::exception&) {
    throw UsageError("bad split '" + text + "'");
  }
}

// Every (m_p, m_q) with m_p <= m_q, |m_p - m_q| <= 1 and m_p + m_q in {n, n+1}.
std::vector<std::pair<unsigned, unsigned>> balanced_splits(unsigned n) {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (unsigned total = n; total <= n + 1; ++total) {
    unsigned a = total / 2;
    if (a >= 2) out.emplace_back(a, total - a);
  }
  return out;
}

solver::SolveResult run_solver(const cnf::Formula& f, const std::string& solver_spec, std::uint64_t seed,
                               std::optional<double> time_limit) {
  if (solver_spec == "embedded") {
    solver::SolverConfig cfg;
    cfg.seed = seed;
    cfg.time_limit = time_limit;
    return solver::solve(f, cfg);
  }
  return solver::solve_external(solver_spec, f, time_limit.value_or(1e9));
}

// ---------------------------------------------------------------------------

int cmd_gen(const Globals& g, unsigned bits, unsigned count) {
  if (bits < 4) throw UsageError("--bits must be >= 4");
  std::vector<numtheory::Semiprime> list;
  for (unsigned i = 0; i < count; ++i) {
    list.push_back(numtheory::gen_semiprime(bits, bench::derive_seed(g.seed, "semiprime", {bits, i})));
  }
  if (g.format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& s : list) {
      arr.push_back({{"n_bits", s.n_bits}, {"N", to_decimal(s.value)}, {"p", to_decimal(s.p)}, {"q", to_decimal(s.q)}});
    }
    emit(g, arr.dump(2) + "\n");
  } else {
    std::ostringstream out;
    numtheory::write_semiprimes_csv(out, list);
    emit(g, out.str());
  }
  return kExitOk;
}

std::vector<Natural> read_targets(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<Natural> targets;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (first && line.rfind("n_bits", 0) == 0) {
      // Semiprime CSV as written by `gen`: take the N column.
      first = false;
      std::ifstream again(path);
      for (const auto& s : numtheory::read_semiprimes_csv(again)) targets.push_back(s.value);
      return targets;
    }
    first = false;
    std::string field = line.substr(0, line.find(','));
    targets.push_back(parse_n(field));
  }
  return targets;
}

int cmd_encode(const Globals& g, const std::string& n_text, const std::string& targets_file, const std::string& alg,
               const std::string& split, bool fold) {
  if (n_text.empty() == targets_file.empty()) throw UsageError("give exactly one of --n and --targets");
  encoder::EncodeSpec spec;
  try {
    spec.algorithm = encoder::parse_algorithm(alg);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (!n_text.empty()) {
    spec.targets.push_back(parse_n(n_text));
  } else {
    spec.targets = read_targets(targets_file);
    if (spec.targets.empty()) throw std::runtime_error("no targets in '" + targets_file + "'");
  }
  spec.n_bits = bit_length(spec.targets.front());
  if (spec.n_bits < 4) throw UsageError("N must have at least 4 bits");
  if (!split.empty()) {
    std::tie(spec.m_p, spec.m_q) = parse_split(split);
  } else {
    auto base = encoder::EncodeSpec::for_target(spec.targets.front(), spec.algorithm);
    spec.m_p = base.m_p;
    spec.m_q = base.m_q;
  }
  encoder::Encoded enc;
  try {
    spec.validate();
    enc = encoder::encode(spec);
  } catch (const encoder::EncodeError& e) {
    throw UsageError(e.what());
  }
  cnf::Formula f = std::move(enc.formula);
  if (fold) {
    auto simplified = cnf::unit_propagate(f);
    auto annotations = f.annotations;
    cnf::Formula folded = std::move(simplified.formula);
    // Forced values stay as units so that the varmap can still be decoded.
    for (std::uint32_t v = 1; v <= f.num_vars; ++v) {
      cnf::Var var(v);
      if (simplified.fixed.is_assigned(var)) folded.add(cnf::Clause{cnf::Lit(var, !simplified.fixed.value_of(var))});
    }
    if (simplified.conflict) folded.clauses = {cnf::Clause{cnf::Lit::pos(cnf::Var(1))}, cnf::Clause{cnf::Lit::neg(cnf::Var(1))}};
    folded.annotations = annotations;
    f = std::move(folded);
  }
  emit(g, cnf::write_dimacs(f));
  return kExitOk;
}

int cmd_factor(const Globals& g, const std::string& n_text, const std::string& alg_name, const std::string& solver_spec,
               std::optional<double> time_limit) {
  Natural n = parse_n(n_text);
  encoder::Algorithm alg;
  try {
    alg = encoder::parse_algorithm(alg_name);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (n < 2) throw UsageError("N must be >= 2");
  const unsigned bits = bit_length(n);
  bool unknown = false;
  if (bits >= 3) {
    for (auto [mp, mq] : balanced_splits(bits)) {
      encoder::EncodeSpec spec;
      spec.n_bits = bits;
      spec.targets = {n};
      spec.algorithm = alg;
      spec.m_p = mp;
      spec.m_q = mq;
      encoder::Encoded enc = encoder::encode(spec);
      auto result = run_solver(enc.formula, solver_spec, bench::derive_seed(g.seed, "solver", {bits, 0, 0}), time_limit);
      if (result.status == cnf::SolveStatus::Unknown) {
        unknown = true;
        continue;
      }
      if (result.status == cnf::SolveStatus::Unsat) continue;
      auto d = encoder::decode(enc.varmap, *result.assignment);
      if (d.p * d.q != n) throw std::runtime_error("solver model does not multiply to N");
      if (d.p > d.q) std::swap(d.p, d.q);
      emit(g, to_decimal(n) + " = " + to_decimal(d.p) + " * " + to_decimal(d.q) + "\n");
      return kExitOk;
    }
  }
  if (unknown) {
    emit(g, "unknown\n");
    return kExitUnknown;
  }
  emit(g, "no factorization\n");
  return kExitOk;
}

int cmd_solve(const Globals& g, const std::string& path, const std::string& solver_spec,
              std::optional<double> time_limit) {
  cnf::Formula f = cnf::parse_dimacs(read_file(path));
  auto result = run_solver(f, solver_spec, g.seed, time_limit);
  emit(g, cnf::format_solver_output(result.status, result.assignment ? &*result.assignment : nullptr));
  return result.status == cnf::SolveStatus::Unknown ? kExitUnknown : kExitOk;
}

ordered_json record_json(const bench::RunRecord& r) {
  ordered_json j = {{"strategy", bench::to_string(r.strategy)},
                    {"encoder", encoder::to_string(r.algorithm)},
                    {"solver", r.solver},
                    {"n_bits", r.n_bits},
                    {"N", to_decimal(r.n)},
                    {"solver_seed", r.solver_seed},
                    {"status", cnf::to_string(r.status)},
                    {"wall_time_s", r.wall_time_s},
                    {"conflicts", r.conflicts},
                    {"decisions", r.decisions}};
  j["matched_target"] = r.matched_target ? ordered_json(*r.matched_target) : ordered_json(nullptr);
  return j;
}

int cmd_bench(const Globals& g, const std::string& bits, unsigned per_n, unsigned seeds, const std::string& strategy,
              const std::string& alg, const std::string& solver_spec, std::optional<double> time_limit) {
  bench::ExperimentPlan plan;
  try {
    plan.bitlengths = parse_bits(bits);
    plan.semiprimes_per_n = per_n;
    plan.seeds_per_instance = seeds;
    plan.strategy = bench::parse_strategy(strategy);
    plan.algorithm = encoder::parse_algorithm(alg);
    if (solver_spec != "embedded") plan.external_cmd = solver_spec;
    plan.master_seed = g.seed;
    plan.time_limit = time_limit;
    plan.workers = g.workers;
    plan.validate();
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  bench::Dataset d = bench::run_experiment(plan);
  if (g.format == "json") {
    ordered_json j = {{"plan_fingerprint", d.plan_fingerprint}, {"records", ordered_json::array()}};
    for (const auto& r : d.records) j["records"].push_back(record_json(r));
    emit(g, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    bench::save_csv(d, out);
    emit(g, out.str());
  }
  return kExitOk;
}

bench::Dataset load_dataset(const std::string& path) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("no such file '" + path + "'");
  return bench::load_csv(path);
}

bench::Stat parse_stat_flag(const std::string& s) {
  try {
    return bench::parse_stat(s);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

int cmd_analyze_fit(const Globals& g, const std::string& path, const std::string& stat_name) {
  bench::Stat stat = parse_stat_flag(stat_name);
  auto agg = bench::aggregate(load_dataset(path), stat);
  std::vector<analysis::CurvePoint> pts;
  for (const auto& p : agg.points) pts.push_back({static_cast<double>(p.n_bits), p.seconds});
  auto fit = analysis::fit_exponential(pts);
  if (g.format == "csv") {
    std::ostringstream out;
    out << "slope,intercept,r2,points,unknown_excluded\n"
        << fit.slope << ',' << fit.intercept << ',' << fit.r2 << ',' << pts.size() << ',' << agg.unknown_excluded << '\n';
    emit(g, out.str());
  } else {
    ordered_json j = {{"statistic", bench::to_string(stat)},
                      {"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"r2", fit.r2},
                      {"points", pts.size()},
                      {"unknown_excluded", agg.unknown_excluded}};
    emit(g, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_analyze_curve(const Globals& g, const std::string& path, const std::string& stat_name,
                      const std::string& across_name) {
  bench::Stat stat = parse_stat_flag(stat_name);
  bench::Stat across = parse_stat_flag(across_name);
  auto agg = bench::aggregate(load_dataset(path), stat);
  auto curve = bench::per_bitlength(agg.points, across);
  if (g.format == "csv") {
    std::ostringstream out;
    out << "n_bits,seconds\n";
    for (auto [n, s] : curve) out << n << ',' << s << '\n';
    emit(g, out.str());
  } else {
    ordered_json arr = ordered_json::array();
    for (auto [n, s] : curve) arr.push_back({{"n_bits", n}, {"seconds", s}});
    emit(g, ordered_json({{"statistic", bench::to_string(stat)}, {"across", bench::to_string(across)}, {"curve", arr}})
                    .dump(2) +
                "\n");
  }
  return kExitOk;
}

int cmd_analyze_communities(const Globals& g, const std::string& source, const std::string& alg, bool simplified) {
  cnf::Formula f;
  if (std::filesystem::exists(source)) {
    f = cnf::parse_dimacs(read_file(source));
  } else {
    Natural n = parse_n(source);
    if (bit_length(n) < 4) throw UsageError("N must have at least 4 bits");
    encoder::Algorithm a;
    try {
      a = encoder::parse_algorithm(alg);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    f = encoder::encode(encoder::EncodeSpec::for_target(n, a)).formula;
  }
  if (simplified) {
    auto s = cnf::unit_propagate(f);
    if (s.conflict) throw std::runtime_error("formula is refuted by unit propagation");
    f = std::move(s.formula);
  }
  auto graph = analysis::build_vig(f);
  auto result = analysis::cnm_communities(graph);
  std::size_t k = result.partition.empty() ? 0 : *std::max_element(result.partition.begin(), result.partition.end()) + 1;
  if (g.format == "csv") {
    std::ostringstream out;
    out << "vertices,edges,communities,q\n"
        << graph.vertex_count() << ',' << graph.edge_count() << ',' << k << ',' << result.q << '\n';
    emit(g, out.str());
  } else {
    ordered_json j = {{"vertices", graph.vertex_count()},
                      {"edges", graph.edge_count()},
                      {"communities", k},
                      {"q", result.q}};
    emit(g, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_analyze_correlate(const Globals& g, const std::string& path, const std::string& stat_name, bool spearman,
                          bool pooled) {
  bench::Stat stat = parse_stat_flag(stat_name);
  auto agg = bench::aggregate(load_dataset(path), stat);
  const auto& names = numtheory::MetricVector::names();
  std::vector<std::vector<double>> columns(names.size());
  std::vector<double> times;
  std::vector<unsigned> groups;
  for (const auto& p : agg.points) {
    auto [a, b] = numtheory::trial_division(p.n);
    numtheory::Semiprime s{p.n, a, b, p.n_bits};
    auto values = numtheory::metrics(s).as_reals();
    for (std::size_t i = 0; i < values.size(); ++i) columns[i].push_back(values[i]);
    times.push_back(p.seconds);
    groups.push_back(p.n_bits);
  }
  ordered_json j = {{"statistic", bench::to_string(stat)},
                    {"method", spearman ? "spearman" : "pearson"},
                    {"grouping", pooled ? "pooled" : "within_bitlength"},
                    {"points", times.size()},
                    {"correlations", ordered_json::object()}};
  std::ostringstream csv;
  csv << "metric,r\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::optional<double> r;
    try {
      if (pooled) {
        r = spearman ? analysis::correlate_spearman(columns[i], times) : analysis::correlate(columns[i], times);
      } else if (spearman) {
        // Rank within each bit length, then correlate the standardised ranks.
        std::map<unsigned, std::vector<std::size_t>> members;
        for (std::size_t k = 0; k < groups.size(); ++k) members[groups[k]].push_back(k);
        std::vector<double> rx(times.size());
        std::vector<double> ry(times.size());
        for (const auto& [grp, idx] : members) {
          for (std::size_t a : idx) {
            double lx = 0, ly = 0;
            for (std::size_t b : idx) {
              lx += columns[i][b] < columns[i][a] ? 1.0 : columns[i][b] == columns[i][a] ? 0.5 : 0.0;
              ly += times[b] < times[a] ? 1.0 : times[b] == times[a] ? 0.5 : 0.0;
            }
            rx[a] = lx;
            ry[a] = ly;
          }
        }
        r = analysis::correlate_within_groups(rx, ry, groups);
      } else {
        r = analysis::correlate_within_groups(columns[i], times, groups);
      }
    } catch (const analysis::AnalysisError&) {
      r.reset();  // zero variance: reported as null
    }
    j["correlations"][names[i]] = r ? ordered_json(*r) : ordered_json(nullptr);
    csv << names[i] << ',';
    if (r) csv << *r;
    csv << '\n';
  }
  emit(g, g.format == "csv" ? csv.str() : j.dump(2) + "\n");
  return kExitOk;
}

int cmd_estimate(const Globals& g, const std::string& bits, double quantum_rate, double classical_rate, double slope,
                 double intercept) {
  analysis::EstimatorConfig cfg;
  cfg.quantum_rate = quantum_rate;
  cfg.classical_rate = classical_rate;
  cfg.fit.slope = slope;
  cfg.fit.intercept = intercept;
  if (!(quantum_rate > 0) || !(classical_rate > 0)) throw UsageError("rates must be positive");
  std::vector<unsigned> ns = parse_bits(bits);
  std::vector<analysis::QuantumEstimate> rows;
  for (unsigned n : ns) rows.push_back(analysis::estimate_costs(n, cfg));
  auto to_json = [](const analysis::QuantumEstimate& e) {
    return ordered_json{{"n_bits", e.n_bits},
                        {"classical_ops_log2", e.classical_ops_log2},
                        {"quantum_ops_log2", e.quantum_ops_log2},
                        {"nfs_ops_log2", e.nfs_ops_log2},
                        {"classical_seconds_log2", e.classical_seconds_log2},
                        {"quantum_seconds_log2", e.quantum_seconds_log2},
                        {"universe_lifetimes", e.universe_lifetimes}};
  };
  if (g.format == "csv") {
    std::ostringstream out;
    out << "n_bits,classical_ops_log2,quantum_ops_log2,nfs_ops_log2,classical_seconds_log2,quantum_seconds_log2,"
           "universe_lifetimes\n";
    for (const auto& e : rows) {
      out << e.n_bits << ',' << e.classical_ops_log2 << ',' << e.quantum_ops_log2 << ',' << e.nfs_ops_log2 << ','
          << e.classical_seconds_log2 << ',' << e.quantum_seconds_log2 << ',' << e.universe_lifetimes << '\n';
    }
    emit(g, out.str());
  } else if (rows.size() == 1) {
    emit(g, to_json(rows.front()).dump(2) + "\n");
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& e : rows) arr.push_back(to_json(e));
    emit(g, arr.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiprime factoring as SAT: generate, encode, solve, benchmark, analyse."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Globals g;
  app.add_option("--seed", g.seed, "Master seed for all randomness")->capture_default_str();
  app.add_option("--workers", g.workers, "Parallel solver runs (bench only)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g.out, "Write output to this file (atomically) instead of stdout");

  std::function<int()> action;

  auto* gen = app.add_subcommand("gen", "Generate balanced semiprimes as CSV");
  gen->fallthrough();
  unsigned gen_bits = 0;
  unsigned gen_count = 1;
  gen->add_option("--bits", gen_bits, "Bit length of N")->required();
  gen->add_option("--count", gen_count, "Number of semiprimes")->capture_default_str();
  gen->callback([&] { action = [&] { return cmd_gen(g, gen_bits, gen_count); }; });

  auto* enc = app.add_subcommand("encode", "Emit an annotated DIMACS factoring instance");
  enc->fallthrough();
  std::string enc_n;
  std::string enc_targets;
  std::string enc_alg = "schoolbook";
  std::string enc_split;
  bool enc_fold = false;
  enc->add_option("--n", enc_n, "Number to factor");
  enc->add_option("--targets", enc_targets, "File with one N per line (or gen CSV) for a multi-target instance");
  enc->add_option("--alg", enc_alg, "schoolbook | karatsuba | division")->capture_default_str();
  enc->add_option("--split", enc_split, "Factor bit lengths m_p:m_q");
  enc->add_flag("--fold-constants", enc_fold, "Apply unit propagation before writing");
  enc->callback([&] { action = [&] { return cmd_encode(g, enc_n, enc_targets, enc_alg, enc_split, enc_fold); }; });

  auto* fac = app.add_subcommand("factor", "Factor N end to end through SAT");
  fac->fallthrough();
  std::string fac_n;
  std::string fac_alg = "schoolbook";
  std::string fac_solver = "embedded";
  std::optional<double> fac_limit;
  fac->add_option("--n", fac_n, "Number to factor")->required();
  fac->add_option("--alg", fac_alg, "schoolbook | karatsuba | division")->capture_default_str();
  fac->add_option("--solver", fac_solver, "'embedded' or an external solver command")->capture_default_str();
  fac->add_option("--time-limit", fac_limit, "Seconds per solver call");
  fac->callback([&] { action = [&] { return cmd_factor(g, fac_n, fac_alg, fac_solver, fac_limit); }; });

  auto* sol = app.add_subcommand("solve", "Solve a DIMACS file; prints SAT-competition output");
  sol->fallthrough();
  std::string sol_path;
  std::string sol_solver = "embedded";
  std::optional<double> sol_limit;
  sol->add_option("file", sol_path, "DIMACS CNF file")->required();
  sol->add_option("--solver", sol_solver, "'embedded' or an external solver command")->capture_default_str();
  sol->add_option("--time-limit", sol_limit, "Seconds");
  sol->callback([&] { action = [&] { return cmd_solve(g, sol_path, sol_solver, sol_limit); }; });

  auto* ben = app.add_subcommand("bench", "Run an experiment plan and write the dataset");
  ben->fallthrough();
  std::string ben_bits = "10:26:2";
  unsigned ben_per_n = 20;
  unsigned ben_seeds = 3;
  std::string ben_strategy = "mean";
  std::string ben_alg = "schoolbook";
  std::string ben_solver = "embedded";
  std::optional<double> ben_limit;
  ben->add_option("--bits", ben_bits, "Bit lengths: a:b[:step] or a,b,c")->capture_default_str();
  ben->add_option("--per-n", ben_per_n, "Semiprimes per bit length")->capture_default_str();
  ben->add_option("--seeds", ben_seeds, "Solver seeds per instance")->capture_default_str();
  ben->add_option("--strategy", ben_strategy, "mean | min | multi_target | trial_division")->capture_default_str();
  ben->add_option("--alg", ben_alg, "schoolbook | karatsuba | division")->capture_default_str();
  ben->add_option("--solver", ben_solver, "'embedded' or an external solver command")->capture_default_str();
  ben->add_option("--time-limit", ben_limit, "Seconds per solver call");
  ben->callback([&] {
    action = [&] {
      return cmd_bench(g, ben_bits, ben_per_n, ben_seeds, ben_strategy, ben_alg, ben_solver, ben_limit);
    };
  });

  auto* ana = app.add_subcommand("analyze", "Analyse a dataset or an instance");
  ana->fallthrough();
  ana->require_subcommand(1);
  std::string ana_stat = "mean";
  std::string ana_across = "mean";
  std::string ana_path;

  auto* fit = ana->add_subcommand("fit", "Fit log2(time) = intercept + slope*n");
  fit->fallthrough();
  fit->add_option("dataset", ana_path, "Dataset CSV")->required();
  fit->add_option("--stat", ana_stat, "Per-instance statistic over seeds")->capture_default_str();
  fit->callback([&] { action = [&] { return cmd_analyze_fit(g, ana_path, ana_stat); }; });

  auto* curve = ana->add_subcommand("curve", "Time per bit length");
  curve->fallthrough();
  curve->add_option("dataset", ana_path, "Dataset CSV")->required();
  curve->add_option("--stat", ana_stat, "Per-instance statistic over seeds")->capture_default_str();
  curve->add_option("--across", ana_across, "Statistic across instances of one bit length")->capture_default_str();
  curve->callback([&] { action = [&] { return cmd_analyze_curve(g, ana_path, ana_stat, ana_across); }; });

  auto* com = ana->add_subcommand("communities", "Modularity of the variable incidence graph");
  com->fallthrough();
  std::string com_alg = "schoolbook";
  bool com_simplified = false;
  com->add_option("instance", ana_path, "DIMACS file or a number N to encode")->required();
  com->add_option("--alg", com_alg, "Encoding used when given N")->capture_default_str();
  com->add_flag("--simplified", com_simplified, "Unit-propagate first");
  com->callback([&] { action = [&] { return cmd_analyze_communities(g, ana_path, com_alg, com_simplified); }; });

  auto* cor = ana->add_subcommand("correlate", "Correlate semiprime metrics with solve time");
  cor->fallthrough();
  bool cor_spearman = false;
  bool cor_pooled = false;
  std::string cor_stat = "min";
  cor->add_option("dataset", ana_path, "Dataset CSV")->required();
  cor->add_option("--stat", cor_stat, "Per-instance statistic over seeds")->capture_default_str();
  cor->add_flag("--spearman", cor_spearman, "Rank correlation");
  cor->add_flag("--pooled", cor_pooled, "Correlate across all bit lengths at once");
  cor->callback([&] { action = [&] { return cmd_analyze_correlate(g, ana_path, cor_stat, cor_spearman, cor_pooled); }; });

  auto* est = app.add_subcommand("estimate", "Classical vs quantum vs NFS cost estimate");
  est->fallthrough();
  std::string est_bits;
  double est_q = analysis::kDefaultQuantumRate;
  double est_c = analysis::kDefaultClassicalRate;
  double est_slope = analysis::kReferenceOpsFit.slope;
  double est_intercept = analysis::kReferenceOpsFit.intercept;
  est->add_option("--bits", est_bits, "Bit length(s): n, a:b[:step] or a,b,c")->required();
  est->add_option("--quantum-rate", est_q, "Quantum operations per second")->capture_default_str();
  est->add_option("--classical-rate", est_c, "Classical operations per second")->capture_default_str();
  est->add_option("--slope", est_slope, "log2 operations per bit")->capture_default_str();
  est->add_option("--intercept", est_intercept, "log2 operations at n = 0")->capture_default_str();
  est->callback([&] { action = [&] { return cmd_estimate(g, est_bits, est_q, est_c, est_slope, est_intercept); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
