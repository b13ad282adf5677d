#include "satfactor/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "satfactor/solver.hpp"

namespace satfactor::bench {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Mean: return "mean";
    case Strategy::Min: return "min";
    case Strategy::MultiTarget: return "multi_target";
    case Strategy::TrialDivision: return "trial_division";
  }
  return "mean";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "mean") return Strategy::Mean;
  if (name == "min") return Strategy::Min;
  if (name == "multi_target" || name == "multi-target") return Strategy::MultiTarget;
  if (name == "trial_division" || name == "trial-division") return Strategy::TrialDivision;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

const char* to_string(Stat s) {
  switch (s) {
    case Stat::Mean: return "mean";
    case Stat::Median: return "median";
    case Stat::Min: return "min";
    case Stat::Sum: return "sum";
  }
  return "mean";
}

Stat parse_stat(std::string_view name) {
  if (name == "mean") return Stat::Mean;
  if (name == "median") return Stat::Median;
  if (name == "min") return Stat::Min;
  if (name == "sum") return Stat::Sum;
  throw std::invalid_argument("unknown statistic '" + std::string(name) + "'");
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : text) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = splitmix64(master ^ fnv1a(stream));
  for (std::uint64_t i : indices) h = splitmix64(h ^ splitmix64(i));
  return h;
}

ExperimentPlan ExperimentPlan::desk_scale() {
  ExperimentPlan plan;
  for (unsigned n = 10; n <= 26; n += 2) plan.bitlengths.push_back(n);
  plan.semiprimes_per_n = 20;
  plan.seeds_per_instance = 3;
  return plan;
}

void ExperimentPlan::validate() const {
  if (bitlengths.empty()) throw std::invalid_argument("plan: no bit lengths");
  for (unsigned n : bitlengths) {
    if (n < 6) throw std::invalid_argument("plan: bit lengths must be >= 6, got " + std::to_string(n));
  }
  if (semiprimes_per_n < 1) throw std::invalid_argument("plan: semiprimes_per_n must be >= 1");
  if (seeds_per_instance < 1) throw std::invalid_argument("plan: seeds_per_instance must be >= 1");
  if (workers < 1) throw std::invalid_argument("plan: workers must be >= 1");
  if (strategy == Strategy::MultiTarget && algorithm == encoder::Algorithm::Division) {
    throw std::invalid_argument("plan: multi_target needs a multiplier encoding");
  }
}

std::string ExperimentPlan::fingerprint() const {
  std::ostringstream text;
  text << "bits=";
  for (std::size_t i = 0; i < bitlengths.size(); ++i) text << (i ? "," : "") << bitlengths[i];
  text << ";per_n=" << semiprimes_per_n << ";seeds=" << seeds_per_instance << ";strategy=" << to_string(strategy)
       << ";encoder=" << encoder::to_string(algorithm) << ";solver=" << (external_cmd ? *external_cmd : "embedded")
       << ";master=" << master_seed << ";time_limit=" << (time_limit ? format_double(*time_limit) : "none");
  return hex64(fnv1a(text.str()));
}

void Dataset::sort() {
  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.n_bits != b.n_bits) return a.n_bits < b.n_bits;
    if (a.n != b.n) return a.n < b.n;
    return a.solver_seed < b.solver_seed;
  });
}

std::vector<numtheory::Semiprime> plan_semiprimes(const ExperimentPlan& plan, unsigned n_bits) {
  std::vector<numtheory::Semiprime> list;
  list.reserve(plan.semiprimes_per_n);
  // Distinct values while the pool allows; small bit lengths may repeat.
  const std::uint64_t max_draws = 64ull * plan.semiprimes_per_n;
  std::vector<numtheory::Semiprime> repeats;
  for (std::uint64_t i = 0; list.size() < plan.semiprimes_per_n && i < max_draws; ++i) {
    auto s = numtheory::gen_semiprime(n_bits, derive_seed(plan.master_seed, "semiprime", {n_bits, i}));
    bool seen = std::any_of(list.begin(), list.end(), [&](const auto& t) { return t.value == s.value; });
    (seen ? repeats : list).push_back(std::move(s));
  }
  for (std::size_t i = 0; list.size() < plan.semiprimes_per_n; ++i) list.push_back(repeats[i]);
  return list;
}

namespace {

using Clock = std::chrono::steady_clock;

// One unit of work: a single solver call (or one trial division).
struct Job {
  unsigned n_bits = 0;
  std::shared_ptr<const encoder::Encoded> instance;
  std::vector<Natural> targets;
  std::uint64_t solver_seed = 0;
  Natural trial_input;  // trial-division jobs only
};

RunRecord run_job(const ExperimentPlan& plan, const Job& job) {
  RunRecord r;
  r.strategy = plan.strategy;
  r.algorithm = plan.algorithm;
  r.solver = plan.solver_name();
  r.n_bits = job.n_bits;
  r.solver_seed = job.solver_seed;

  if (plan.strategy == Strategy::TrialDivision) {
    r.n = job.trial_input;
    auto start = Clock::now();
    auto [p, q] = numtheory::trial_division(job.trial_input);
    r.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    r.status = p * q == job.trial_input ? cnf::SolveStatus::Sat : cnf::SolveStatus::Unknown;
    return r;
  }

  r.n = job.targets.front();
  solver::SolveResult result;
  try {
    if (plan.external_cmd) {
      result = solver::solve_external(*plan.external_cmd, job.instance->formula, plan.time_limit.value_or(1e9));
    } else {
      solver::SolverConfig cfg;
      cfg.seed = job.solver_seed;
      cfg.time_limit = plan.time_limit;
      result = solver::solve(job.instance->formula, cfg);
    }
  } catch (const solver::ExternalSolverError& e) {
    std::cerr << "warning: external solver failed on N=" << r.n << ": " << e.what() << '\n';
    result = solver::SolveResult{};
  }
  r.status = result.status;
  r.wall_time_s = result.wall_time;
  r.conflicts = result.conflicts;
  r.decisions = result.decisions;

  if (r.status == cnf::SolveStatus::Sat) {
    bool verified = false;
    try {
      auto decoded = encoder::decode(job.instance->varmap, *result.assignment);
      const Natural& target = job.targets.at(decoded.matched_target);
      verified = decoded.p * decoded.q == target && bit_length(decoded.p) == job.instance->varmap.p_bits.size() &&
                 bit_length(decoded.q) == job.instance->varmap.q_bits.size();
      r.n = target;
      if (!job.instance->varmap.sel_vars.empty()) r.matched_target = decoded.matched_target;
    } catch (const std::exception& e) {
      std::cerr << "warning: undecodable model for N=" << r.n << ": " << e.what() << '\n';
    }
    if (!verified) {
      std::cerr << "warning: discarding unverified factorization for N=" << r.n << '\n';
      r.status = cnf::SolveStatus::Unknown;
      r.matched_target.reset();
    }
  }
  return r;
}

std::vector<Job> build_jobs(const ExperimentPlan& plan) {
  std::vector<Job> jobs;
  for (unsigned n : plan.bitlengths) {
    auto semiprimes = plan_semiprimes(plan, n);
    if (plan.strategy == Strategy::TrialDivision) {
      for (const auto& s : semiprimes) {
        Job job;
        job.n_bits = n;
        job.trial_input = s.value;
        jobs.push_back(std::move(job));
      }
      continue;
    }

    if (plan.strategy == Strategy::MultiTarget) {
      // One shared multiplier needs one factor split; keep the targets
      // whose split matches the first semiprime's.
      const unsigned m_p = bit_length(semiprimes.front().p);
      const unsigned m_q = bit_length(semiprimes.front().q);
      encoder::EncodeSpec spec;
      spec.n_bits = n;
      spec.algorithm = plan.algorithm;
      spec.m_p = m_p;
      spec.m_q = m_q;
      std::set<Natural> seen;
      for (const auto& s : semiprimes) {
        if (bit_length(s.p) == m_p && bit_length(s.q) == m_q && seen.insert(s.value).second) {
          spec.targets.push_back(s.value);
        }
      }
      auto instance = std::make_shared<const encoder::Encoded>(encoder::encode_multi_target(spec));
      for (unsigned k = 0; k < plan.seeds_per_instance; ++k) {
        Job job;
        job.n_bits = n;
        job.instance = instance;
        job.targets = spec.targets;
        job.solver_seed = derive_seed(plan.master_seed, "solver", {n, 0, k});
        jobs.push_back(std::move(job));
      }
      continue;
    }

    for (unsigned i = 0; i < semiprimes.size(); ++i) {
      const auto& s = semiprimes[i];
      encoder::EncodeSpec spec;
      spec.n_bits = n;
      spec.targets = {s.value};
      spec.algorithm = plan.algorithm;
      spec.m_p = bit_length(s.p);
      spec.m_q = bit_length(s.q);
      auto instance = std::make_shared<const encoder::Encoded>(encoder::encode(spec));
      for (unsigned k = 0; k < plan.seeds_per_instance; ++k) {
        Job job;
        job.n_bits = n;
        job.instance = instance;
        job.targets = spec.targets;
        job.solver_seed = derive_seed(plan.master_seed, "solver", {n, i, k});
        jobs.push_back(std::move(job));
      }
    }
  }
  return jobs;
}

}  // namespace

Dataset run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<Job> jobs = build_jobs(plan);
  std::vector<RunRecord> records(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) records[i] = run_job(plan, jobs[i]);
  };
  unsigned threads = std::min<unsigned>(plan.workers, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  Dataset d;
  d.plan_fingerprint = plan.fingerprint();
  d.records = std::move(records);
  d.sort();
  return d;
}

double apply_stat(std::vector<double> values, Stat stat) {
  if (values.empty()) throw std::invalid_argument("statistic of an empty sample");
  switch (stat) {
    case Stat::Mean: {
      double sum = 0.0;
      for (double v : values) sum += v;
      return sum / static_cast<double>(values.size());
    }
    case Stat::Sum: {
      double sum = 0.0;
      for (double v : values) sum += v;
      return sum;
    }
    case Stat::Min: return *std::min_element(values.begin(), values.end());
    case Stat::Median: {
      std::sort(values.begin(), values.end());
      std::size_t mid = values.size() / 2;
      return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    }
  }
  return 0.0;
}

Aggregate aggregate(const Dataset& d, Stat stat) {
  Aggregate result;
  std::map<std::pair<unsigned, Natural>, std::vector<double>> groups;
  std::set<std::pair<unsigned, Natural>> keys;
  for (const RunRecord& r : d.records) {
    keys.insert({r.n_bits, r.n});
    if (r.status == cnf::SolveStatus::Unknown) {
      ++result.unknown_excluded;
      continue;
    }
    groups[{r.n_bits, r.n}].push_back(r.wall_time_s);
  }
  for (const auto& key : keys) {
    auto it = groups.find(key);
    if (it == groups.end()) {
      std::cerr << "warning: no completed runs for N=" << key.second << "; excluded\n";
      continue;
    }
    result.points.push_back({key.first, key.second, apply_stat(it->second, stat)});
  }
  return result;
}

std::vector<std::pair<unsigned, double>> per_bitlength(const std::vector<AggregatePoint>& points, Stat stat) {
  std::map<unsigned, std::vector<double>> groups;
  for (const auto& p : points) groups[p.n_bits].push_back(p.seconds);
  std::vector<std::pair<unsigned, double>> out;
  for (auto& [n, values] : groups) out.emplace_back(n, apply_stat(std::move(values), stat));
  return out;
}

namespace {

const std::vector<std::string> kColumns = {"strategy",    "encoder", "solver",      "n_bits",
                                           "N",           "solver_seed", "status", "wall_time_s",
                                           "conflicts",   "decisions",   "matched_target"};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename Int>
Int parse_uint(const std::string& s, const std::string& column, std::size_t line_no) {
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError("line " + std::to_string(line_no) + ": bad value '" + s + "' in column '" + column + "'");
  }
  return value;
}

double parse_double(const std::string& s, const std::string& column, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError("line " + std::to_string(line_no) + ": bad value '" + s + "' in column '" + column + "'");
  }
  return value;
}

}  // namespace

void save_csv(const Dataset& d, std::ostream& out) {
  out << "# plan=" << d.plan_fingerprint << '\n';
  for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const RunRecord& r : d.records) {
    out << to_string(r.strategy) << ',' << encoder::to_string(r.algorithm) << ',' << r.solver << ',' << r.n_bits
        << ',' << r.n << ',' << r.solver_seed << ',' << cnf::to_string(r.status) << ','
        << format_double(r.wall_time_s) << ',' << r.conflicts << ',' << r.decisions << ',';
    if (r.matched_target) out << *r.matched_target;
    out << '\n';
  }
}

Dataset load_csv(std::istream& in) {
  Dataset d;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# plan=", 0) == 0) {
      d.plan_fingerprint = line.substr(7);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) throw CsvError("dataset CSV: missing header row");

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const auto& name : kColumns) {
    if (!column.count(name)) throw CsvError("dataset CSV: missing column '" + name + "'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw CsvError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                     " fields, got " + std::to_string(fields.size()));
    }
    auto get = [&](const std::string& name) -> const std::string& { return fields[column.at(name)]; };
    RunRecord r;
    try {
      r.strategy = parse_strategy(get("strategy"));
      r.algorithm = encoder::parse_algorithm(get("encoder"));
      r.status = cnf::parse_status(get("status"));
      r.n = parse_natural(get("N"));
    } catch (const std::invalid_argument& e) {
      throw CsvError("line " + std::to_string(line_no) + ": " + e.what());
    }
    r.solver = get("solver");
    r.n_bits = parse_uint<unsigned>(get("n_bits"), "n_bits", line_no);
    r.solver_seed = parse_uint<std::uint64_t>(get("solver_seed"), "solver_seed", line_no);
    r.wall_time_s = parse_double(get("wall_time_s"), "wall_time_s", line_no);
    r.conflicts = parse_uint<std::uint64_t>(get("conflicts"), "conflicts", line_no);
    r.decisions = parse_uint<std::uint64_t>(get("decisions"), "decisions", line_no);
    if (!get("matched_target").empty()) {
      r.matched_target = parse_uint<std::size_t>(get("matched_target"), "matched_target", line_no);
    }
    d.records.push_back(std::move(r));
  }
  return d;
}

void save_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open " + path + " for writing");
  save_csv(d, out);
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  return load_csv(in);
}

}  // namespace satfactor::bench
