#include "satfactor/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <random>
#include <vector>

namespace satfactor::solver {

void SolverConfig::validate() const {
  if (!(var_decay > 0.0 && var_decay < 1.0)) throw std::invalid_argument("var_decay must lie in (0, 1)");
  if (restart_base < 1) throw std::invalid_argument("restart_base must be >= 1");
  if (!(random_polarity_prob >= 0.0 && random_polarity_prob <= 1.0)) {
    throw std::invalid_argument("random_polarity_prob must lie in [0, 1]");
  }
  if (time_limit && !(*time_limit >= 0.0)) throw std::invalid_argument("time_limit must be >= 0");
}

namespace {

using Clock = std::chrono::steady_clock;

// Internal literal: 2 * var + sign, var 0-based.
using ILit = std::uint32_t;
using CRef = std::uint32_t;
constexpr CRef kNoReason = 0xFFFFFFFFu;
constexpr ILit kNoLit = 0xFFFFFFFFu;

constexpr ILit make_lit(std::uint32_t var, bool negated) { return var * 2 + (negated ? 1 : 0); }
constexpr std::uint32_t var_of(ILit l) { return l >> 1; }
constexpr bool sign_of(ILit l) { return l & 1; }
constexpr ILit neg(ILit l) { return l ^ 1; }

enum : std::int8_t { kFalse = 0, kTrue = 1, kUndef = 2 };

constexpr std::uint32_t kCoreLbd = 3;

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

// Clause arena layout: [size, meta, activity-bits, lits...];
// meta = lbd << 2 | deleted << 1 | learnt.
class Arena {
 public:
  CRef alloc(const std::vector<ILit>& lits, bool learnt, std::uint32_t lbd) {
    CRef c = static_cast<CRef>(mem_.size());
    mem_.push_back(static_cast<std::uint32_t>(lits.size()));
    mem_.push_back((lbd << 2) | (learnt ? 1u : 0u));
    mem_.push_back(std::bit_cast<std::uint32_t>(0.0f));
    mem_.insert(mem_.end(), lits.begin(), lits.end());
    return c;
  }
  std::uint32_t size(CRef c) const { return mem_[c]; }
  ILit* lits(CRef c) { return &mem_[c + 3]; }
  const ILit* lits(CRef c) const { return &mem_[c + 3]; }
  bool learnt(CRef c) const { return mem_[c + 1] & 1u; }
  bool deleted(CRef c) const { return mem_[c + 1] & 2u; }
  void mark_deleted(CRef c) {
    mem_[c + 1] |= 2u;
    wasted_ += 3 + size(c);
  }
  std::uint32_t lbd(CRef c) const { return mem_[c + 1] >> 2; }
  float activity(CRef c) const { return std::bit_cast<float>(mem_[c + 2]); }
  void set_activity(CRef c, float a) { mem_[c + 2] = std::bit_cast<std::uint32_t>(a); }
  std::size_t used() const { return mem_.size(); }
  std::size_t wasted() const { return wasted_; }

  // Copies the given live clauses into a fresh arena, returning new refs.
  std::vector<CRef> compact(const std::vector<CRef>& live) {
    Arena fresh;
    std::vector<CRef> moved;
    moved.reserve(live.size());
    for (CRef c : live) {
      CRef n = static_cast<CRef>(fresh.mem_.size());
      fresh.mem_.insert(fresh.mem_.end(), mem_.begin() + c, mem_.begin() + c + 3 + size(c));
      moved.push_back(n);
    }
    *this = std::move(fresh);
    return moved;
  }

 private:
  std::vector<std::uint32_t> mem_;
  std::size_t wasted_ = 0;
};

struct Watcher {
  CRef cref;
  ILit blocker;
};

// Binary max-heap over variables keyed by activity; ties go to the lower id.
class VarHeap {
 public:
  explicit VarHeap(const std::vector<double>& activity) : act_(activity) {}

  void reserve(std::size_t n) { index_.assign(n, -1); }
  bool contains(std::uint32_t v) const { return index_[v] >= 0; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::uint32_t at(std::size_t i) const { return heap_[i]; }

  void insert(std::uint32_t v) {
    if (contains(v)) return;
    index_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    sift_up(heap_.size() - 1);
  }
  void increased(std::uint32_t v) {
    if (contains(v)) sift_up(static_cast<std::size_t>(index_[v]));
  }
  std::uint32_t pop() {
    std::uint32_t top = heap_.front();
    heap_.front() = heap_.back();
    index_[heap_.front()] = 0;
    heap_.pop_back();
    index_[top] = -1;
    if (!heap_.empty()) sift_down(0);
    return top;
  }

 private:
  bool before(std::uint32_t a, std::uint32_t b) const {
    if (act_[a] != act_[b]) return act_[a] > act_[b];
    return a < b;
  }
  void sift_up(std::size_t i) {
    std::uint32_t v = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!before(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      index_[heap_[i]] = static_cast<int>(i);
      i = parent;
    }
    heap_[i] = v;
    index_[v] = static_cast<int>(i);
  }
  void sift_down(std::size_t i) {
    std::uint32_t v = heap_[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size()) break;
      if (child + 1 < heap_.size() && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], v)) break;
      heap_[i] = heap_[child];
      index_[heap_[i]] = static_cast<int>(i);
      i = child;
    }
    heap_[i] = v;
    index_[v] = static_cast<int>(i);
  }

  const std::vector<double>& act_;
  std::vector<std::uint32_t> heap_;
  std::vector<int> index_;
};

class Cdcl {
 public:
  Cdcl(const cnf::Formula& f, const SolverConfig& cfg)
      : cfg_(cfg), rng_(cfg.seed), num_vars_(f.num_vars), heap_(activity_) {
    assigns_.assign(num_vars_, kUndef);
    level_.assign(num_vars_, 0);
    reason_.assign(num_vars_, kNoReason);
    polarity_.resize(num_vars_);
    activity_.assign(num_vars_, 0.0);
    seen_.assign(num_vars_, 0);
    watches_.resize(2 * static_cast<std::size_t>(num_vars_));
    heap_.reserve(num_vars_);
    for (std::uint32_t v = 0; v < num_vars_; ++v) {
      polarity_[v] = (rng_() & 1) != 0;
      heap_.insert(v);
    }
    load(f);
  }

  SolveResult run(Clock::time_point start) {
    start_ = start;
    SolveResult r;
    r.status = search_all();
    r.conflicts = conflicts_;
    r.decisions = decisions_;
    r.propagations = propagations_;
    if (r.status == SolveStatus::Sat) {
      cnf::Assignment model(num_vars_);
      for (std::uint32_t v = 0; v < num_vars_; ++v) model.set(cnf::Var(v + 1), assigns_[v] == kTrue);
      r.assignment = std::move(model);
    }
    return r;
  }

 private:
  std::int8_t value(ILit l) const {
    std::int8_t a = assigns_[var_of(l)];
    if (a == kUndef) return kUndef;
    return static_cast<std::int8_t>(a ^ static_cast<std::int8_t>(sign_of(l)));
  }
  std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

  void load(const cnf::Formula& f) {
    std::vector<ILit> lits;
    for (const cnf::Clause& c : f.clauses) {
      lits.clear();
      for (cnf::Lit l : c.literals()) lits.push_back(make_lit(l.var().id() - 1, l.negated()));
      if (lits.size() == 1) {
        std::int8_t v = value(lits[0]);
        if (v == kFalse) unsat_at_root_ = true;
        if (v == kUndef) enqueue(lits[0], kNoReason);
        continue;
      }
      CRef cr = arena_.alloc(lits, false, 0);
      clauses_.push_back(cr);
      attach(cr);
    }
  }

  void attach(CRef c) {
    const ILit* l = arena_.lits(c);
    watches_[l[0]].push_back({c, l[1]});
    watches_[l[1]].push_back({c, l[0]});
  }

  void enqueue(ILit l, CRef reason) {
    std::uint32_t v = var_of(l);
    assigns_[v] = sign_of(l) ? kFalse : kTrue;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  CRef propagate() {
    CRef conflict = kNoReason;
    while (qhead_ < trail_.size()) {
      ILit p = trail_[qhead_++];
      ++propagations_;
      ILit false_lit = neg(p);
      std::vector<Watcher>& ws = watches_[false_lit];
      std::size_t i = 0;
      std::size_t j = 0;
      const std::size_t n = ws.size();
      while (i < n) {
        Watcher w = ws[i++];
        if (value(w.blocker) == kTrue) {
          ws[j++] = w;
          continue;
        }
        ILit* lits = arena_.lits(w.cref);
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        ILit first = lits[0];
        Watcher kept{w.cref, first};
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = kept;
          continue;
        }
        bool moved = false;
        const std::uint32_t size = arena_.size(w.cref);
        for (std::uint32_t k = 2; k < size; ++k) {
          if (value(lits[k]) != kFalse) {
            std::swap(lits[1], lits[k]);
            watches_[lits[1]].push_back(kept);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = kept;
        if (value(first) == kFalse) {
          conflict = w.cref;
          qhead_ = trail_.size();
          while (i < n) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason) break;
    }
    return conflict;
  }

  void bump_var(std::uint32_t v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    heap_.increased(v);
  }

  void bump_clause(CRef c) {
    float a = arena_.activity(c) + static_cast<float>(cla_inc_);
    arena_.set_activity(c, a);
    if (a > 1e20f) {
      for (CRef l : learnts_) arena_.set_activity(l, arena_.activity(l) * 1e-20f);
      cla_inc_ *= 1e-20;
    }
  }

  std::uint32_t abstract_level(std::uint32_t v) const { return 1u << (level_[v] & 31); }

  bool redundant(ILit p, std::uint32_t abstract_levels) {
    analyze_stack_.clear();
    analyze_stack_.push_back(p);
    std::size_t top = to_clear_.size();
    while (!analyze_stack_.empty()) {
      CRef c = reason_[var_of(analyze_stack_.back())];
      analyze_stack_.pop_back();
      const ILit* lits = arena_.lits(c);
      for (std::uint32_t i = 1; i < arena_.size(c); ++i) {
        ILit q = lits[i];
        std::uint32_t v = var_of(q);
        if (seen_[v] || level_[v] == 0) continue;
        if (reason_[v] != kNoReason && (abstract_level(v) & abstract_levels) != 0) {
          seen_[v] = 1;
          analyze_stack_.push_back(q);
          to_clear_.push_back(q);
        } else {
          for (std::size_t k = top; k < to_clear_.size(); ++k) seen_[var_of(to_clear_[k])] = 0;
          to_clear_.resize(top);
          return false;
        }
      }
    }
    return true;
  }

  // First-UIP learning; learnt[0] is the asserting literal and learnt[1]
  // (if any) sits at the backjump level.
  void analyze(CRef conflict, std::vector<ILit>& learnt, std::uint32_t& backjump, std::uint32_t& lbd) {
    learnt.clear();
    learnt.push_back(kNoLit);
    int path = 0;
    ILit p = kNoLit;
    std::size_t index = trail_.size();
    CRef c = conflict;
    do {
      if (arena_.learnt(c)) bump_clause(c);
      const ILit* lits = arena_.lits(c);
      for (std::uint32_t i = (p == kNoLit ? 0 : 1); i < arena_.size(c); ++i) {
        ILit q = lits[i];
        std::uint32_t v = var_of(q);
        if (seen_[v] || level_[v] == 0) continue;
        bump_var(v);
        seen_[v] = 1;
        if (level_[v] >= decision_level()) {
          ++path;
        } else {
          learnt.push_back(q);
        }
      }
      while (!seen_[var_of(trail_[--index])]) {
      }
      p = trail_[index];
      c = reason_[var_of(p)];
      seen_[var_of(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = neg(p);

    to_clear_.assign(learnt.begin(), learnt.end());
    std::uint32_t levels = 0;
    for (std::size_t i = 1; i < learnt.size(); ++i) levels |= abstract_level(var_of(learnt[i]));
    std::size_t j = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      std::uint32_t v = var_of(learnt[i]);
      if (reason_[v] == kNoReason || !redundant(learnt[i], levels)) learnt[j++] = learnt[i];
    }
    learnt.resize(j);
    for (ILit l : to_clear_) seen_[var_of(l)] = 0;

    backjump = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i) {
        if (level_[var_of(learnt[i])] > level_[var_of(learnt[max_i])]) max_i = i;
      }
      std::swap(learnt[1], learnt[max_i]);
      backjump = level_[var_of(learnt[1])];
    }

    lbd_stamp_++;
    lbd = 0;
    if (lbd_marks_.size() < decision_level() + 1) lbd_marks_.resize(decision_level() + 1, 0);
    for (ILit l : learnt) {
      std::uint32_t lv = level_[var_of(l)];
      if (lbd_marks_[lv] != lbd_stamp_) {
        lbd_marks_[lv] = lbd_stamp_;
        ++lbd;
      }
    }
  }

  void cancel_until(std::uint32_t target) {
    if (decision_level() <= target) return;
    for (std::size_t i = trail_.size(); i-- > trail_lim_[target];) {
      std::uint32_t v = var_of(trail_[i]);
      assigns_[v] = kUndef;
      reason_[v] = kNoReason;
      polarity_[v] = !sign_of(trail_[i]);
      heap_.insert(v);
    }
    trail_.resize(trail_lim_[target]);
    trail_lim_.resize(target);
    qhead_ = trail_.size();
  }

  double random_unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  ILit pick_branch() {
    std::uint32_t next = num_vars_;
    bool random_phase = false;
    if (cfg_.random_polarity_prob > 0.0 && !heap_.empty() && random_unit() < cfg_.random_polarity_prob) {
      std::uint32_t v = heap_.at(rng_() % heap_.size());
      if (assigns_[v] == kUndef) {
        next = v;
        random_phase = true;
      }
    }
    while (next == num_vars_ || assigns_[next] != kUndef) {
      if (heap_.empty()) return kNoLit;
      next = heap_.pop();
    }
    bool positive = random_phase ? (rng_() & 1) != 0 : polarity_[next];
    return make_lit(next, !positive);
  }

  bool locked(CRef c) const {
    ILit first = arena_.lits(c)[0];
    return value(first) == kTrue && reason_[var_of(first)] == c;
  }

  void reduce_db() {
    std::vector<CRef> candidates;
    std::vector<CRef> keep;
    for (CRef c : learnts_) {
      if (arena_.lbd(c) <= kCoreLbd || locked(c)) {
        keep.push_back(c);
      } else {
        candidates.push_back(c);
      }
    }
    // Worst first: high LBD, then low activity, then age (ref order).
    std::sort(candidates.begin(), candidates.end(), [&](CRef a, CRef b) {
      if (arena_.lbd(a) != arena_.lbd(b)) return arena_.lbd(a) > arena_.lbd(b);
      if (arena_.activity(a) != arena_.activity(b)) return arena_.activity(a) < arena_.activity(b);
      return a < b;
    });
    std::size_t drop = candidates.size() / 2;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (i < drop) {
        arena_.mark_deleted(candidates[i]);
      } else {
        keep.push_back(candidates[i]);
      }
    }
    std::sort(keep.begin(), keep.end());
    learnts_ = std::move(keep);
    rebuild();
  }

  // Compacts the arena when worthwhile and re-attaches every live clause.
  void rebuild() {
    if (arena_.wasted() * 4 > arena_.used()) {
      std::vector<CRef> live = clauses_;
      live.insert(live.end(), learnts_.begin(), learnts_.end());
      std::vector<CRef> moved = arena_.compact(live);
      std::vector<CRef> remap_from = live;
      // Reasons only ever point at live clauses (locked clauses are kept).
      std::vector<std::pair<CRef, CRef>> pairs(live.size());
      for (std::size_t i = 0; i < live.size(); ++i) pairs[i] = {live[i], moved[i]};
      std::sort(pairs.begin(), pairs.end());
      auto lookup = [&](CRef old) {
        auto it = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(old, CRef{0}));
        return it->second;
      };
      for (ILit l : trail_) {
        CRef& r = reason_[var_of(l)];
        if (r != kNoReason) r = lookup(r);
      }
      clauses_.assign(moved.begin(), moved.begin() + static_cast<std::ptrdiff_t>(clauses_.size()));
      learnts_.assign(moved.begin() + static_cast<std::ptrdiff_t>(clauses_.size()), moved.end());
    }
    for (auto& ws : watches_) ws.clear();
    for (CRef c : clauses_) attach(c);
    for (CRef c : learnts_) attach(c);
  }

  bool out_of_budget() {
    if (cfg_.conflict_limit && conflicts_ >= *cfg_.conflict_limit) return true;
    if (cfg_.time_limit) {
      double elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
      if (elapsed >= *cfg_.time_limit) return true;
    }
    return false;
  }

  SolveStatus search_all() {
    if (unsat_at_root_) return SolveStatus::Unsat;
    if (propagate() != kNoReason) return SolveStatus::Unsat;
    if (cfg_.time_limit && *cfg_.time_limit <= 0.0) return SolveStatus::Unknown;

    std::uint64_t restarts = 0;
    std::vector<ILit> learnt;
    std::uint64_t next_reduce = conflicts_ + reduce_interval_;
    std::uint64_t steps = 0;
    for (;;) {
      std::uint64_t budget = static_cast<std::uint64_t>(luby(2.0, restarts) * cfg_.restart_base);
      std::uint64_t restart_at = conflicts_ + budget;
      for (;;) {
        CRef conflict = propagate();
        if (conflict != kNoReason) {
          ++conflicts_;
          if (decision_level() == 0) return SolveStatus::Unsat;
          std::uint32_t backjump = 0;
          std::uint32_t lbd = 0;
          analyze(conflict, learnt, backjump, lbd);
          cancel_until(backjump);
          if (learnt.size() == 1) {
            enqueue(learnt[0], kNoReason);
          } else {
            CRef c = arena_.alloc(learnt, true, lbd);
            learnts_.push_back(c);
            attach(c);
            bump_clause(c);
            enqueue(learnt[0], c);
          }
          var_inc_ /= cfg_.var_decay;
          cla_inc_ /= 0.999;
          if (out_of_budget()) return SolveStatus::Unknown;
          continue;
        }
        if (conflicts_ >= restart_at) {
          cancel_until(0);
          break;
        }
        if (conflicts_ >= next_reduce) {
          reduce_db();
          reduce_interval_ = static_cast<std::uint64_t>(static_cast<double>(reduce_interval_) * 1.1);
          next_reduce = conflicts_ + reduce_interval_;
        }
        if (cfg_.time_limit && (++steps & 255) == 0 && out_of_budget()) return SolveStatus::Unknown;
        ILit decision = pick_branch();
        if (decision == kNoLit) return SolveStatus::Sat;
        ++decisions_;
        trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
        enqueue(decision, kNoReason);
      }
      ++restarts;
    }
  }

  const SolverConfig& cfg_;
  std::mt19937_64 rng_;
  std::uint32_t num_vars_;
  Clock::time_point start_;

  Arena arena_;
  std::vector<CRef> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;

  std::vector<std::int8_t> assigns_;
  std::vector<std::uint32_t> level_;
  std::vector<CRef> reason_;
  std::vector<bool> polarity_;
  std::vector<double> activity_;
  VarHeap heap_;
  std::vector<ILit> trail_;
  std::vector<std::uint32_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<char> seen_;
  std::vector<ILit> analyze_stack_;
  std::vector<ILit> to_clear_;
  std::vector<std::uint64_t> lbd_marks_;
  std::uint64_t lbd_stamp_ = 0;

  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  std::uint64_t reduce_interval_ = 4000;
  bool unsat_at_root_ = false;

  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
  std::uint64_t propagations_ = 0;
};

}  // namespace

SolveResult solve(const cnf::Formula& f, const SolverConfig& cfg) {
  cfg.validate();
  auto start = Clock::now();
  Cdcl cdcl(f, cfg);
  SolveResult result = cdcl.run(start);
  result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  if (result.status == SolveStatus::Sat && !cnf::evaluate(f, *result.assignment)) {
    throw std::logic_error("embedded solver produced a model that does not satisfy the formula");
  }
  return result;
}

}  // namespace satfactor::solver
