#include "satfactor/dimacs.hpp"

#include <charconv>
#include <map>
#include <sstream>
#include <vector>

namespace satfactor::cnf {

DimacsError::DimacsError(DimacsErrorKind kind, std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename Int>
bool parse_int(std::string_view token, Int& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

void emit_bits(std::ostringstream& out, const char* tag, const std::vector<Var>& vars) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    out << "c varmap " << tag << ' ' << i << ' ' << vars[i].id() << '\n';
  }
}

// Collects `c varmap` / `c target` comments; indices may arrive in any order.
struct AnnotationCollector {
  std::map<std::string, std::map<std::size_t, std::uint32_t>> bits;
  std::map<std::size_t, Natural> targets;
  bool seen = false;

  bool accept(const std::vector<std::string_view>& tok, std::size_t line_no) {
    if (tok.size() < 2) return false;
    if (tok[1] == "varmap") {
      if (tok.size() != 5) throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "malformed varmap annotation");
      std::string tag(tok[2]);
      if (tag != "p" && tag != "q" && tag != "out" && tag != "sel") {
        throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "unknown varmap tag '" + tag + "'");
      }
      std::size_t index = 0;
      std::uint32_t var = 0;
      if (!parse_int(tok[3], index) || !parse_int(tok[4], var) || var == 0) {
        throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "malformed varmap annotation");
      }
      if (!bits[tag].emplace(index, var).second) {
        throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "duplicate varmap entry");
      }
      seen = true;
      return true;
    }
    if (tok[1] == "target") {
      if (tok.size() != 4) throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "malformed target annotation");
      std::size_t index = 0;
      if (!parse_int(tok[2], index)) {
        throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "malformed target index");
      }
      Natural value;
      try {
        value = parse_natural(std::string(tok[3]));
      } catch (const std::invalid_argument&) {
        throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "malformed target value");
      }
      if (!targets.emplace(index, value).second) {
        throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "duplicate target entry");
      }
      seen = true;
      return true;
    }
    return false;
  }

  std::vector<Var> dense(const std::string& tag, std::uint32_t num_vars, std::size_t line_no) const {
    std::vector<Var> out;
    auto it = bits.find(tag);
    if (it == bits.end()) return out;
    for (const auto& [index, var] : it->second) {
      if (index != out.size()) {
        throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "varmap " + tag + " indices are not contiguous");
      }
      if (var > num_vars) {
        throw DimacsError(DimacsErrorKind::VariableOutOfRange, line_no, "variable out of range in varmap " + tag);
      }
      out.emplace_back(var);
    }
    return out;
  }

  Annotations build(std::uint32_t num_vars, std::size_t line_no) const {
    Annotations a;
    a.varmap.p_bits = dense("p", num_vars, line_no);
    a.varmap.q_bits = dense("q", num_vars, line_no);
    a.varmap.out_bits = dense("out", num_vars, line_no);
    a.varmap.sel_vars = dense("sel", num_vars, line_no);
    for (const auto& [index, value] : targets) {
      if (index != a.targets.size()) {
        throw DimacsError(DimacsErrorKind::BadAnnotation, line_no, "target indices are not contiguous");
      }
      a.targets.push_back(value);
    }
    return a;
  }
};

}  // namespace

std::string write_dimacs(const Formula& f) {
  std::ostringstream out;
  if (f.annotations) {
    const VarMap& vm = f.annotations->varmap;
    emit_bits(out, "p", vm.p_bits);
    emit_bits(out, "q", vm.q_bits);
    emit_bits(out, "out", vm.out_bits);
    emit_bits(out, "sel", vm.sel_vars);
    for (std::size_t i = 0; i < f.annotations->targets.size(); ++i) {
      out << "c target " << i << ' ' << f.annotations->targets[i] << '\n';
    }
  }
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const Clause& c : f.clauses) {
    for (Lit l : c.literals()) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
  return out.str();
}

Formula parse_dimacs(std::string_view text) {
  Formula f;
  AnnotationCollector annotations;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  std::vector<Lit> pending;
  std::size_t pending_line = 0;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "c") {
      annotations.accept(tok, line_no);
      continue;
    }
    if (tok[0][0] == 'c') continue;  // "cfoo" style comments
    if (tok[0] == "%") break;
    if (tok[0] == "p") {
      if (have_header) throw DimacsError(DimacsErrorKind::MalformedHeader, line_no, "duplicate header");
      std::uint32_t vars = 0;
      if (tok.size() != 4 || tok[1] != "cnf" || !parse_int(tok[2], vars) || !parse_int(tok[3], declared_clauses)) {
        throw DimacsError(DimacsErrorKind::MalformedHeader, line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
      }
      f.num_vars = vars;
      have_header = true;
      continue;
    }
    if (!have_header) throw DimacsError(DimacsErrorKind::MissingHeader, line_no, "clause before 'p cnf' header");
    for (std::string_view t : tok) {
      std::int64_t value = 0;
      if (!parse_int(t, value)) {
        throw DimacsError(DimacsErrorKind::BadToken, line_no, "invalid literal '" + std::string(t) + "'");
      }
      if (value == 0) {
        if (pending.empty()) throw DimacsError(DimacsErrorKind::InvalidClause, line_no, "empty clause");
        try {
          f.clauses.emplace_back(std::move(pending));
        } catch (const InvalidClause& e) {
          throw DimacsError(DimacsErrorKind::InvalidClause, line_no, e.what());
        }
        pending.clear();
        continue;
      }
      if (static_cast<std::uint64_t>(value < 0 ? -value : value) > f.num_vars) {
        throw DimacsError(DimacsErrorKind::VariableOutOfRange, line_no,
                          "variable out of range: " + std::to_string(value) + " > " + std::to_string(f.num_vars));
      }
      if (pending.empty()) pending_line = line_no;
      pending.push_back(Lit::from_dimacs(value));
    }
  }

  if (!have_header) throw DimacsError(DimacsErrorKind::MissingHeader, line_no, "missing 'p cnf' header");
  if (!pending.empty()) {
    throw DimacsError(DimacsErrorKind::MissingTerminator, pending_line, "missing terminating 0");
  }
  if (f.clauses.size() != declared_clauses) {
    throw DimacsError(DimacsErrorKind::ClauseCountMismatch, line_no,
                      "clause count mismatch: header declares " + std::to_string(declared_clauses) + ", found " +
                          std::to_string(f.clauses.size()));
  }
  if (annotations.seen) f.annotations = annotations.build(f.num_vars, line_no);
  return f;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

SolveStatus parse_status(std::string_view s) {
  if (s == "SAT") return SolveStatus::Sat;
  if (s == "UNSAT") return SolveStatus::Unsat;
  if (s == "UNKNOWN") return SolveStatus::Unknown;
  throw std::invalid_argument("unknown solve status '" + std::string(s) + "'");
}

SolverOutput parse_solver_output(std::string_view text) {
  SolverOutput result;
  bool said_sat = false;
  bool said_unsat = false;
  bool terminated = false;
  Assignment model;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto tok = split_ws(text.substr(pos, end - pos));
    pos = end + 1;
    if (tok.empty()) continue;
    if (tok[0] == "s" && tok.size() >= 2) {
      if (tok[1] == "SATISFIABLE") said_sat = true;
      if (tok[1] == "UNSATISFIABLE") said_unsat = true;
      continue;
    }
    if (tok[0] != "v") continue;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      std::int64_t value = 0;
      if (!parse_int(tok[i], value)) {
        result.warning = "ignoring malformed v-line token '" + std::string(tok[i]) + "'";
        continue;
      }
      if (value == 0) {
        terminated = true;
        continue;
      }
      model.set(Var(static_cast<std::uint32_t>(value < 0 ? -value : value)), value > 0);
    }
  }

  if (said_sat && said_unsat) {
    result.warning = "conflicting s-lines";
    return result;
  }
  if (said_unsat) {
    result.status = SolveStatus::Unsat;
    return result;
  }
  if (said_sat) {
    if (!terminated) {
      result.warning = "s SATISFIABLE without a complete v-line model";
      return result;
    }
    result.status = SolveStatus::Sat;
    result.assignment = std::move(model);
  }
  return result;
}

std::string format_solver_output(SolveStatus status, const Assignment* model) {
  std::ostringstream out;
  switch (status) {
    case SolveStatus::Sat: out << "s SATISFIABLE\n"; break;
    case SolveStatus::Unsat: out << "s UNSATISFIABLE\n"; break;
    case SolveStatus::Unknown: out << "s UNKNOWN\n"; break;
  }
  if (status == SolveStatus::Sat && model != nullptr) {
    std::size_t on_line = 0;
    out << 'v';
    for (std::uint32_t v = 1; v <= model->num_vars(); ++v) {
      Value value = model->get(Var(v));
      if (value == Value::Unassigned) continue;
      out << ' ' << (value == Value::True ? static_cast<std::int64_t>(v) : -static_cast<std::int64_t>(v));
      if (++on_line == 16) {
        out << "\nv";
        on_line = 0;
      }
    }
    out << " 0\n";
  }
  return out.str();
}

}  // namespace satfactor::cnf
