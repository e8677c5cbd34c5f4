#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "sgs/mathprog.hpp"

namespace sgs {

namespace {

template <class Scalar>
struct Tolerance;
template <>
struct Tolerance<double> {
  static double abs(double v) { return std::abs(v); }
};
template <>
struct Tolerance<Rational> {
  static Rational abs(const Rational& v) { return sgs::abs(v); }
};

template <class Scalar>
VerifyReport verify_impl(const MathProgram& prog, const Vec<Scalar>& state_values,
                         const Scalar& tol) {
  VerifyReport rep;
  Vec<Scalar> x(prog.num_vars());
  for (int v = 0; v < prog.num_states; ++v) x[v] = state_values[v];
  for (int v = prog.num_states; v < prog.num_vars(); ++v) x[v] = Scalar(0);

  Scalar max_res(0);
  auto note = [&](const Scalar& res, const std::string& what) {
    if (res > max_res) max_res = res;
    if (res > tol) {
      std::ostringstream os;
      if constexpr (std::is_same_v<Scalar, Rational>)
        os << what << " residual " << res.to_double();
      else
        os << what << " residual " << res;
      rep.violations.push_back(os.str());
    }
  };

  // groups resolve auxiliary targets in order (inner groups come first)
  for (size_t gi = 0; gi < prog.groups.size(); ++gi) {
    const Group& grp = prog.groups[gi];
    Scalar best = grp.operands[0].template eval<Scalar>(x);
    int chosen = 0;
    for (size_t k = 1; k < grp.operands.size(); ++k) {
      Scalar v = grp.operands[k].template eval<Scalar>(x);
      if (grp.op == GroupOp::Max ? (best < v) : (v < best)) {
        best = v;
        chosen = static_cast<int>(k);
      }
    }
    rep.group_choice.push_back(chosen);
    if (grp.target >= prog.num_states)
      x[grp.target] = best;  // auxiliary variable defined by its group
    else
      note(Tolerance<Scalar>::abs(x[grp.target] - best),
           "group for " + prog.var_name(grp.target));
  }

  for (int v = 0; v < prog.num_vars(); ++v) {
    if (v < prog.num_states && prog.pin[v]) {
      Scalar want;
      if constexpr (std::is_same_v<Scalar, Rational>)
        want = *prog.pin[v];
      else
        want = prog.pin[v]->to_double();
      note(Tolerance<Scalar>::abs(x[v] - want), "pin of " + prog.var_name(v));
    }
  }

  for (size_t ci = 0; ci < prog.constraints.size(); ++ci) {
    const Constraint& c = prog.constraints[ci];
    Scalar e = c.expr.template eval<Scalar>(x);
    Scalar res(0);
    switch (c.rel) {
      case Rel::Eq: res = Tolerance<Scalar>::abs(e); break;
      case Rel::Le: res = e > Scalar(0) ? e : Scalar(0); break;
      case Rel::Ge: res = e < Scalar(0) ? -e : Scalar(0); break;
    }
    note(res, "constraint " + std::to_string(ci));
  }

  Scalar objective(0);
  for (const auto& term : prog.objective) {
    Scalar p(1);
    for (const auto& f : term.factors) p *= f.template eval<Scalar>(x);
    objective += p;
  }

  if constexpr (std::is_same_v<Scalar, Rational>) {
    rep.objective = objective.to_double();
    rep.max_residual = max_res.to_double();
    rep.pass = objective <= tol && max_res <= tol;
  } else {
    rep.objective = objective;
    rep.max_residual = max_res;
    rep.pass = objective <= tol && max_res <= tol;
  }
  return rep;
}

std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print_affine(std::ostream& os, const MathProgram& prog, const Affine& e) {
  os << e.constant.str();
  for (const auto& t : e.terms) os << " + " << t.coeff.str() << " " << prog.var_name(t.var);
}

const char* rel_text(Rel r) {
  switch (r) {
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    case Rel::Ge: return ">=";
  }
  return "?";
}

std::string emit_native(const MathProgram& prog) {
  std::ostringstream os;
  os << "sgs-program\n";
  os << "states " << prog.num_states << "\n";
  os << "aux " << prog.num_aux << "\n";
  for (int s = 0; s < prog.num_states; ++s)
    os << "owner " << s << " " << owner_name(prog.owner[s]) << "\n";
  for (int s = 0; s < prog.num_states; ++s)
    if (prog.pin[s]) os << "pin v_" << s << " = " << prog.pin[s]->str() << "\n";
  for (int s = 0; s < prog.num_states; ++s)
    for (const auto& e : prog.action_exprs[s]) {
      os << "act v_" << s << " : ";
      print_affine(os, prog, e);
      os << "\n";
    }
  for (const auto& term : prog.objective) {
    os << "term ";
    for (size_t i = 0; i < term.factors.size(); ++i) {
      if (i) os << " | ";
      print_affine(os, prog, term.factors[i]);
    }
    os << "\n";
  }
  for (const auto& c : prog.constraints) {
    os << "con ";
    print_affine(os, prog, c.expr);
    os << " " << rel_text(c.rel) << " 0\n";
  }
  for (const auto& grp : prog.groups) {
    os << "group " << prog.var_name(grp.target) << " = "
       << (grp.op == GroupOp::Max ? "max" : "min") << " { ";
    for (size_t i = 0; i < grp.operands.size(); ++i) {
      if (i) os << " ; ";
      print_affine(os, prog, grp.operands[i]);
    }
    os << " }\n";
  }
  os << "end\n";
  return os.str();
}

// Quadratic monomial accumulator keyed by variable pair (i <= j); -1 marks
// the constant / linear slot.
using QuadKey = std::pair<int, int>;

void expand_term(const ProductTerm& term, std::map<QuadKey, Rational>& acc) {
  if (term.factors.size() == 1) {
    const Affine& f = term.factors[0];
    acc[{-1, -1}] += f.constant;
    for (const auto& t : f.terms) acc[{-1, t.var}] += t.coeff;
    return;
  }
  const Affine& a = term.factors[0];
  const Affine& b = term.factors[1];
  acc[{-1, -1}] += a.constant * b.constant;
  for (const auto& t : b.terms) acc[{-1, t.var}] += a.constant * t.coeff;
  for (const auto& t : a.terms) acc[{-1, t.var}] += b.constant * t.coeff;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      QuadKey key = ta.var <= tb.var ? QuadKey{ta.var, tb.var} : QuadKey{tb.var, ta.var};
      acc[key] += ta.coeff * tb.coeff;
    }
}

void print_lp_row(std::ostream& os, const MathProgram& prog, const Affine& e, Rel rel,
                  const std::string& extra_term = "") {
  bool any = false;
  for (const auto& t : e.terms) {
    double c = t.coeff.to_double();
    os << (c < 0 ? " - " : (any ? " + " : " ")) << fmt_double(std::abs(c)) << " "
       << prog.var_name(t.var);
    any = true;
  }
  if (!extra_term.empty()) {
    os << (any ? " + " : " ") << extra_term;
    any = true;
  }
  if (!any) os << " 0 v_0";
  os << " " << rel_text(rel) << " " << fmt_double(-e.constant.to_double()) << "\n";
}

std::string emit_lp(const MathProgram& prog) {
  if (prog.max_degree() > 2)
    throw PreconditionError(
        "lp-style emission needs a quadratic program; apply the 2Act transform first");

  std::ostringstream os;
  os << "\\ sgs quadratic program\n";
  os << "Minimize\n obj:";
  std::map<QuadKey, Rational> acc;
  for (const auto& term : prog.objective) expand_term(term, acc);
  bool any = false;
  for (const auto& [key, coeff] : acc) {
    if (coeff.is_zero()) continue;
    double c = coeff.to_double();
    os << (c < 0 ? " - " : (any ? " + " : " ")) << fmt_double(std::abs(c));
    if (key.first >= 0)
      os << " " << prog.var_name(key.first) << " * " << prog.var_name(key.second);
    else if (key.second >= 0)
      os << " " << prog.var_name(key.second);
    any = true;
  }
  if (!any) os << " 0";
  os << "\n";

  os << "Subject To\n";
  int row = 0;
  for (const auto& c : prog.constraints) {
    os << " c" << row++ << ":";
    print_lp_row(os, prog, c.expr, c.rel);
  }
  for (int s = 0; s < prog.num_states; ++s) {
    if (!prog.pin[s]) continue;
    os << " pin" << s << ": " << prog.var_name(s) << " = " << fmt_double(prog.pin[s]->to_double())
       << "\n";
  }

  // big-M rows; all operands live in [0,1], so M = 1 is valid
  std::vector<std::string> binaries;
  for (size_t gi = 0; gi < prog.groups.size(); ++gi) {
    const Group& grp = prog.groups[gi];
    for (size_t k = 0; k < grp.operands.size(); ++k) {
      std::string bin = "b_" + std::to_string(gi) + "_" + std::to_string(k);
      binaries.push_back(bin);
      // target - operand >= 0 (max) or <= 0 (min)
      Affine diff;
      diff.add(grp.target, Rational(1));
      diff.add_scaled(grp.operands[k], Rational(-1));
      os << " g" << gi << "_bound" << k << ":";
      print_lp_row(os, prog, diff, grp.op == GroupOp::Max ? Rel::Ge : Rel::Le);
      // target - operand -/+ (1 - b) stays within the big-M band
      Affine sel = diff;
      if (grp.op == GroupOp::Max) {
        // target - operand - 1 + b_k <= 0
        sel.add_constant(Rational(-1));
        os << " g" << gi << "_pick" << k << ":";
        print_lp_row(os, prog, sel, Rel::Le, "1 " + bin);
      } else {
        sel.add_constant(Rational(1));
        os << " g" << gi << "_pick" << k << ":";
        print_lp_row(os, prog, sel, Rel::Ge, "-1 " + bin);
      }
    }
    os << " g" << gi << "_one:";
    for (size_t k = 0; k < grp.operands.size(); ++k)
      os << (k ? " + " : " ") << "b_" << gi << "_" << k;
    os << " = 1\n";
  }

  os << "Bounds\n";
  for (int v = 0; v < prog.num_vars(); ++v) os << " 0 <= " << prog.var_name(v) << " <= 1\n";
  if (!binaries.empty()) {
    os << "Binary\n";
    for (const auto& b : binaries) os << " " << b << "\n";
  }
  os << "End\n";
  return os.str();
}

int parse_var(const MathProgram& prog, const std::string& tok, int lineno) {
  auto fail = [&]() -> int {
    throw ParseError(lineno, 0, "bad variable '" + tok + "'");
  };
  if (tok.size() < 3 || tok[1] != '_') return fail();
  int idx = 0;
  auto res = std::from_chars(tok.data() + 2, tok.data() + tok.size(), idx);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) return fail();
  if (tok[0] == 'v') {
    if (idx < 0 || idx >= prog.num_states) return fail();
    return idx;
  }
  if (tok[0] == 'm') {
    if (idx < 0 || idx >= prog.num_aux) return fail();
    return prog.num_states + idx;
  }
  return fail();
}

// affine := rat (' + ' rat var)*
Affine parse_affine(const MathProgram& prog, const std::string& text, int lineno) {
  std::istringstream is(text);
  Affine e;
  std::string tok;
  if (!(is >> tok)) throw ParseError(lineno, 0, "empty affine expression");
  e.constant = Rational::parse(tok);
  std::string plus, coeff, var;
  while (is >> plus) {
    if (plus != "+") throw ParseError(lineno, 0, "expected '+' in affine expression");
    if (!(is >> coeff >> var)) throw ParseError(lineno, 0, "truncated affine term");
    e.add(parse_var(prog, var, lineno), Rational::parse(coeff));
  }
  return e;
}

std::vector<std::string> split_on(const std::string& text, const std::string& sep) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (true) {
    size_t next = text.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(text.substr(pos));
      break;
    }
    parts.push_back(text.substr(pos, next - pos));
    pos = next + sep.size();
  }
  return parts;
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

VerifyReport verify_solution(const MathProgram& prog, const ValueVec& state_values, double tol) {
  return verify_impl<double>(prog, state_values, tol);
}

VerifyReport verify_solution_exact(const MathProgram& prog, const RationalVec& state_values,
                                   const Rational& tol) {
  return verify_impl<Rational>(prog, state_values, tol);
}

std::string VerifyReport::text() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << " objective=" << objective
     << " max_residual=" << max_residual << "\n";
  for (const auto& v : violations) os << "  " << v << "\n";
  return os.str();
}

std::string emit_program(const MathProgram& prog, ProgramFormat format) {
  return format == ProgramFormat::Native ? emit_native(prog) : emit_lp(prog);
}

MathProgram parse_native_program(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  MathProgram prog;
  bool seen_header = false, seen_end = false;

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    if (!seen_header) {
      if (t != "sgs-program") throw ParseError(lineno, 0, "expected 'sgs-program' header");
      seen_header = true;
      continue;
    }
    std::istringstream is(t);
    std::string kw;
    is >> kw;
    if (kw == "states") {
      is >> prog.num_states;
      prog.owner.assign(prog.num_states, Owner::Maximizer);
      prog.pin.assign(prog.num_states, std::nullopt);
      prog.action_exprs.assign(prog.num_states, {});
    } else if (kw == "aux") {
      is >> prog.num_aux;
    } else if (kw == "owner") {
      int s;
      std::string o;
      is >> s >> o;
      if (s < 0 || s >= prog.num_states) throw ParseError(lineno, 0, "owner state out of range");
      prog.owner[s] = o == "min" ? Owner::Minimizer : Owner::Maximizer;
    } else if (kw == "pin") {
      std::string var, eq, val;
      is >> var >> eq >> val;
      int v = parse_var(prog, var, lineno);
      if (v >= prog.num_states) throw ParseError(lineno, 0, "pins apply to state variables");
      prog.pin[v] = Rational::parse(val);
    } else if (kw == "act") {
      std::string var, colon;
      is >> var >> colon;
      int v = parse_var(prog, var, lineno);
      if (v >= prog.num_states) throw ParseError(lineno, 0, "act lines apply to state variables");
      std::string rest;
      std::getline(is, rest);
      prog.action_exprs[v].push_back(parse_affine(prog, strip(rest), lineno));
    } else if (kw == "term") {
      std::string rest;
      std::getline(is, rest);
      ProductTerm term;
      for (const auto& part : split_on(strip(rest), " | "))
        term.factors.push_back(parse_affine(prog, strip(part), lineno));
      prog.objective.push_back(std::move(term));
    } else if (kw == "con") {
      std::string rest;
      std::getline(is, rest);
      rest = strip(rest);
      Rel rel;
      size_t oppos;
      if ((oppos = rest.rfind(" <= 0")) != std::string::npos && oppos == rest.size() - 5)
        rel = Rel::Le;
      else if ((oppos = rest.rfind(" >= 0")) != std::string::npos && oppos == rest.size() - 5)
        rel = Rel::Ge;
      else if ((oppos = rest.rfind(" = 0")) != std::string::npos && oppos == rest.size() - 4)
        rel = Rel::Eq;
      else
        throw ParseError(lineno, 0, "constraint must end with '<= 0', '= 0' or '>= 0'");
      Constraint c;
      c.rel = rel;
      c.expr = parse_affine(prog, strip(rest.substr(0, oppos)), lineno);
      prog.constraints.push_back(std::move(c));
    } else if (kw == "group") {
      std::string var, eq, op;
      is >> var >> eq >> op;
      Group grp;
      grp.target = parse_var(prog, var, lineno);
      grp.op = op == "min" ? GroupOp::Min : GroupOp::Max;
      std::string rest;
      std::getline(is, rest);
      rest = strip(rest);
      if (rest.size() < 2 || rest.front() != '{' || rest.back() != '}')
        throw ParseError(lineno, 0, "group operands must be wrapped in { }");
      for (const auto& part : split_on(strip(rest.substr(1, rest.size() - 2)), " ; "))
        grp.operands.push_back(parse_affine(prog, strip(part), lineno));
      prog.groups.push_back(std::move(grp));
    } else if (kw == "end") {
      seen_end = true;
      break;
    } else {
      throw ParseError(lineno, 0, "unknown program line '" + kw + "'");
    }
  }
  if (!seen_header || !seen_end) throw ParseError(0, 0, "missing program header or end");
  return prog;
}

}  // namespace sgs
