#include "sgs/ssg_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace sgs {

namespace {

struct Tok {
  std::string text;
  int column;  // 1-based
};

std::vector<Tok> tokenize(const std::string& line) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) { ++i; continue; }
    if (line[i] == '#') break;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
    out.push_back(Tok{line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

int parse_int(const Tok& t, int line, const char* what) {
  try {
    size_t pos = 0;
    int v = std::stoi(t.text, &pos);
    if (pos != t.text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, t.column, std::string("expected ") + what + ", got '" + t.text + "'");
  }
}

}  // namespace

StochasticGame parse_game(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  std::optional<int> num_states;
  std::optional<int> initial;
  std::vector<int> targets;
  std::vector<std::optional<Owner>> owners;
  // (state, name, branches) in declaration order
  struct RawAction { int state; std::string name; std::vector<Transition> branches; int line; };
  std::vector<RawAction> raw_actions;

  auto need_states = [&](const Tok& tok, int ln) {
    if (!num_states)
      throw ParseError(ln, tok.column, "'" + tok.text + "' before 'states' declaration");
  };
  auto check_state = [&](int s, const Tok& tok, int ln) {
    if (s < 0 || s >= *num_states)
      throw ParseError(ln, tok.column, "state " + std::to_string(s) + " out of range");
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].text;

    if (kw == "states") {
      if (toks.size() != 2) throw ParseError(lineno, toks[0].column, "usage: states N");
      if (num_states) throw ParseError(lineno, toks[0].column, "duplicate 'states' line");
      int n = parse_int(toks[1], lineno, "state count");
      if (n <= 0) throw ParseError(lineno, toks[1].column, "state count must be positive");
      num_states = n;
      owners.assign(n, std::nullopt);
    } else if (kw == "initial") {
      if (toks.size() != 2) throw ParseError(lineno, toks[0].column, "usage: initial I");
      need_states(toks[0], lineno);
      if (initial) throw ParseError(lineno, toks[0].column, "duplicate 'initial' line");
      int s = parse_int(toks[1], lineno, "state index");
      check_state(s, toks[1], lineno);
      initial = s;
    } else if (kw == "targets") {
      need_states(toks[0], lineno);
      if (toks.size() < 2) throw ParseError(lineno, toks[0].column, "no target declared");
      for (size_t i = 1; i < toks.size(); ++i) {
        int s = parse_int(toks[i], lineno, "state index");
        check_state(s, toks[i], lineno);
        targets.push_back(s);
      }
    } else if (kw == "owner") {
      if (toks.size() != 3) throw ParseError(lineno, toks[0].column, "usage: owner S max|min");
      need_states(toks[0], lineno);
      int s = parse_int(toks[1], lineno, "state index");
      check_state(s, toks[1], lineno);
      Owner o;
      if (toks[2].text == "max") o = Owner::Maximizer;
      else if (toks[2].text == "min") o = Owner::Minimizer;
      else throw ParseError(lineno, toks[2].column, "owner must be 'max' or 'min'");
      if (owners[s]) throw ParseError(lineno, toks[1].column, "duplicate owner for state " + std::to_string(s));
      owners[s] = o;
    } else if (kw == "action") {
      if (toks.size() < 4) throw ParseError(lineno, toks[0].column, "usage: action S NAME (T:P)...");
      need_states(toks[0], lineno);
      int s = parse_int(toks[1], lineno, "state index");
      check_state(s, toks[1], lineno);
      RawAction act;
      act.state = s;
      act.name = toks[2].text;
      act.line = lineno;
      for (size_t i = 3; i < toks.size(); ++i) {
        const std::string& b = toks[i].text;
        if (b.size() < 5 || b.front() != '(' || b.back() != ')')
          throw ParseError(lineno, toks[i].column, "expected branch '(T:P)', got '" + b + "'");
        auto colon = b.find(':');
        if (colon == std::string::npos)
          throw ParseError(lineno, toks[i].column, "expected ':' in branch '" + b + "'");
        Tok tgt{b.substr(1, colon - 1), toks[i].column};
        int t = parse_int(tgt, lineno, "successor index");
        check_state(t, tgt, lineno);
        Rational p;
        try {
          p = Rational::parse(b.substr(colon + 1, b.size() - colon - 2));
        } catch (const std::exception& e) {
          throw ParseError(lineno, toks[i].column, std::string("bad probability: ") + e.what());
        }
        act.branches.emplace_back(t, p);
      }
      raw_actions.push_back(std::move(act));
    } else {
      throw ParseError(lineno, toks[0].column, "unknown keyword '" + kw + "'");
    }
  }

  if (!num_states) throw ParseError(0, 0, "missing 'states' line");
  if (!initial) throw ParseError(0, 0, "missing 'initial' line");
  if (targets.empty()) throw ParseError(0, 0, "no target declared");
  for (int s = 0; s < *num_states; ++s)
    if (!owners[s]) throw ParseError(0, 0, "missing owner for state " + std::to_string(s));

  GameBuilder b(*num_states);
  b.set_initial(*initial);
  for (int s = 0; s < *num_states; ++s) b.set_owner(s, *owners[s]);
  for (int t : targets) b.add_target(t);
  for (auto& act : raw_actions) {
    try {
      b.add_action(act.state, std::move(act.name), std::move(act.branches));
    } catch (const ValidationError& e) {
      throw ParseError(act.line, 0, e.what());
    }
  }
  try {
    return std::move(b).build();
  } catch (const ValidationError& e) {
    throw ParseError(0, 0, e.what());
  }
}

StochasticGame load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open game file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game(buf.str());
}

std::string serialize_game(const StochasticGame& g) {
  std::ostringstream out;
  out << "states " << g.num_states() << "\n";
  out << "initial " << g.initial() << "\n";
  out << "targets";
  for (int t : g.targets()) out << " " << t;
  out << "\n";
  for (int s = 0; s < g.num_states(); ++s)
    out << "owner " << s << " " << owner_name(g.owner(s)) << "\n";
  for (int s = 0; s < g.num_states(); ++s) {
    for (int a = 0; a < g.num_actions(s); ++a) {
      const auto& act = g.action(s, a);
      out << "action " << s << " " << act.name;
      for (const auto& br : act.branches) out << " (" << br.target << ":" << br.prob.str() << ")";
      out << "\n";
    }
  }
  return out.str();
}

void save_game(const StochasticGame& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write game file '" + path + "'");
  out << serialize_game(game);
}

}  // namespace sgs
