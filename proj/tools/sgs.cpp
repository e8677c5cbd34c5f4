// Command-line front end: solve, encode, verify, generate and benchmark
// simple stochastic games with reachability objectives.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgs/bvi.hpp"
#include "sgs/generators.hpp"
#include "sgs/mathprog.hpp"
#include "sgs/oracle.hpp"
#include "sgs/si.hpp"
#include "sgs/ssg_io.hpp"
#include "sgs/topological.hpp"

namespace {

using nlohmann::json;
using namespace sgs;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerify = 4;
constexpr int kExitEncoding = 5;

struct SolveOptions {
  std::string algo = "bvi";
  double eps = 1e-6;
  long deflate_period = 100;
  long max_iters = 10'000'000;
  std::string opponent = "exact";
  std::string warm = "none";
  bool exact_rational = false;
  bool unsafe_vi = false;
  bool plain_upper = false;
  Deadline deadline;
};

std::optional<ValueVec> warm_values(const StochasticGame& g, const SolveOptions& opt) {
  if (opt.warm != "vi") return std::nullopt;
  BviConfig cfg;
  cfg.eps = opt.eps;
  cfg.max_iterations = opt.max_iters;
  cfg.deadline = opt.deadline;
  return solve_vi(g, cfg).values;
}

SolveResult run_solver(const StochasticGame& g, const SolveOptions& opt) {
  if (opt.algo == "bvi" || opt.algo == "vi") {
    BviConfig cfg;
    cfg.eps = opt.eps;
    cfg.deflate_period = opt.deflate_period;
    cfg.max_iterations = opt.max_iters;
    cfg.plain_upper_init = opt.plain_upper;
    cfg.deadline = opt.deadline;
    cfg.warm_lower = warm_values(g, opt);
    return opt.algo == "bvi" ? solve_bvi(g, cfg) : solve_vi(g, cfg);
  }
  if (opt.algo == "si") {
    SiConfig cfg;
    cfg.opponent = opt.unsafe_vi ? OpponentSolver::UnsafeVi
                   : opt.opponent == "bvi" ? OpponentSolver::BviDomination
                                           : OpponentSolver::ExactPi;
    cfg.exact_rational = opt.exact_rational;
    cfg.deadline = opt.deadline;
    cfg.warm_start = warm_values(g, opt);
    return solve_si(g, cfg);
  }
  if (opt.algo == "topo-bvi" || opt.algo == "topo-si") {
    TopoConfig cfg;
    cfg.sub_solver = opt.algo == "topo-bvi" ? SubSolver::Bvi : SubSolver::Si;
    cfg.eps = opt.eps;
    cfg.exact_rational = opt.exact_rational && opt.algo == "topo-si";
    cfg.opponent = opt.unsafe_vi ? OpponentSolver::UnsafeVi
                   : opt.opponent == "bvi" ? OpponentSolver::BviDomination
                                           : OpponentSolver::ExactPi;
    cfg.max_iterations = opt.max_iters;
    cfg.deadline = opt.deadline;
    return topo_solve(g, cfg);
  }
  if (opt.algo == "hop-local") {
    MathProgram prog = encode_hop(g);
    auto warm = warm_values(g, opt);
    LocalSolveConfig cfg;
    cfg.tol = std::max(opt.eps, 1e-9);
    LocalSolveResult lr = local_solve(prog, warm ? &*warm : nullptr, cfg);
    SolveResult out;
    out.values = lr.state_values;
    out.status = lr.verified ? SolveStatus::Converged : SolveStatus::NotVerified;
    out.stats.gap = lr.objective;
    out.stats.sub_solves = lr.restarts_used;
    // strategies from the verified value vector
    Strategy sigma(Owner::Maximizer, g.num_states()), tau(Owner::Minimizer, g.num_states());
    for (int s = 0; s < g.num_states(); ++s) {
      if (g.owner(s) == Owner::Maximizer)
        sigma.choice[s] = greedy_action(g, out.values, s);
      else
        tau.choice[s] = greedy_action(g, out.values, s);
    }
    out.sigma = make_proper(g, sigma, &out.values);
    out.tau = tau;
    return out;
  }
  throw CLI::ValidationError("--algo", "unknown algorithm '" + opt.algo + "'");
}

json strategy_json(const StochasticGame& g, const Strategy& st) {
  json out = json::object();
  for (int s = 0; s < g.num_states(); ++s)
    if (st.choice[s] >= 0)
      out[std::to_string(s)] = g.action(s, st.choice[s]).name;
  return out;
}

int cmd_solve(const std::string& file, const SolveOptions& opt, bool as_json) {
  StochasticGame g = load_game(file);
  auto t0 = std::chrono::steady_clock::now();
  SolveResult r = run_solver(g, opt);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (as_json) {
    json out;
    out["model"] = file;
    out["algo"] = opt.algo;
    out["epsilon"] = opt.eps;
    out["states"] = g.num_states();
    out["initial"] = g.initial();
    out["value"] = r.values[g.initial()];
    out["values"] = std::vector<double>(r.values.data(), r.values.data() + r.values.size());
    if (r.exact) out["value_exact"] = (*r.exact)[g.initial()].str();
    out["maximizer_strategy"] = strategy_json(g, r.sigma);
    out["minimizer_strategy"] = strategy_json(g, r.tau);
    out["iterations"] = r.stats.iterations;
    out["deflations"] = r.stats.deflations;
    out["gap"] = r.stats.gap;
    out["converged"] = r.converged();
    out["status"] = solve_status_name(r.status);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "model:      " << file << "\n";
    std::cout << "algorithm:  " << opt.algo << "\n";
    std::cout << "status:     " << solve_status_name(r.status) << "\n";
    std::cout << "value(s0):  " << r.values[g.initial()];
    if (r.exact) std::cout << "  (exact " << (*r.exact)[g.initial()].str() << ")";
    std::cout << "\n";
    std::cout << "iterations: " << r.stats.iterations << ", deflations " << r.stats.deflations
              << ", gap " << r.stats.gap << ", " << seconds << " s\n";
    std::cout << "values:";
    for (int s = 0; s < g.num_states(); ++s) std::cout << " " << r.values[s];
    std::cout << "\n";
    std::cout << "sigma:";
    for (int s = 0; s < g.num_states(); ++s)
      if (r.sigma.choice[s] >= 0)
        std::cout << " " << s << ":" << g.action(s, r.sigma.choice[s]).name;
    std::cout << "\n";
    std::cout << "tau:  ";
    for (int s = 0; s < g.num_states(); ++s)
      if (r.tau.choice[s] >= 0)
        std::cout << " " << s << ":" << g.action(s, r.tau.choice[s]).name;
    std::cout << "\n";
    if (r.stats.scc_chain_depth > 0) {
      std::cout << "sccs:       chain depth " << r.stats.scc_chain_depth
                << ", accumulated gap bound " << r.stats.accumulated_gap_bound << "\n";
    }
  }
  return r.converged() ? kExitOk : kExitSolver;
}

int cmd_encode(const std::string& file, const std::string& form, bool two_act,
               const std::string& stopping, const std::string& format, const std::string& out_path) {
  StochasticGame g = load_game(file);
  if (!stopping.empty()) {
    StoppingResult sr = transform_stopping(g, Rational::parse(stopping));
    if (sr.precision_warning)
      std::cerr << "warning: stopping epsilon " << stopping << " is not below (1/4)^"
                << g.num_states() << "; float value recovery is unreliable\n";
    g = std::move(sr.game);
  }
  if (two_act) g = transform_2act(g).game;
  MathProgram prog = form == "qp" ? encode_qp(g) : encode_hop(g);
  std::string text =
      emit_program(prog, format == "native" ? ProgramFormat::Native : ProgramFormat::LpStyle);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream os(out_path);
    if (!os) throw Error("cannot write '" + out_path + "'");
    os << text;
  }
  return kExitOk;
}

ValueVec load_values(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open values file '" + path + "'");
  ValueVec values(n);
  int i = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
      if (i >= n) throw ParseError(lineno, 0, "more values than states");
      values[i++] = Rational::parse(tok).to_double();
    }
  }
  if (i != n)
    throw ParseError(0, 0, "expected " + std::to_string(n) + " values, got " + std::to_string(i));
  return values;
}

int cmd_verify(const std::string& game_file, const std::string& program_file,
               const std::string& values_file, double tol) {
  StochasticGame g = load_game(game_file);
  std::ifstream in(program_file);
  if (!in) throw Error("cannot open program file '" + program_file + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  MathProgram prog = parse_native_program(buf.str());
  if (prog.num_states != g.num_states())
    throw ValidationError("program has " + std::to_string(prog.num_states) +
                          " state variables but the game has " + std::to_string(g.num_states()));
  ValueVec values = load_values(values_file, prog.num_states);
  VerifyReport rep = verify_solution(prog, values, tol);
  std::cout << rep.text();
  return rep.pass ? kExitOk : kExitVerify;
}

int cmd_bench(const std::string& dir, const std::vector<std::string>& algos, double eps,
              double timeout_s, const std::string& out_path) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".ssg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::ostringstream csv;
  csv << "model,states,max_acts,avg_acts,mecs,algo,value,iters,seconds,status\n";
  for (const auto& path : files) {
    StochasticGame g = load_game(path.string());
    auto mecs = mec_decomposition(g);
    int nontrivial = count_nontrivial_mecs(g, mecs);
    for (const auto& algo : algos) {
      SolveOptions opt;
      opt.algo = algo;
      opt.eps = eps;
      opt.deadline = std::chrono::steady_clock::now() +
                     std::chrono::milliseconds(static_cast<long>(timeout_s * 1000));
      auto t0 = std::chrono::steady_clock::now();
      std::string status = "OK";
      double value = 0;
      long iters = 0;
      try {
        SolveResult r = run_solver(g, opt);
        value = r.values[g.initial()];
        iters = r.stats.iterations;
        status = r.converged() ? "OK" : solve_status_name(r.status);
        if (r.status == SolveStatus::IterationCap) status = "TIMEOUT";
      } catch (const EncodingInfeasibleError&) {
        status = "ENCODING-INFEASIBLE";
      }
      double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      char sec_buf[32];
      std::snprintf(sec_buf, sizeof sec_buf, "%.3f", seconds);
      csv << path.filename().string() << "," << g.num_states() << "," << g.max_actions() << ","
          << g.avg_actions() << "," << nontrivial << "," << algo << "," << value << "," << iters
          << "," << sec_buf << "," << status << "\n";
    }
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream os(out_path);
    os << csv.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgs: solver suite for simple stochastic games with reachability objectives"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve a game");
  std::string solve_file;
  SolveOptions opt;
  bool as_json = false;
  solve->add_option("file", solve_file, "game file (.ssg)")->required();
  solve->add_option("--algo", opt.algo, "bvi|vi|si|topo-bvi|topo-si|hop-local")
      ->check(CLI::IsMember({"bvi", "vi", "si", "topo-bvi", "topo-si", "hop-local"}));
  solve->add_option("--eps", opt.eps, "absolute precision (default 1e-6)");
  solve->add_option("--deflate-period", opt.deflate_period, "iterations between deflations");
  solve->add_option("--max-iters", opt.max_iters, "iteration safety cap");
  solve->add_option("--opponent", opt.opponent, "MDP solver for SI: exact|bvi")
      ->check(CLI::IsMember({"exact", "bvi"}));
  solve->add_option("--warm-start", opt.warm, "none|vi")->check(CLI::IsMember({"none", "vi"}));
  solve->add_flag("--exact-rational", opt.exact_rational, "exact rational chain solves");
  solve->add_flag("--unsafe", opt.unsafe_vi, "unguaranteed VI as SI opponent (dangerous)");
  solve->add_flag("--plain-upper", opt.plain_upper, "start BVI from U == 1 (no sink pinning)");
  solve->add_flag("--json", as_json, "machine-readable output");

  // encode
  auto* encode = app.add_subcommand("encode", "emit a mathematical program");
  std::string enc_file, enc_form = "hop", enc_stop, enc_format = "native", enc_out;
  bool enc_two_act = false;
  encode->add_option("file", enc_file)->required();
  encode->add_option("--form", enc_form, "qp|hop")->check(CLI::IsMember({"qp", "hop"}));
  encode->add_flag("--two-act", enc_two_act, "apply the 2Act transform first");
  encode->add_option("--stopping", enc_stop, "make the game stopping with this epsilon");
  encode->add_option("--format", enc_format, "lp-style|native")
      ->check(CLI::IsMember({"lp-style", "native"}));
  encode->add_option("-o,--output", enc_out, "output path ('-' for stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "check values against a program");
  std::string ver_game, ver_prog, ver_values;
  double ver_tol = 1e-6;
  verify->add_option("file", ver_game)->required();
  verify->add_option("--program", ver_prog, "native-format program file")->required();
  verify->add_option("--values", ver_values, "text file, one value per state")->required();
  verify->add_option("--tol", ver_tol, "residual tolerance");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a model family instance");
  std::string gen_kind, gen_out;
  long gen_n = 1;
  RandomGameParams rnd;
  gen->add_option("kind", gen_kind, "mulmec|bigmec|hm|random")
      ->required()
      ->check(CLI::IsMember({"mulmec", "bigmec", "hm", "random"}));
  gen->add_option("n", gen_n, "size parameter (mulmec/bigmec/hm)");
  gen->add_option("--seed", rnd.seed);
  gen->add_option("--states", rnd.n_states);
  gen->add_option("--max-actions", rnd.max_actions);
  gen->add_option("--max-branching", rnd.max_branching);
  gen->add_option("--min-frac", rnd.minimizer_fraction);
  gen->add_option("--target-frac", rnd.target_fraction);
  gen->add_option("-o,--output", gen_out, "output path ('-' for stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "run algorithms over a directory of games");
  std::string bench_dir, bench_algos = "bvi,si", bench_out;
  double bench_eps = 1e-6, bench_timeout = 900;
  bench->add_option("dir", bench_dir)->required();
  bench->add_option("--algos", bench_algos, "comma-separated algorithm list");
  bench->add_option("--eps", bench_eps);
  bench->add_option("--timeout", bench_timeout, "per-solve timeout in seconds (default 900)");
  bench->add_option("-o,--output", bench_out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(solve_file, opt, as_json);
    if (*encode) return cmd_encode(enc_file, enc_form, enc_two_act, enc_stop, enc_format, enc_out);
    if (*verify) return cmd_verify(ver_game, ver_prog, ver_values, ver_tol);
    if (*gen) {
      StochasticGame g = [&] {
        if (gen_kind == "mulmec") return gen_mulmec(static_cast<int>(gen_n));
        if (gen_kind == "bigmec") return gen_bigmec(static_cast<int>(gen_n));
        if (gen_kind == "hm") return gen_hm(static_cast<int>(gen_n));
        return gen_random(rnd);
      }();
      if (gen_out.empty() || gen_out == "-")
        std::cout << serialize_game(g);
      else
        save_game(g, gen_out);
      return kExitOk;
    }
    if (*bench) {
      std::vector<std::string> algos;
      std::stringstream ss(bench_algos);
      std::string item;
      while (std::getline(ss, item, ',')) algos.push_back(item);
      return cmd_bench(bench_dir, algos, bench_eps, bench_timeout, bench_out);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const EncodingInfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEncoding;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitUsage;
}
