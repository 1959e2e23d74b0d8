#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spsolve/adapter.hpp"
#include "spsolve/baselines.hpp"
#include "spsolve/instances.hpp"
#include "spsolve/io.hpp"
#include "spsolve/validate.hpp"

namespace spsolve {
namespace cli {

struct NamedInstance {
  SaddlePointProblem problem;
  std::optional<instances::CoupledBlockInstance> block;  // kept for spectrum reports
  std::optional<ProblemParams> tridiag_params;
  std::string id;
};

/// Built-in instances addressable by name everywhere a file path is accepted.
inline std::optional<NamedInstance> make_canned(const std::string& name, std::uint64_t seed) {
  using namespace instances;
  NamedInstance out;
  out.id = name;
  if (name == "scsc_small") {
    InstanceSpec spec;
    spec.kind = Kind::RandomQuadratic;
    spec.d_x = spec.d_y = 4;
    spec.params = {20.0, 16.0, 19.0, 1.0, 1.0, 0.0, 0.0};
    spec.seed = seed;
    out.problem = gen_random_quadratic(spec);
    return out;
  }
  if (name == "scsc_bench") {
    // well-conditioned f, g against a strong rank-deficient coupling whose
    // kernel holds f's softest direction: x1 never sees B, so any method
    // with a single global stepsize pays the coupling constant on it
    SaddlePointProblem pb;
    pb.params = {5.0, 5.0, 200.0, 1.0, 1.0, 0.0, 0.0};
    Mat Hf(2, 2);
    Hf(0, 0) = 1.0;
    Hf(1, 1) = 5.0;
    pb.f = quadratic_fn(std::move(Hf), {0.5, 0.3}, 5.0, 1.0);
    Mat Hg(1, 1);
    Hg(0, 0) = 1.0;
    pb.g = quadratic_fn(std::move(Hg), {-0.4}, 5.0, 1.0);
    Mat B(1, 2);
    B(0, 1) = 200.0;
    pb.B = dense_map(std::move(B));
    out.problem = pb;
    return out;
  }
  if (name == "coupled_block_n3") {
    ProblemParams p{10.0, 10.0, 19.0, 1.0, 1.0, 1.0, 1.0};
    out.block = gen_coupled_block(p, 2, 1.0);
    out.problem = out.block->problem;
    return out;
  }
  if (name == "tridiag_hard") {
    ProblemParams p{5.0, 5.0, 19.0, 1.0, 1.0, 1.0, 1.0};
    out.tridiag_params = p;
    out.problem = gen_bilinear_tridiag(p, 8, 1.0);
    return out;
  }
  if (name == "bilinear_small") {
    // affine f, g: the saddle point sits at (0.3, 0.5)
    SaddlePointProblem pb;
    pb.params = {0.01, 0.01, 1.0, 0.0, 0.0, 0.002, 0.002};
    pb.f = quadratic_fn(Mat(1, 1), Vec(1, -0.5), pb.params.L_x, 0.0);
    pb.g = quadratic_fn(Mat(1, 1), Vec(1, 0.3), pb.params.L_y, 0.0);
    Mat B(1, 1);
    B(0, 0) = 1.0;
    pb.B = dense_map(std::move(B));
    out.problem = pb;
    return out;
  }
  return std::nullopt;
}

inline NamedInstance load_instance(const std::string& source, std::uint64_t seed) {
  std::ifstream probe(source);
  if (probe.good()) {
    NamedInstance out;
    out.problem = read_instance(probe);
    out.id = source;
    return out;
  }
  if (auto canned = make_canned(source, seed)) return *canned;
  throw ParseError("instance '" + source + "' is neither a readable file nor a known name");
}

inline std::uint64_t effective_seed(std::uint64_t config_seed) {
  if (const char* env = std::getenv("SEED")) {
    try {
      return static_cast<std::uint64_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw ParseError("environment variable SEED is not an integer");
    }
  }
  return config_seed;
}

struct SolveOutcome {
  std::vector<TraceRecord> trace;
  double final_r2 = 0.0;
  OracleLedger ledger;
  bool diverged = false;
};

inline SolveOutcome run_method(const SaddlePointProblem& pb, const std::string& method,
                               double eps_rel, const CostModel& cost, double step, int max_iters) {
  SolveOutcome out;
  SolutionSet sol = solve_quadratic_exact(pb);
  Vec zero_x(static_cast<std::size_t>(pb.dx()), 0.0), zero_y(static_cast<std::size_t>(pb.dy()), 0.0);
  double R2 = solution_distance2(pb, sol, zero_x, zero_y);
  double eps_abs = eps_rel * R2;
  if (method == "sliding") {
    auto res = restarted_solve(pb, eps_abs, out.ledger, cost);
    out.trace = res.trace;
    out.final_r2 = solution_distance2(pb, sol, res.x, res.y);
  } else if (method == "extragradient" || method == "gda") {
    BaselineConfig cfg;
    cfg.method = method == "gda" ? BaselineMethod::Gda : BaselineMethod::Extragradient;
    cfg.step = step;
    cfg.max_iters = max_iters;
    cfg.stop_r2 = eps_abs;
    auto res = run_baseline(pb, cfg, out.ledger, cost);
    out.trace = res.trace;
    out.final_r2 = solution_distance2(pb, sol, res.x, res.y);
    out.diverged = res.diverged;
  } else {
    throw ParseError("unknown method '" + method + "' (expected sliding, extragradient or gda)");
  }
  return out;
}

inline int cmd_gen_instance(const std::string& kind, int dx, int dy, const ProblemParams& params,
                            double A, std::uint64_t seed, const std::string& out_path) {
  using namespace instances;
  InstanceSpec spec;
  spec.d_x = dx;
  spec.d_y = dy;
  spec.params = params;
  spec.A = A;
  spec.seed = effective_seed(seed);
  if (kind == "random-quadratic")
    spec.kind = Kind::RandomQuadratic;
  else if (kind == "chain-gradient")
    spec.kind = Kind::ChainGradient;
  else if (kind == "coupled-block")
    spec.kind = Kind::CoupledBlock;
  else if (kind == "bilinear-tridiag")
    spec.kind = Kind::BilinearTridiag;
  else
    throw ParseError("unknown kind '" + kind + "'");
  SaddlePointProblem pb = generate(spec);
  write_instance_file(out_path, pb);
  std::cout << "wrote " << out_path << " (d_x=" << pb.dx() << ", d_y=" << pb.dy() << ")\n";
  return 0;
}

inline int cmd_solve(const std::string& source, const std::string& method, double eps_rel,
                     const CostModel& cost, double step, int max_iters, std::uint64_t seed,
                     const std::string& out_path) {
  NamedInstance inst = load_instance(source, effective_seed(seed));
  SolveOutcome out = run_method(inst.problem, method, eps_rel, cost, step, max_iters);
  std::ofstream f(out_path);
  if (!f) throw ParseError("cannot open '" + out_path + "' for writing");
  write_trace_csv(f, out.trace);
  std::cout << "instance=" << inst.id << " method=" << method
            << " final_r2=" << fmt_g17(out.final_r2) << " grad_f=" << out.ledger.grad_f
            << " grad_g=" << out.ledger.grad_g << " matvec_B=" << out.ledger.matvec_B
            << " matvec_Bt=" << out.ledger.matvec_Bt
            << " exec_time=" << fmt_g17(execution_time(out.ledger, cost))
            << (out.diverged ? " diverged=true" : "") << '\n';
  return 0;
}

inline int cmd_validate(const std::string& source, std::uint64_t seed) {
  NamedInstance inst = load_instance(source, effective_seed(seed));
  InstanceCheck chk = validate_instance(inst.problem);
  bool all_ok = chk.ok;
  for (const auto& line : chk.lines) std::cout << line << '\n';
  if (inst.block) {
    const auto& b = *inst.block;
    auto rep = instances::validate_block_spectrum(b.E, b.alpha, b.beta, b.gamma, b.n);
    std::cout << "[block-spectrum] lower_bound_ok=" << (rep.lower_ok ? "true" : "false")
              << " upper_bound_ok=" << (rep.upper_ok ? "true" : "false")
              << " sigma2_min=" << fmt_num6(rep.sigma2_min)
              << " sigma2_max=" << fmt_num6(rep.sigma2_max) << " lower=" << fmt_num6(rep.lower)
              << " upper=" << fmt_num6(rep.upper) << '\n';
    all_ok = all_ok && rep.ok();
  }
  if (inst.tridiag_params) {
    Vec sig = singular_values(*inst.problem.B.dense);
    double mbar = std::max(inst.tridiag_params->mu_xy, inst.tridiag_params->mu_yx);
    bool lo = sig.back() >= mbar * (1.0 - 1e-8);
    bool hi = sig.front() <= inst.tridiag_params->L_xy * (1.0 + 1e-8);
    std::cout << "[tridiag-spectrum] lower_bound_ok=" << (lo ? "true" : "false")
              << " upper_bound_ok=" << (hi ? "true" : "false")
              << " sigma_min=" << fmt_num6(sig.back()) << " sigma_max=" << fmt_num6(sig.front())
              << '\n';
    all_ok = all_ok && lo && hi;
  }
  std::cout << (all_ok ? "validation OK" : "validation FAILED") << '\n';
  return all_ok ? 0 : 1;
}

inline int cmd_bench(const std::string& config_path, const std::string& out_path) {
  std::ifstream in(config_path);
  if (!in) throw ParseError("cannot open config '" + config_path + "'");
  auto sections = parse_sections(in);

  double eps_rel = 1e-8;
  CostModel cost;
  std::uint64_t seed = 42;
  for (const auto& s : sections) {
    if (s.name != "bench") continue;
    if (s.find("eps")) eps_rel = parse_double(s, "eps");
    if (s.find("tau_f")) cost.tau_f = parse_double(s, "tau_f");
    if (s.find("tau_g")) cost.tau_g = parse_double(s, "tau_g");
    if (s.find("tau_B")) cost.tau_B = parse_double(s, "tau_B");
    if (s.find("seed")) seed = static_cast<std::uint64_t>(parse_int(s, "seed"));
  }
  seed = effective_seed(seed);

  std::ofstream out(out_path);
  if (!out) throw ParseError("cannot open '" + out_path + "' for writing");
  out << "instance,method,kappa_x,kappa_y,kappa_xy,final_r2,grad_f,grad_g,matvec_B,matvec_Bt,"
         "exec_time\n";
  for (const auto& s : sections) {
    if (s.name != "run") continue;
    const std::string* inst_name = s.find("instance");
    const std::string* method = s.find("method");
    if (!inst_name) throw ParseError("[run]: missing key 'instance'");
    if (!method) throw ParseError("[run]: missing key 'method'");
    double run_eps = s.find("eps") ? parse_double(s, "eps") : eps_rel;
    double step = s.find("step") ? parse_double(s, "step") : 0.0;
    int max_iters = s.find("max_iters") ? parse_int(s, "max_iters") : 200000;
    NamedInstance inst = load_instance(*inst_name, seed);
    ConditionNumbers cn = condition_numbers(inst.problem.params);
    SolveOutcome res = run_method(inst.problem, *method, run_eps, cost, step, max_iters);
    OracleLedger& led = res.ledger;
    out << inst.id << ',' << *method << ',' << fmt_g17(cn.kappa_x) << ',' << fmt_g17(cn.kappa_y)
        << ',' << fmt_g17(cn.kappa_xy) << ',' << fmt_g17(res.final_r2) << ',' << led.grad_f << ','
        << led.grad_g << ',' << led.matvec_B << ',' << led.matvec_Bt << ','
        << fmt_g17(execution_time(led, cost)) << '\n';
  }
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"first-order solvers for bilinearly coupled saddle-point problems"};
  app.require_subcommand(1);

  // gen-instance
  auto* gen = app.add_subcommand("gen-instance", "generate an instance file");
  std::string gen_kind = "random-quadratic";
  int gen_dx = 4, gen_dy = 4;
  ProblemParams gp{20.0, 16.0, 19.0, 1.0, 1.0, 0.0, 0.0};
  double gen_A = 1.0;
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  gen->add_option("--kind", gen_kind,
                  "random-quadratic | chain-gradient | coupled-block | bilinear-tridiag");
  gen->add_option("--dx", gen_dx, "x dimension (chain length d for structured kinds)");
  gen->add_option("--dy", gen_dy, "y dimension (random-quadratic only)");
  gen->add_option("--L_x", gp.L_x);
  gen->add_option("--L_y", gp.L_y);
  gen->add_option("--L_xy", gp.L_xy);
  gen->add_option("--mu_x", gp.mu_x);
  gen->add_option("--mu_y", gp.mu_y);
  gen->add_option("--mu_xy", gp.mu_xy);
  gen->add_option("--mu_yx", gp.mu_yx);
  gen->add_option("--A", gen_A, "linear-term magnitude");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output path")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance and write a trace CSV");
  std::string sv_inst, sv_method = "sliding", sv_out = "trace.csv";
  double sv_eps = 1e-8, sv_step = 0.0;
  int sv_max_iters = 200000;
  CostModel sv_cost;
  std::uint64_t sv_seed = 42;
  solve->add_option("--instance", sv_inst, "instance file or built-in name")->required();
  solve->add_option("--method", sv_method, "sliding | extragradient | gda");
  solve->add_option("--eps", sv_eps, "target accuracy as a fraction of the initial R^2");
  solve->add_option("--step", sv_step, "baseline step size (0 = default 1/(2 Lambda))");
  solve->add_option("--max-iters", sv_max_iters, "baseline iteration cap");
  solve->add_option("--tau-f", sv_cost.tau_f, "cost of one grad f");
  solve->add_option("--tau-g", sv_cost.tau_g, "cost of one grad g");
  solve->add_option("--tau-B", sv_cost.tau_B, "cost of one matvec");
  solve->add_option("--seed", sv_seed);
  solve->add_option("--out", sv_out, "trace CSV path");

  // bench
  auto* bench = app.add_subcommand("bench", "run a config matrix and write a summary CSV");
  std::string bench_cfg, bench_out = "bench.csv";
  bench->add_option("--config", bench_cfg, "bench config file")->required();
  bench->add_option("--out", bench_out, "summary CSV path");

  // validate
  auto* val = app.add_subcommand("validate", "check assumptions and spectra of an instance");
  std::string val_inst;
  std::uint64_t val_seed = 42;
  val->add_option("--instance", val_inst, "instance file or built-in name")->required();
  val->add_option("--seed", val_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen_instance(gen_kind, gen_dx, gen_dy, gp, gen_A, gen_seed, gen_out);
    if (solve->parsed())
      return cmd_solve(sv_inst, sv_method, sv_eps, sv_cost, sv_step, sv_max_iters, sv_seed, sv_out);
    if (bench->parsed()) return cmd_bench(bench_cfg, bench_out);
    if (val->parsed()) return cmd_validate(val_inst, val_seed);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace cli
}  // namespace spsolve
