// Copyright 2026 The werner-witness Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// wernerctl: command-line front end for the witness hierarchies.
//
// Exit status: 0 success (entanglement detected or certified), 2 not
// detected at this level, 1 error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "werner/werner.hpp"

namespace {

using namespace werner;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotDetected = 2;

struct Options {
  std::string state_path;
  std::string cert_path;
  std::string seed_path;
  std::string out_path;
  std::string hierarchy = "tpop";
  std::string theta_text = "9/10";
  std::string denom_bound_text = "1000000000000";
  int level = 0;
  bool force_real = false;
  bool force_complex = false;
  double tol = 1e-8;
  int d = 2;
  int n = 0;
  int steps = 2;
  int samples = 100;
  unsigned long seed = 1;
  int verbosity = 0;
  bool to_eta = false;
};

WernerStateParam load_state(const std::string& path) {
  ElementFile f = read_element_file(path);
  if (f.kind != "state") throw std::invalid_argument(path + ": expected a file of kind 'state', got '" + f.kind + "'");
  return WernerStateParam::from_element(f.element);
}

std::optional<bool> real_flag(const Options& o) {
  if (o.force_real && o.force_complex) throw std::invalid_argument("--real and --complex are exclusive");
  if (o.force_real) return true;
  if (o.force_complex) return false;
  return std::nullopt;
}

int resolve_level(const Options& o, int n) {
  const int level = o.level > 0 ? o.level : min_level(n);
  if (level < min_level(n)) {
    throw std::invalid_argument("--level " + std::to_string(level) + " is below ceil(n/2) = " +
                                std::to_string(min_level(n)));
  }
  return level;
}

SdpProblem build(const Options& o, const WernerStateParam& r, int level, bool certify) {
  const Hierarchy h = parse_hierarchy(o.hierarchy);
  if (h == Hierarchy::kPop) {
    PopOptions opt;
    opt.real_mode = real_flag(o);
    return assemble_pop(r, level, opt).problem;
  }
  TpopOptions opt;
  opt.real_mode = real_flag(o);
  // Certificates are always checked without dagger identification.
  if (certify) {
    if (opt.real_mode.value_or(false)) std::cerr << "note: TPOP certificates use complex mode; --real ignored\n";
    opt.real_mode = false;
  }
  return assemble_tpop(r, level, opt).problem;
}

void print_problem(const SdpProblem& p) {
  std::printf("hierarchy   %s  n=%d  level=%d  mode=%s\n", to_string(p.hierarchy).c_str(), p.n, p.level,
              p.hermitian ? "complex" : "real");
  std::printf("psd blocks  %zu (total size %ld, largest %d)\n", p.blocks.size(), p.total_block_size(),
              p.max_block_size());
  std::printf("equations   %zu\n", p.constraints.size());
}

Json solution_report(const SdpProblem& p, const SdpSolution& s, double seconds) {
  Json doc;
  doc["format"] = "werner-solution";
  doc["version"] = kFileFormatVersion;
  doc["hierarchy"] = to_string(p.hierarchy);
  doc["n"] = p.n;
  doc["level"] = p.level;
  doc["real_mode"] = !p.hermitian;
  doc["status"] = to_string(s.status);
  if (std::isfinite(s.epsilon)) {
    doc["objective"] = s.epsilon;
  } else {
    doc["objective"] = "-inf";
  }
  doc["primal_residual"] = s.primal_residual;
  doc["gap"] = s.gap;
  doc["iterations"] = s.iterations;
  doc["min_eigenvalue"] = s.min_eigenvalue;
  doc["seconds"] = seconds;
  if (!s.free.empty()) {
    Json w = Json::array();
    for (const auto& [sigma, c] : witness_from_free(p, s.free).terms()) {
      if (std::abs(c) < 1e-14) continue;
      w.push_back(Json{{"perm", sigma.one_line()}, {"re", c.real()}, {"im", c.imag()}});
    }
    doc["w"] = w;
  }
  return doc;
}

int cmd_optimize(const Options& o) {
  const WernerStateParam r = load_state(o.state_path);
  const int level = resolve_level(o, r.n());
  const SdpProblem p = build(o, r, level, false);
  print_problem(p);
  SolverOptions so;
  so.tolerance = o.tol;
  so.verbosity = o.verbosity;
  const auto t0 = std::chrono::steady_clock::now();
  const SdpSolution s = solve(p, so);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("status      %s%s%s\n", to_string(s.status).c_str(), s.message.empty() ? "" : ": ",
              s.message.c_str());
  if (!o.out_path.empty()) write_json_file(o.out_path, solution_report(p, s, secs));
  if (!s.usable()) return kExitError;
  const char* name = p.hierarchy == Hierarchy::kPop ? "epsilon" : "theta";
  if (s.status == SolveStatus::kUnbounded) {
    std::printf("%-11s -inf\n", name);
  } else {
    std::printf("%-11s %.7f\n", name, s.epsilon);
  }
  std::printf("residual    %.2e   gap %.2e   time %.2fs\n", s.primal_residual, s.gap, secs);
  if (s.epsilon < 1 - 1e-6) {
    std::printf("entangled (dimension-free)\n");
    return kExitOk;
  }
  std::printf("not detected at level %d\n", level);
  return kExitNotDetected;
}

int cmd_feas(const Options& o) {
  const WernerStateParam r = load_state(o.state_path);
  const int level = resolve_level(o, r.n());
  const Rational theta = parse_rational(o.theta_text);
  const SdpProblem p = build(o, r, level, false);
  print_problem(p);
  SolverOptions so;
  so.tolerance = o.tol;
  so.verbosity = o.verbosity;
  const SdpSolution s = solve_feasibility(p, theta, so);
  std::printf("theta'      %s\n", to_string(theta).c_str());
  std::printf("status      %s%s%s\n", to_string(s.status).c_str(), s.message.empty() ? "" : ": ",
              s.message.c_str());
  if (s.status == SolveStatus::kInfeasible) return kExitNotDetected;
  if (!s.usable()) return kExitError;
  std::printf("min eig G   %.3e\n", s.min_eigenvalue);
  std::printf("residual    %.2e\n", s.primal_residual);
  return kExitOk;
}

void print_report(const VerificationReport& rep) { std::fputs(rep.to_string().c_str(), stdout); }

int cmd_certify(const Options& o) {
  const WernerStateParam r = load_state(o.state_path);
  const int level = resolve_level(o, r.n());
  const Rational theta = parse_rational(o.theta_text);
  const mpz_class bound(o.denom_bound_text);
  const SdpProblem p = build(o, r, level, true);
  print_problem(p);
  SolverOptions so;
  so.tolerance = o.tol;
  so.verbosity = o.verbosity;
  const auto t0 = std::chrono::steady_clock::now();
  const SdpSolution s = solve_feasibility(p, theta, so);
  if (s.status == SolveStatus::kInfeasible) {
    std::printf("infeasible at theta' = %s: %s\n", to_string(theta).c_str(), s.message.c_str());
    return kExitNotDetected;
  }
  if (!s.usable()) throw std::runtime_error("feasibility solve failed: " + s.message);
  std::printf("feasible    min eig G %.3e\n", s.min_eigenvalue);
  WitnessCertificate c = rationalize(s, p, theta, bound);
  c.metadata["state"] = o.state_path;
  c.metadata["tool"] = "wernerctl certify";
  VerificationReport rep = verify_certificate(c, r);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_report(rep);
  std::printf("time        %.2fs\n", secs);
  if (!o.out_path.empty()) {
    write_certificate(o.out_path, c);
    std::printf("wrote %s\n", o.out_path.c_str());
  }
  if (!rep.ok()) return kExitError;
  std::printf("certified: w + %s id is a dimension-free entanglement witness\n", to_string(theta).c_str());
  return kExitOk;
}

// Floating spot check of the certified inequality at random points.
bool sample_check(const WitnessCertificate& c, int samples, unsigned long seed) {
  std::mt19937_64 rng(seed);
  const double theta = c.theta.get_d();
  double worst = std::numeric_limits<double>::infinity();
  if (c.hierarchy == Hierarchy::kTpop) {
    const auto tw = t_element(c.w);
    for (int t = 0; t < samples; ++t) {
      auto x = random_projections(c.n, 1 + t % 4, rng);
      worst = std::min(worst, eval_tracial(tw, x).real() + theta);
    }
  } else {
    const auto f = gmf(c.w);
    for (int t = 0; t < samples; ++t) {
      EllipticGram a = EllipticGram::random(c.n, 1 + t % c.n, rng);
      worst = std::min(worst, gmf_eval(f, a).real() + theta);
    }
  }
  std::printf("%s sampled minimum over %d points: %.3e\n", worst >= -1e-9 ? "PASS" : "FAIL", samples, worst);
  return worst >= -1e-9;
}

int cmd_verify(const Options& o) {
  const WernerStateParam r = load_state(o.state_path);
  const WitnessCertificate c = read_certificate(o.cert_path);
  VerificationReport rep = verify_certificate(c, r);
  print_report(rep);
  bool ok = rep.ok();
  if (o.samples > 0) ok = sample_check(c, o.samples, o.seed) && ok;
  return ok ? kExitOk : kExitError;
}

int cmd_ppt(const Options& o) {
  const WernerStateParam r = load_state(o.state_path);
  const TensorOperator rho = mu(o.d, r.r);
  std::printf("mu_%d(r): dimension %ld, trace %.12f\n", o.d, rho.dim(), rho.trace().real());
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& subset : bipartitions(r.n())) {
    const double m = ppt_min_eigenvalue(rho, subset);
    worst = std::min(worst, m);
    std::string label;
    for (int k : subset) label += std::to_string(k);
    std::printf("transpose on {%s}: min eigenvalue %.3e\n", label.c_str(), m);
  }
  const bool ppt = worst >= -1e-9;
  std::printf("%s\n", ppt ? "PPT across all bipartitions" : "NPT: entangled by the partial transpose test");
  return kExitOk;
}

int cmd_twirl(const Options& o) {
  const WernerStateParam r = load_state(o.state_path);
  if (o.d < r.n()) throw std::invalid_argument("twirl requires --d >= n");
  // Conjugating by a random product unitary leaves mu_d(r) unchanged; the
  // twirl must recover r from the conjugated operator.
  std::mt19937_64 rng(o.seed);
  TensorOperator rho = mu(o.d, r.r);
  Eigen::MatrixXcd u = haar_unitary(o.d, rng);
  Eigen::MatrixXcd big = u;
  for (int k = 1; k < r.n(); ++k) {
    Eigen::MatrixXcd next(big.rows() * u.rows(), big.cols() * u.cols());
    for (Eigen::Index i = 0; i < big.rows(); ++i)
      for (Eigen::Index j = 0; j < big.cols(); ++j) next.block(i * u.rows(), j * u.cols(), u.rows(), u.cols()) = big(i, j) * u;
    big = next;
  }
  rho.matrix = big * rho.matrix * big.adjoint();
  const NumericElement back = twirl(rho);
  double err = 0;
  for (const auto& sigma : all_permutations(r.n()))
    err = std::max(err, std::abs(back.coeff(sigma) - r.r.coeff(sigma).to_complex()));
  for (const auto& [sigma, c] : back.terms())
    if (std::abs(c) > 1e-12) std::printf("%-12s % .12f % .12f\n", sigma.to_string().c_str(), c.real(), c.imag());
  std::printf("max deviation from the input parameter: %.3e\n", err);
  return err < 1e-8 ? kExitOk : kExitError;
}

int cmd_param(const Options& o) {
  if (!o.seed_path.empty()) {
    ElementFile f = read_element_file(o.seed_path);
    const int d = f.document.value("d", o.d);
    const WernerStateParam r = eta_state_to_mu_param(f.element, d);
    Json meta = {{"name", "mu_" + std::to_string(d) + " parameter of eta_" + std::to_string(d) + "(s s^dagger)/tr"},
                 {"source", o.seed_path}};
    const Json doc = element_to_json(r.r, "state", meta);
    if (!o.out_path.empty()) {
      write_json_file(o.out_path, doc);
      std::printf("wrote %s\n", o.out_path.c_str());
    } else {
      std::cout << doc.dump(1) << "\n";
    }
    return kExitOk;
  }
  const WernerStateParam r = load_state(o.state_path);
  const ExactElement e = mu_to_eta(o.d, r.r);
  const Json doc = element_to_json(e, "element", {{"name", "eta_" + std::to_string(o.d) + " preimage of mu_" +
                                                              std::to_string(o.d) + "(r)"}});
  if (!o.out_path.empty()) {
    write_json_file(o.out_path, doc);
    std::printf("wrote %s\n", o.out_path.c_str());
  } else {
    std::cout << doc.dump(1) << "\n";
  }
  return kExitOk;
}

int cmd_sizes(const Options& o) {
  check_arity(o.n);
  const bool pop = o.hierarchy == "pop" || o.hierarchy == "both";
  const bool tpop = o.hierarchy == "tpop" || o.hierarchy == "both";
  if (!pop && !tpop) throw std::invalid_argument("--hierarchy must be pop, tpop or both");
  const bool real = real_flag(o).value_or(false);
  for (int step = 1; step <= o.steps; ++step) {
    const int level = min_level(o.n) + step - 1;
    std::printf("n=%d step %d (level %d)", o.n, step, level);
    if (pop) {
      auto s = pop_sizes(o.n, level);
      std::printf("  POP (%ld, %ld)", s.block_size, s.equations);
    }
    if (tpop) {
      auto s = tpop_sizes(o.n, level, real);
      std::printf("  TPOP%s (%ld, %ld)", real ? "[real]" : "", s.block_size, s.equations);
    }
    std::printf("\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension-free entanglement witnesses for Werner states"};
  app.require_subcommand(1);
  Options o;

  auto add_state = [&](CLI::App* c) { c->add_option("--state", o.state_path, "state file (kind 'state')")->required(); };
  auto add_solver = [&](CLI::App* c) {
    c->add_option("--level", o.level, "hierarchy level (default ceil(n/2))");
    c->add_flag("--real", o.force_real, "real mode (real w and G)");
    c->add_flag("--complex", o.force_complex, "complex mode");
    c->add_option("--tol", o.tol, "solver tolerance")->check(CLI::PositiveNumber);
    c->add_option("-v,--verbosity", o.verbosity, "solver log level");
  };

  auto* pop = app.add_subcommand("pop", "optimize the polynomial (elliptope) hierarchy");
  add_state(pop);
  add_solver(pop);
  pop->add_option("--out", o.out_path, "write a JSON solution report");
  pop->callback([&] { o.hierarchy = "pop"; });

  auto* tpop = app.add_subcommand("tpop", "optimize the tracial hierarchy");
  add_state(tpop);
  add_solver(tpop);
  tpop->add_option("--out", o.out_path, "write a JSON solution report");
  tpop->callback([&] { o.hierarchy = "tpop"; });

  auto* feas = app.add_subcommand("feas", "feasibility at a fixed shift theta'");
  add_state(feas);
  add_solver(feas);
  feas->add_option("--theta", o.theta_text, "shift theta' as p/q");
  feas->add_option("--hierarchy", o.hierarchy, "pop or tpop")->check(CLI::IsMember({"pop", "tpop"}));

  auto* cert = app.add_subcommand("certify", "feasibility, rationalization and exact verification");
  add_state(cert);
  add_solver(cert);
  cert->add_option("--theta", o.theta_text, "shift theta' as p/q");
  cert->add_option("--denom-bound", o.denom_bound_text, "rounding denominator bound");
  cert->add_option("--hierarchy", o.hierarchy, "pop or tpop")->check(CLI::IsMember({"pop", "tpop"}));
  cert->add_option("--out", o.out_path, "certificate output file");

  auto* ver = app.add_subcommand("verify", "verify a certificate exactly");
  add_state(ver);
  ver->add_option("--cert", o.cert_path, "certificate file")->required();
  ver->add_option("--seed", o.seed, "seed for the sampled check");
  ver->add_option("--samples", o.samples, "number of sampled points (0 to skip)");

  auto* ppt = app.add_subcommand("ppt", "partial transposes of mu_d(r) over all bipartitions");
  add_state(ppt);
  ppt->add_option("--d", o.d, "local dimension")->check(CLI::PositiveNumber);

  auto* tw = app.add_subcommand("twirl", "recover r from a unitarily conjugated mu_d(r)");
  add_state(tw);
  tw->add_option("--d", o.d, "local dimension (>= n)")->check(CLI::PositiveNumber);
  tw->add_option("--seed", o.seed, "seed for the random unitary");

  auto* param = app.add_subcommand("param", "convert between eta_d seeds and mu_d parameters");
  auto* from_seed = param->add_option("--seed-file", o.seed_path, "seed s; prints the mu_d parameter of eta_d(s s^dagger)/tr");
  param->add_option("--state", o.state_path, "state r; prints the eta_d preimage of mu_d(r)")->excludes(from_seed);
  param->add_option("--d", o.d, "local dimension")->check(CLI::PositiveNumber);
  param->add_option("--out", o.out_path, "output file");

  auto* sizes = app.add_subcommand("sizes", "problem sizes (block size, equations) per step");
  sizes->add_option("--n", o.n, "number of parties")->required();
  sizes->add_option("--hierarchy", o.hierarchy, "pop, tpop or both")->check(CLI::IsMember({"pop", "tpop", "both"}));
  sizes->add_option("--steps", o.steps, "number of steps")->check(CLI::PositiveNumber);
  sizes->add_flag("--real", o.force_real, "real-mode TPOP counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*pop || *tpop) return cmd_optimize(o);
    if (*feas) return cmd_feas(o);
    if (*cert) return cmd_certify(o);
    if (*ver) return cmd_verify(o);
    if (*ppt) return cmd_ppt(o);
    if (*tw) return cmd_twirl(o);
    if (*param) {
      if (o.seed_path.empty() && o.state_path.empty()) throw std::invalid_argument("param needs --seed-file or --state");
      return cmd_param(o);
    }
    if (*sizes) return cmd_sizes(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
