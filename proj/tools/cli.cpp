#include "cli.hpp"
#include "gauntlet.hpp"
#include "lluv/asymptotics.hpp"
#include "lluv/errors.hpp"
#include "lluv/sweep_io.hpp"
#include <CLI11.hpp>
#include <filesystem>
#include <ostream>
#include <thread>

namespace lluv::tools {

namespace {

const char* kDefaultConfig = "alpha = 1\nlambda = 4\n";

RunConfig load(const Invocation& inv) {
  RunConfig cfg = inv.config_path ? read_config(*inv.config_path, inv.overrides)
                                  : parse_config(kDefaultConfig, inv.overrides);
  if (inv.seed)
    cfg.seed = *inv.seed;
  return cfg;
}

std::string path_in(const Invocation& inv, const std::string& name) {
  return (std::filesystem::path(inv.out_dir) / name).string();
}

std::string profile_csv(const RadialProfile& phi) {
  std::string s = "r,phi\n";
  for (std::size_t i = 0; i < phi.size(); ++i)
    s += format_double(phi.grid()[i]) + "," + format_double(phi.values()[i]) + "\n";
  return s;
}

std::string history_csv(const std::vector<double>& h) {
  std::string s = "step,energy\n";
  for (std::size_t i = 0; i < h.size(); ++i)
    s += std::to_string(i) + "," + format_double(h[i]) + "\n";
  return s;
}

void line(std::ostream& out, const char* key, double v) { out << key << " = " << format_double(v) << "\n"; }

int cmd_minimize_f(const Invocation& inv, const RunConfig& cfg, std::ostream& out) {
  const FMinResult r = minimize_F(cfg.beta, cfg.f_config());
  const BesselMinimizer b = bessel_minimizer(cfg.beta);
  line(out, "beta", cfg.beta);
  line(out, "F", r.value);
  line(out, "F_closed_form", b.energy());
  out << "iterations = " << r.iterations << "\nconverged = " << (r.converged ? "true" : "false")
      << "\n";
  write_text(path_in(inv, "f_profile.csv"), profile_csv(r.argmin));
  write_text(path_in(inv, "f_history.csv"), history_csv(r.history));
  return kOk;
}

int cmd_bessel(const RunConfig& cfg, std::ostream& out) {
  const BesselMinimizer b = bessel_minimizer(cfg.beta);
  line(out, "beta", cfg.beta);
  line(out, "x1", b.x1);
  line(out, "mu", b.mu);
  line(out, "R", b.support_radius);
  line(out, "amplitude", b.amplitude);
  line(out, "F", b.energy());
  line(out, "euler_lagrange_residual", b.euler_lagrange_residual());
  return kOk;
}

int cmd_energy(const RunConfig& cfg, std::ostream& out) {
  const ShellQuadrature shell = build_shell(cfg.sigma, cfg.lambda, cfg.n_radial, cfg.n_angular);
  const RadialProfile phi = reference_profile(cfg.lambda, cfg.reference_extent);
  const ShellOperator theta2 = assemble_theta(phi, 2.0 * cfg.alpha, shell);
  const XReport x = x_of(theta2);
  const Norms n = eval_norms(phi);
  line(out, "alpha", cfg.alpha);
  line(out, "lambda", cfg.lambda);
  line(out, "profile_support", phi.support_radius());
  line(out, "energy", 0.5 * n.grad2 + 0.5 * x.value);
  line(out, "kinetic", 0.5 * n.grad2);
  line(out, "half_x", 0.5 * x.value);
  line(out, "beta_emp", 0.5 * x.value / n.l1);
  line(out, "beta_paper", beta_paper(cfg.alpha, cfg.lambda));
  line(out, "eig_min", x.eig_min);
  out << "clamped = " << x.clamped_count << "\n";
  line(out, "identity_residual", x.identity_residual);
  line(out, "c_conv_main", main_term_convention(phi, shell));
  out << "dofs = " << theta2.dofs() << "\n";
  return kOk;
}

int cmd_minimize_ll(const Invocation& inv, const RunConfig& cfg, std::ostream& out) {
  const Schedule s = schedule(cfg.alpha, cfg.lambda, cfg.schedule_side());
  const LLResult r =
      minimize_ll(cfg.alpha, cfg.lambda, cfg.sigma, s.L, cfg.shell(), cfg.optimizer());
  line(out, "alpha", cfg.alpha);
  line(out, "lambda", cfg.lambda);
  line(out, "L", s.L);
  line(out, "e_ll", r.e_ll);
  line(out, "initial_energy", r.initial_energy);
  line(out, "eig_min", r.x.eig_min);
  out << "clamped = " << r.x.clamped_count << "\niterations = " << r.iterations
      << "\nevaluations = " << r.evaluations << "\nconverged = " << (r.converged ? "true" : "false")
      << "\n";
  write_text(path_in(inv, "ll_profile.csv"), profile_csv(r.phi));
  write_text(path_in(inv, "ll_history.csv"), history_csv(r.history));
  return kOk;
}

SweepConfig sweep_config(const Invocation& inv, const RunConfig& cfg, std::ostream& err) {
  SweepConfig s;
  s.sigma = cfg.sigma;
  s.shell = cfg.shell();
  s.optimizer = cfg.optimizer();
  s.f = cfg.f_config();
  s.side = cfg.schedule_side();
  s.workers = inv.workers > 0 ? inv.workers
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  s.record_runtime = cfg.record_runtime;
  s.seed = cfg.seed;
  s.progress = [&err](const std::string& m) { err << m << "\n"; };
  return s;
}

int cmd_sweep(const Invocation& inv, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto records = ratio_sweep(cfg.grid(), sweep_config(inv, cfg, err));
  const ShellQuadrature shell = build_shell(cfg.sigma, cfg.lambda, cfg.n_radial, cfg.n_angular);
  const double c_main = main_term_convention(reference_profile(cfg.lambda, cfg.reference_extent), shell);
  const ExponentReport rep = exponent_report(records, c_main);
  const std::string summary = summary_json(rep, cfg);
  write_records(records, path_in(inv, "records.csv"));
  write_text(path_in(inv, "summary.json"), summary);
  out << summary;
  return kOk;
}

int cmd_localize(const Invocation& inv, const RunConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  std::vector<double> ladder = cfg.ladder;
  if (ladder.empty())
    for (double m : {1.25, 1.75, 2.5, 3.5, 10.0})
      ladder.push_back(m / cfg.lambda);
  const LocalizationFit e = localization_sweep(cfg.alpha, cfg.lambda, ladder, sweep_config(inv, cfg, err));
  const double R = bessel_minimizer(cfg.beta).support_radius;
  std::vector<double> f_ladder;
  for (double m : {0.1, 0.14, 0.2, 0.28, 1.5})
    f_ladder.push_back(m * R);
  const LocalizationFit f = localization_sweep_F(cfg.beta, f_ladder, cfg.f_config());

  std::string csv = "side,L,energy\n";
  for (std::size_t i = 0; i < e.L.size(); ++i)
    csv += "ll," + format_double(e.L[i]) + "," + format_double(e.energies[i]) + "\n";
  for (std::size_t i = 0; i < f.L.size(); ++i)
    csv += "f," + format_double(f.L[i]) + "," + format_double(f.energies[i]) + "\n";
  write_text(path_in(inv, "localization.csv"), csv);
  out << "ll_nested = " << (e.nested ? "true" : "false") << "\n";
  line(out, "ll_q", e.q);
  line(out, "ll_q_ci95", e.fit.ci95);
  out << "f_nested = " << (f.nested ? "true" : "false") << "\n";
  line(out, "f_q", f.q);
  line(out, "f_q_ci95", f.fit.ci95);
  return kOk;
}

int cmd_suite(const Invocation& inv, const RunConfig& cfg, bool gauntlet, std::ostream& out) {
  const SuiteReport rep = gauntlet ? run_gauntlet(cfg.seed) : run_fock_oracles(cfg.seed);
  const std::string text = rep.text();
  write_text(path_in(inv, gauntlet ? "check_report.txt" : "oracle_report.txt"), text);
  out << text;
  return rep.ok() ? kOk : kPropertyViolation;
}

}  // namespace

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load(inv);
    std::filesystem::create_directories(inv.out_dir);
    write_text(path_in(inv, "effective_config.txt"), write_config(cfg));
    const std::string& c = inv.subcommand;
    if (c == "minimize-f")
      return cmd_minimize_f(inv, cfg, out);
    if (c == "bessel")
      return cmd_bessel(cfg, out);
    if (c == "energy")
      return cmd_energy(cfg, out);
    if (c == "minimize-ll")
      return cmd_minimize_ll(inv, cfg, out);
    if (c == "sweep")
      return cmd_sweep(inv, cfg, out, err);
    if (c == "localize")
      return cmd_localize(inv, cfg, out, err);
    if (c == "oracle")
      return cmd_suite(inv, cfg, false, out);
    if (c == "check")
      return cmd_suite(inv, cfg, true, out);
    err << "error: unknown subcommand '" << c << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lieb-Loss effective energy toolkit"};
  app.require_subcommand(1, 1);
  Invocation inv;
  std::string config;
  std::uint64_t seed = 0;
  const std::vector<std::pair<const char*, const char*>> subs = {
      {"minimize-f", "minimize the effective functional F_beta"},
      {"bessel", "closed-form minimizer of F_beta"},
      {"energy", "effective energy of the reference profile"},
      {"minimize-ll", "minimize the effective energy at the scheduled radius"},
      {"sweep", "ratio sweep over the (alpha, lambda) grid"},
      {"localize", "localization ladder fits"},
      {"oracle", "Fock-space brute-force checks"},
      {"check", "randomized operator-inequality suite"}};
  for (const auto& [name, help] : subs) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", config, "config file");
    s->add_option("--out", inv.out_dir, "output directory");
    s->add_option("--seed", seed, "random seed");
    s->add_option("--workers", inv.workers, "worker threads (0 = logical cores)")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--set", inv.overrides, "override key=value")->take_all();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kConfigError;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();
  const CLI::App* s = app.get_subcommands().front();
  if (s->count("--config"))
    inv.config_path = config;
  if (s->count("--seed"))
    inv.seed = seed;
  return run(inv, out, err);
}

}  // namespace lluv::tools
