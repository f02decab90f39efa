// Command line front end: solvers, certification, simulation, and the
// experiment tables, with JSON/CSV artifacts.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "erloss/certify.hpp"
#include "erloss/dynamic.hpp"
#include "erloss/experiments.hpp"
#include "erloss/io.hpp"
#include "erloss/loss.hpp"
#include "erloss/parallel.hpp"
#include "erloss/sim.hpp"
#include "erloss/static_policy.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct output_sink {
  std::optional<std::string> dir;

  // Writes an artifact file under --out, or streams it to stdout when no
  // output directory was requested.
  void emit(const std::string& name, const std::string& content) const {
    if (!dir) {
      std::cout << content << "\n";
      return;
    }
    fs::create_directories(*dir);
    const fs::path path = fs::path(*dir) / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path.string());
    os << content;
    if (!content.empty() && content.back() != '\n') os << "\n";
    std::clog << "[erloss] wrote " << path.string() << "\n";
  }
};

erloss::load_report load_logged(const std::string& path) {
  erloss::load_report rep = erloss::load_instance_file(path);
  for (const auto& w : rep.warnings) std::clog << "[erloss] warning: " << w << "\n";
  std::clog << "[erloss] instance: C=" << rep.inst.C << " classes=" << rep.inst.num_classes()
            << (rep.has_seed ? " seed=" + std::to_string(rep.seed) : std::string())
            << " tol=" << rep.tol << "\n";
  return rep;
}

json rates_json(const std::vector<double>& rates) { return json(rates); }

json policy_summary(const erloss::instance& inst, const erloss::state_space& S,
                    const erloss::dynamic_policy& policy) {
  json states = json::array();
  for (std::size_t s = 0; s < S.size(); ++s) {
    json row;
    row["state"] = std::vector<int>(S.state(s).begin(), S.state(s).end());
    std::vector<double> r(static_cast<std::size_t>(inst.num_classes()));
    for (int j = 0; j < inst.num_classes(); ++j) r[static_cast<std::size_t>(j)] = policy.rate(s, j);
    row["rates"] = r;
    states.push_back(std::move(row));
  }
  return states;
}

json sim_json(const erloss::sim_estimate& est) {
  return json::parse(erloss::sim_estimate_to_json(est));
}

int run_solve_dynamic(const std::string& config, double tol_override, bool has_tol,
                      const output_sink& out) {
  auto rep = load_logged(config);
  erloss::state_space S(rep.inst.C, rep.inst.num_classes());
  erloss::solve_options opt;
  opt.tol = has_tol ? tol_override : rep.tol;
  auto sol = erloss::solve_dynamic(rep.inst, S, opt);
  std::clog << "[erloss] gain=" << sol.gain << " iterations=" << sol.iterations
            << " converged=" << (sol.converged ? "yes" : "no") << "\n";
  out.emit("dynamic_solution.json", erloss::solve_report_to_json(rep.inst, S, sol));
  return 0;
}

int run_solve_static(const std::string& config, double tol_override, bool has_tol,
                     const output_sink& out) {
  auto rep = load_logged(config);
  const double tol = has_tol ? tol_override : rep.tol;
  auto sol = erloss::optimal_static(rep.inst, tol);
  std::clog << "[erloss] revenue=" << sol.revenue << " grad_norm=" << sol.grad_norm
            << " starts=" << sol.starts_used << "\n";
  out.emit("static_solution.json", erloss::static_report_to_json(rep.inst, sol));
  return 0;
}

int run_ratio(const std::string& config, double delta, bool has_delta, double tol_override,
              bool has_tol, const output_sink& out) {
  auto rep = load_logged(config);
  erloss::state_space S(rep.inst.C, rep.inst.num_classes());
  erloss::solve_options opt;
  opt.tol = has_tol ? tol_override : rep.tol;
  auto dyn = erloss::solve_dynamic(rep.inst, S, opt);
  auto pi = erloss::stationary_of_policy(rep.inst, S, dyn.policy);
  auto tilde = erloss::constructed_static(rep.inst, S, dyn.policy, pi);
  const double r_tilde = erloss::static_revenue(rep.inst, tilde);
  auto opt_static = erloss::optimal_static(rep.inst, has_tol ? tol_override : rep.tol);

  json doc;
  doc["instance"] = json::parse(erloss::instance_to_json(rep.inst));
  doc["dynamic_gain"] = dyn.gain;
  doc["constructed_static"] = {{"rates", rates_json(tilde.rates)},
                               {"revenue", r_tilde},
                               {"ratio", r_tilde / dyn.gain}};
  doc["optimal_static"] = {{"rates", rates_json(opt_static.policy.rates)},
                           {"revenue", opt_static.revenue},
                           {"ratio", opt_static.revenue / dyn.gain}};
  doc["guarantee_floor"] = erloss::guarantee_G(rep.inst.C);
  if (has_delta) {
    auto fl = erloss::fluid_heuristic(rep.inst, delta);
    const double r_fl = erloss::static_revenue(rep.inst, fl);
    doc["fluid"] = {{"delta", delta},
                    {"rates", rates_json(fl.rates)},
                    {"revenue", r_fl},
                    {"ratio", r_fl / dyn.gain}};
  }
  std::clog << "[erloss] dynamic=" << dyn.gain << " constructed=" << r_tilde
            << " optimal=" << opt_static.revenue << "\n";
  out.emit("ratio.json", doc.dump(2));
  return 0;
}

int run_certify(int C, int grid, const output_sink& out) {
  std::clog << "[erloss] certify C=" << C << " grid=" << grid
            << " workers=" << erloss::worker_count() << "\n";
  const double c1 = erloss::closed_form_case1(C);
  const double c2 = erloss::closed_form_case2(C);
  auto box = erloss::certify_box(C, grid);
  std::clog << "[erloss] case1=" << c1 << " case2=" << c2 << " box=" << box.lower_bound
            << " bound=" << std::min({c1, c2, box.lower_bound}) << "\n";
  out.emit("certificate_C" + std::to_string(C) + ".json",
           erloss::certify_document_json(c1, c2, box));
  return 0;
}

int run_simulate(const std::string& config, double horizon, int reps, std::uint64_t seed,
                 bool has_seed, const output_sink& out) {
  auto rep = load_logged(config);
  if (!has_seed && rep.has_seed) seed = rep.seed;
  erloss::state_space S(rep.inst.C, rep.inst.num_classes());
  auto dyn = erloss::solve_dynamic(rep.inst, S);
  auto pi = erloss::stationary_of_policy(rep.inst, S, dyn.policy);
  auto tilde = erloss::constructed_static(rep.inst, S, dyn.policy, pi);

  std::vector<erloss::service_spec> service;
  for (const auto& cl : rep.inst.classes)
    service.push_back(erloss::service_spec::exponential(1.0 / cl.mu));
  std::clog << "[erloss] simulate horizon=" << horizon << " reps=" << reps << " seed=" << seed
            << "\n";
  auto cmp = erloss::compare_policies(rep.inst, S, {tilde, dyn.policy}, service, horizon, reps,
                                      seed);

  json doc;
  doc["seed"] = seed;
  doc["horizon"] = horizon;
  doc["reps"] = reps;
  doc["constructed_static"] = sim_json(cmp.per_policy[0]);
  doc["dynamic"] = sim_json(cmp.per_policy[1]);
  doc["analytic_dynamic_gain"] = dyn.gain;
  doc["analytic_constructed_revenue"] = erloss::static_revenue(rep.inst, tilde);
  doc["revenue_ratio"] = cmp.ratio_to_reference[0];
  doc["revenue_ratio_ci"] = cmp.ratio_ci[0];
  out.emit("simulate.json", doc.dump(2));
  return 0;
}

int run_table_guarantees(int c_max, int grid, const output_sink& out) {
  std::clog << "[erloss] table-guarantees Cmax=" << c_max << " grid=" << grid
            << " workers=" << erloss::worker_count() << "\n";
  auto res = erloss::mhr_guarantee(grid, c_max);
  std::ostringstream csv;
  erloss::write_guarantee_csv(csv, res);
  std::clog << "[erloss] overall=" << res.overall << " argmin_C=" << res.argmin_C
            << " tail=" << res.tail << "\n";
  out.emit("guarantees.csv", csv.str());
  return 0;
}

int run_table_fluid(int M, int C, int instances, std::uint64_t seed, const std::string& demand,
                    const output_sink& out) {
  erloss::demand_kind kind;
  if (demand == "linear")
    kind = erloss::demand_kind::linear;
  else if (demand == "exponential")
    kind = erloss::demand_kind::exponential;
  else
    throw std::invalid_argument("unsupported demand kind for table-fluid: " + demand);
  std::clog << "[erloss] table-fluid M=" << M << " C=" << C << " instances=" << instances
            << " seed=" << seed << " demand=" << demand << "\n";
  auto summary = erloss::table_fluid(M, C, instances, seed, kind);
  std::ostringstream csv;
  erloss::write_fluid_csv(csv, summary);
  std::clog << "[erloss] worst_deltaC=" << summary.worst_deltaC
            << " avg_bestDelta=" << summary.avg_bestDelta
            << " avg_optimal=" << summary.avg_optimal << "\n";
  out.emit("fluid_table.csv", csv.str());
  return 0;
}

int run_repro_example1(double horizon, int reps, std::uint64_t seed, const output_sink& out) {
  erloss::instance inst = erloss::example1_instance();
  erloss::state_space S(inst.C, inst.num_classes());
  auto dyn = erloss::solve_dynamic(inst, S);
  auto pi = erloss::stationary_of_policy(inst, S, dyn.policy);
  auto tilde = erloss::constructed_static(inst, S, dyn.policy, pi);
  const double r_tilde = erloss::static_revenue(inst, tilde);
  auto opt_static = erloss::optimal_static(inst);

  std::vector<erloss::service_spec> service;
  for (const auto& cl : inst.classes)
    service.push_back(erloss::service_spec::exponential(1.0 / cl.mu));
  auto cmp = erloss::compare_policies(inst, S, {tilde, dyn.policy}, service, horizon, reps, seed);

  json doc;
  doc["instance"] = json::parse(erloss::instance_to_json(inst));
  doc["dynamic"] = {{"gain", dyn.gain},
                    {"converged", dyn.converged},
                    {"iterations", dyn.iterations},
                    {"policy", policy_summary(inst, S, dyn.policy)}};
  doc["constructed_static"] = {{"rates", rates_json(tilde.rates)},
                               {"revenue", r_tilde},
                               {"ratio", r_tilde / dyn.gain}};
  doc["optimal_static"] = {{"rates", rates_json(opt_static.policy.rates)},
                           {"revenue", opt_static.revenue},
                           {"ratio", opt_static.revenue / dyn.gain}};
  doc["guarantee_floor"] = erloss::guarantee_G(inst.C);
  doc["simulation"] = {{"horizon", horizon},
                       {"reps", reps},
                       {"seed", seed},
                       {"constructed_static", sim_json(cmp.per_policy[0])},
                       {"dynamic", sim_json(cmp.per_policy[1])},
                       {"revenue_ratio", cmp.ratio_to_reference[0]},
                       {"revenue_ratio_ci", cmp.ratio_ci[0]}};
  std::clog << "[erloss] gain=" << dyn.gain << " constructed_ratio=" << r_tilde / dyn.gain
            << " optimal_ratio=" << opt_static.revenue / dyn.gain
            << " simulated_ratio=" << cmp.ratio_to_reference[0] << " +- " << cmp.ratio_ci[0]
            << "\n";
  out.emit("example1_report.json", doc.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal dynamic versus static pricing in reusable-resource loss systems"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  bool has_out = false;
  int C = 19, grid = 500, c_max = 47;
  int M = 5, cap = 5, instances = 50;
  std::uint64_t seed = 20260823;
  std::string demand = "linear";
  double delta = 0.0, tol = 1e-9, horizon = 1e4;
  int reps = 16;
  bool has_delta = false, has_tol = false, has_seed = false;

  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "Output directory for artifacts (stdout when omitted)")
        ->each([&](const std::string&) { has_out = true; });
  };
  auto add_tol = [&](CLI::App* cmd) {
    cmd->add_option("--tol", tol, "Solver tolerance override")
        ->each([&](const std::string&) { has_tol = true; });
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Random seed")->each([&](const std::string&) {
      has_seed = true;
    });
  };

  auto* sd = app.add_subcommand("solve-dynamic", "Optimal state-dependent rates for an instance");
  sd->add_option("config", config, "Instance config JSON")->required()->check(CLI::ExistingFile);
  add_tol(sd);
  add_out(sd);

  auto* ss = app.add_subcommand("solve-static", "Optimal state-independent rates for an instance");
  ss->add_option("config", config, "Instance config JSON")->required()->check(CLI::ExistingFile);
  add_tol(ss);
  add_out(ss);

  auto* ra = app.add_subcommand("ratio", "Static-over-dynamic revenue ratios for an instance");
  ra->add_option("config", config, "Instance config JSON")->required()->check(CLI::ExistingFile);
  ra->add_option("--delta", delta, "Also evaluate the fluid heuristic at this capacity slack")
      ->each([&](const std::string&) { has_delta = true; });
  add_tol(ra);
  add_out(ra);

  auto* ce = app.add_subcommand("certify", "Certified ratio lower bound for one capacity");
  ce->add_option("--C", C, "Capacity (>= 3)")->check(CLI::Range(3, 1000));
  ce->add_option("--grid", grid, "Boxes per axis")->check(CLI::PositiveNumber);
  add_out(ce);

  auto* si = app.add_subcommand("simulate",
                                "Simulate the dynamic optimum against its constructed "
                                "static policy on common random numbers");
  si->add_option("config", config, "Instance config JSON")->required()->check(CLI::ExistingFile);
  si->add_option("--horizon", horizon, "Time horizon per replication");
  si->add_option("--reps", reps, "Replications")->check(CLI::Range(2, 100000));
  add_seed(si);
  add_out(si);

  auto* tg = app.add_subcommand("table-guarantees",
                                "Per-capacity guarantee table (closed forms plus box bound)");
  tg->add_option("--Cmax", c_max, "Largest capacity row")->check(CLI::Range(3, 47));
  tg->add_option("--grid", grid, "Boxes per axis for the certified bound")
      ->check(CLI::PositiveNumber);
  add_out(tg);

  auto* tf = app.add_subcommand("table-fluid",
                                "Random-instance sweep of static-policy quality");
  tf->add_option("--M", M, "Customer classes per instance")->check(CLI::PositiveNumber);
  tf->add_option("--C", cap, "Capacity")->check(CLI::PositiveNumber);
  tf->add_option("--instances", instances, "Number of random instances")
      ->check(CLI::PositiveNumber);
  tf->add_option("--demand", demand, "Demand shape: linear or exponential")
      ->check(CLI::IsMember({"linear", "exponential"}));
  add_seed(tf);
  add_out(tf);

  auto* re = app.add_subcommand("repro-example1",
                                "End-to-end report for the built-in two-class example");
  re->add_option("--horizon", horizon, "Time horizon per replication");
  re->add_option("--reps", reps, "Replications")->check(CLI::Range(2, 100000));
  add_seed(re);
  add_out(re);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  output_sink out;
  if (has_out) out.dir = out_dir;

  try {
    if (sd->parsed()) return run_solve_dynamic(config, tol, has_tol, out);
    if (ss->parsed()) return run_solve_static(config, tol, has_tol, out);
    if (ra->parsed()) return run_ratio(config, delta, has_delta, tol, has_tol, out);
    if (ce->parsed()) return run_certify(C, grid, out);
    if (si->parsed()) return run_simulate(config, horizon, reps, seed, has_seed, out);
    if (tg->parsed()) return run_table_guarantees(c_max, grid, out);
    if (tf->parsed()) return run_table_fluid(M, cap, instances, seed, demand, out);
    if (re->parsed()) return run_repro_example1(horizon, reps, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "erloss: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
