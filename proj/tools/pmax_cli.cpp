#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pmax/diffusion.hpp"
#include "pmax/error.hpp"
#include "pmax/harness.hpp"
#include "pmax/optbound.hpp"
#include "pmax/rmg.hpp"
#include "pmax/text.hpp"

namespace fs = std::filesystem;
using namespace pmax;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct InstanceArgs {
  std::string dataset;
  bool undirected = false;
  std::string catalog;
};

struct Instance {
  std::string label;
  Graph graph;
  ProductCatalog catalog;
};

Instance load_instance(const InstanceArgs& args) {
  LoadedGraph loaded = load_edge_list(args.dataset, !args.undirected);
  Instance inst;
  inst.label = fs::path(args.dataset).stem().string();
  inst.graph = loaded.has_probabilities ? std::move(loaded.graph)
                                        : assign_wc_probabilities(loaded.graph);
  if (!args.catalog.empty()) inst.catalog = load_catalog(args.catalog);
  return inst;
}

std::vector<Money> parse_budgets(const std::string& text) {
  std::vector<Money> budgets;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      budgets.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ValidationError("bad budget '" + item + "' in --budget-list");
    }
  }
  if (budgets.empty()) throw ValidationError("--budget-list is empty");
  for (std::size_t b = 1; b < budgets.size(); ++b)
    if (!(budgets[b] > budgets[b - 1]))
      throw ValidationError("--budget-list must be strictly increasing");
  return budgets;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) parts.push_back(item);
  return parts;
}

MatrixMode parse_matrix_mode(const std::string& text) {
  if (text == "prefix") return MatrixMode::prefix;
  if (text == "literal") return MatrixMode::literal;
  throw ValidationError("unknown matrix mode '" + text + "'");
}

void check_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) throw ValidationError(std::string(name) + " must lie in (0,1)");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  return out.parent_path() / (out.stem().string() + suffix + out.extension().string());
}

void add_instance_flags(CLI::App* cmd, InstanceArgs& args, bool needs_catalog) {
  cmd->add_option("--dataset", args.dataset, "Edge list: 'u v [p]' per line")->required();
  cmd->add_flag("--undirected", args.undirected, "Treat each line as two directed edges");
  auto* cat = cmd->add_option("--catalog", args.catalog, "Products: 'profit cost' per line");
  if (needs_catalog) cat->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-product profit maximization with reverse influence sampling"};
  app.require_subcommand(1);
  int workers = 0;
  bool quiet = false;
  app.add_option("--workers", workers, "Worker threads (default: all cores)");
  app.add_flag("--quiet", quiet, "Suppress warnings");

  // run
  InstanceArgs run_inst;
  std::string run_budgets = "1";
  std::string run_algorithms = "rmg,random,greedy_mc,pmce";
  std::string run_mode = "fast", run_matrix = "prefix", run_out;
  ExperimentSpec spec;
  auto* run = app.add_subcommand("run", "Budget sweep over the selected algorithms");
  add_instance_flags(run, run_inst, true);
  run->add_option("--budget-list", run_budgets, "Comma-separated increasing budgets");
  run->add_option("--algorithms", run_algorithms, "Subset of rmg,random,greedy_mc,pmce");
  run->add_option("--eps", spec.rmg.eps, "Approximation slack of RMG");
  run->add_option("--eps-prime", spec.rmg.eps_prime, "TIM+ selection slack");
  run->add_option("--eps-bar", spec.rmg.eps_bar, "TIM+ refinement slack");
  run->add_option("--l", spec.rmg.l, "Failure exponent of the sampling bound");
  run->add_option("--l-prime", spec.rmg.l_prime, "Failure exponent of the OPT bound");
  run->add_option("--seed", spec.seed, "Master seed");
  run->add_option("--mode", run_mode, "Greedy mode: exact or fast");
  run->add_option("--eval-trials", spec.eval_trials, "MC trials for the final evaluation");
  run->add_option("--theta-cap", spec.rmg.theta_cap, "Upper limit on RR sets");
  run->add_option("--theta-eval", spec.rmg.theta_eval, "RR sets for the u** estimate");
  run->add_option("--matrix-mode", run_matrix, "Profit matrix: prefix or literal");
  run->add_option("--r", spec.baseline_trials, "MC trials per marginal for the baselines");
  run->add_flag("--timing", spec.timing, "Record wall-clock milliseconds");
  run->add_option("--out", run_out, "Profit CSV; _distribution and _optbound files go alongside");

  // opt-bound
  InstanceArgs ob_inst;
  std::string ob_budgets = "1", ob_matrix = "prefix", ob_out, ob_matrix_out;
  OptParams ob_params;
  std::uint64_t ob_seed = 0;
  std::size_t ob_theta_eval = kDefaultThetaEval;
  auto* ob = app.add_subcommand("opt-bound", "u*, u** and u' per budget");
  add_instance_flags(ob, ob_inst, true);
  ob->add_option("--budget-list", ob_budgets, "Comma-separated increasing budgets");
  ob->add_option("--eps-prime", ob_params.eps_prime, "TIM+ selection slack");
  ob->add_option("--eps-bar", ob_params.eps_bar, "TIM+ refinement slack");
  ob->add_option("--l-prime", ob_params.l_prime, "Failure exponent");
  ob->add_option("--seed", ob_seed, "Master seed");
  ob->add_option("--theta-eval", ob_theta_eval, "RR sets for the u** estimate");
  ob->add_option("--matrix-mode", ob_matrix, "Profit matrix: prefix or literal");
  ob->add_option("--matrix-out", ob_matrix_out, "Profit matrix CSV of the last budget");
  ob->add_option("--out", ob_out, "Output CSV (default stdout)");

  // oracle
  InstanceArgs or_inst;
  std::string or_budgets = "1", or_out;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum on a tiny instance");
  add_instance_flags(oracle, or_inst, true);
  oracle->add_option("--budget-list", or_budgets, "Comma-separated increasing budgets");
  oracle->add_option("--out", or_out, "Output CSV (default stdout)");

  // gen
  std::size_t gen_n = 1000;
  double gen_degree = 4.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Random directed graph with weighted-cascade weights");
  gen->add_option("--n", gen_n, "Nodes");
  gen->add_option("--avg-degree", gen_degree, "Expected out-degree");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Edge list path (default stdout)");

  // rr-cache
  InstanceArgs rr_inst;
  std::size_t rr_q = 1, rr_theta = 10000;
  std::uint64_t rr_seed = 0;
  std::string rr_out, rr_load;
  auto* rr = app.add_subcommand("rr-cache", "Write an RR collection, or summarize a saved one");
  rr->add_option("--dataset", rr_inst.dataset, "Edge list");
  rr->add_flag("--undirected", rr_inst.undirected, "Treat each line as two directed edges");
  rr->add_option("--q", rr_q, "Products (copies)");
  rr->add_option("--theta", rr_theta, "RR sets");
  rr->add_option("--seed", rr_seed, "Seed");
  rr->add_option("--out", rr_out, "Binary collection to write");
  rr->add_option("--load", rr_load, "Binary collection to summarize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (workers > 0) set_workers(workers);
    diag::set_quiet(quiet);

    if (*run) {
      const Instance inst = load_instance(run_inst);
      spec.dataset = inst.label;
      spec.budgets = parse_budgets(run_budgets);
      spec.algorithms = split(run_algorithms);
      spec.rmg.mode = parse_greedy_mode(run_mode);
      spec.rmg.matrix_mode = parse_matrix_mode(run_matrix);
      check_open_unit(spec.rmg.eps, "--eps");
      check_open_unit(spec.rmg.eps_prime, "--eps-prime");
      check_open_unit(spec.rmg.eps_bar, "--eps-bar");
      if (!(spec.rmg.l > 0.0) || !(spec.rmg.l_prime > 0.0))
        throw ValidationError("--l and --l-prime must be positive");
      if (spec.rmg.theta_cap == 0 || spec.rmg.theta_eval == 0)
        throw ValidationError("--theta-cap and --theta-eval must be positive");
      validate(spec);
      const SweepResult result = run_sweep(inst.graph, inst.catalog, spec);
      if (run_out.empty()) {
        write_profit_csv(std::cout, result.profits);
      } else {
        const fs::path out = run_out;
        auto profits = open_output(out);
        write_profit_csv(profits, result.profits);
        auto dist = open_output(sibling(out, "_distribution"));
        write_distribution_csv(dist, result.distribution);
        auto bounds = open_output(sibling(out, "_optbound"));
        write_opt_bound_csv(bounds, result.opt_bounds);
      }
    } else if (*ob) {
      const Instance inst = load_instance(ob_inst);
      check_open_unit(ob_params.eps_prime, "--eps-prime");
      check_open_unit(ob_params.eps_bar, "--eps-bar");
      const MatrixMode mode = parse_matrix_mode(ob_matrix);
      std::vector<OptBoundRow> rows;
      ProfitMatrix last;
      for (Money budget : parse_budgets(ob_budgets)) {
        OptBounds b = estimate_opt_bounds(inst.graph, inst.catalog, budget, ob_params, ob_seed,
                                          mode, ob_theta_eval);
        rows.push_back({inst.label, budget, b.u_star, b.u_double_star, b.u_prime, ob_seed});
        last = std::move(b.matrix);
      }
      if (ob_out.empty()) {
        write_opt_bound_csv(std::cout, rows);
      } else {
        auto out = open_output(ob_out);
        write_opt_bound_csv(out, rows);
      }
      if (!ob_matrix_out.empty()) {
        auto out = open_output(ob_matrix_out);
        last.write_csv(out);
      }
    } else if (*oracle) {
      const Instance inst = load_instance(or_inst);
      std::ostringstream text;
      text << "dataset,B,opt,seeds\n";
      for (Money budget : parse_budgets(or_budgets)) {
        const ExactOptimum opt =
            exact_opt(CopyGraph(inst.graph, inst.catalog.q()), inst.catalog, budget);
        text << inst.label << ',' << format_number(budget) << ',' << format_number(opt.opt)
             << ',';
        for (std::size_t i = 0; i < opt.assignment.q(); ++i) {
          if (i > 0) text << ';';
          text << i << ':';
          const auto& seeds = opt.assignment.seeds(i);
          for (std::size_t k = 0; k < seeds.size(); ++k) text << (k ? " " : "") << seeds[k];
        }
        text << '\n';
      }
      if (or_out.empty()) {
        std::cout << text.str();
      } else {
        auto out = open_output(or_out);
        out << text.str();
      }
    } else if (*gen) {
      const Graph g = gen_synthetic(gen_n, gen_degree, gen_seed);
      if (gen_out.empty()) {
        write_edge_list(std::cout, g);
      } else {
        auto out = open_output(gen_out);
        write_edge_list(out, g);
      }
    } else if (*rr) {
      if (!rr_load.empty()) {
        const RRCollection rc = RRCollection::load(rr_load);
        std::cout << "n=" << rc.n() << "\nq=" << rc.q() << "\ntheta=" << rc.theta()
                  << "\ntotal_nodes=" << rc.total_nodes() << "\ntotal_width=" << rc.total_width()
                  << '\n';
      } else {
        if (rr_inst.dataset.empty() || rr_out.empty())
          throw ValidationError("rr-cache needs --dataset and --out, or --load");
        if (rr_q == 0 || rr_theta == 0) throw ValidationError("--q and --theta must be positive");
        const Instance inst = load_instance(rr_inst);
        generate_collection(CopyGraph(inst.graph, rr_q), rr_theta, rr_seed).save(rr_out);
      }
    }
  } catch (const InfeasibleInstance& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
