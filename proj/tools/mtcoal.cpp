// Command line front end: exact matrices, law suites, Monte-Carlo oracles,
// limit constructions and simulators over multi-type Cannings models.
//
// Exit codes: 0 success (and all checks passed), 1 a check failed,
// 2 malformed input.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mtcoal/errors.hpp"
#include "mtcoal/json_io.hpp"
#include "mtcoal/laws.hpp"
#include "mtcoal/limits.hpp"
#include "mtcoal/version.hpp"

using namespace mtcoal;

namespace {

struct Output {
  std::string format = "json";  // json | csv
  std::string path;             // empty = stdout

  void write(const Json& config, const Json& result, const std::string& csv = "") const {
    std::ostringstream body;
    if (format == "csv" && !csv.empty()) {
      body << csv;
    } else {
      Json artifact;
      artifact["tool"] = "mtcoal";
      artifact["version"] = kVersion;
      artifact["config"] = config;
      artifact["result"] = result;
      body << artifact.dump(2) << "\n";
    }
    if (path.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
      out << body.str();
    }
  }
};

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
  }
}

CanningsModel load_model(const std::string& path) { return model_from_json(load_json(path)); }

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device device;
  const std::uint64_t fresh =
      (static_cast<std::uint64_t>(device()) << 32) ^ static_cast<std::uint64_t>(device());
  std::cerr << "generated seed: " << fresh << "\n";
  return fresh;
}

LabeledPartition parse_initial(const std::string& initial, const std::string& types, int d) {
  if (!initial.empty()) return LabeledPartition::parse(initial, d);
  if (types.empty()) {
    throw std::invalid_argument("provide --initial \"1:1|2:2\" or --types \"1,2\"");
  }
  std::vector<int> labels;
  std::istringstream stream(types);
  std::string item;
  while (std::getline(stream, item, ',')) labels.push_back(std::stoi(item) - 1);
  return LabeledPartition::singletons(static_cast<int>(labels.size()), d, labels);
}

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> weights;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) weights.push_back(std::stod(item));
  if (weights.empty()) throw std::invalid_argument("empty weight list");
  return weights;
}

int report_exit(const LawReport& report, const Output& output, const Json& config) {
  output.write(config, report_to_json(report));
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-type Cannings models and their limiting coalescents"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Output output;
  app.add_option("--format", output.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", output.path, "output file (default stdout)");

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "list the labeled partitions of [n]");
  int en_n = 2, en_d = 2;
  bool count_only = false;
  enumerate->add_option("--n", en_n, "sample size")->required();
  enumerate->add_option("--d", en_d, "number of types")->required();
  enumerate->add_flag("--count-only", count_only, "print only |P_{n,E}|");

  // matrix
  auto* matrix_cmd = app.add_subcommand("matrix", "exact one-step transition matrix");
  std::string model_path;
  int ma_n = 2;
  bool exact_flag = true;
  matrix_cmd->add_option("--model", model_path, "model JSON file")->required();
  matrix_cmd->add_option("--n", ma_n, "sample size")->required();
  matrix_cmd->add_flag("--exact", exact_flag, "exact rational entries (always on)");

  // block-counting
  auto* block_cmd = app.add_subcommand("block-counting", "block counting transition matrix");
  std::string bc_model;
  int bc_n = 2;
  block_cmd->add_option("--model", bc_model, "model JSON file")->required();
  block_cmd->add_option("--n", bc_n, "sample size")->required();

  // mc
  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo one-step transition estimate");
  std::string mc_model;
  int mc_n = 2;
  std::uint64_t mc_reps = 100000;
  std::optional<std::uint64_t> mc_seed;
  mc_cmd->add_option("--model", mc_model, "model JSON file")->required();
  mc_cmd->add_option("--n", mc_n, "sample size")->required();
  mc_cmd->add_option("--reps", mc_reps, "replicates per starting state")
      ->capture_default_str();
  mc_cmd->add_option("--seed", mc_seed, "64-bit seed (generated and printed if absent)");

  // check <law>
  auto* check = app.add_subcommand("check", "machine-verify a structural law");
  check->require_subcommand(1);
  std::string ck_model, ck_table;
  std::vector<std::string> ck_models;
  int ck_depth = 3, ck_n = 3, ck_m = 2;

  auto* ck_consistency = check->add_subcommand("consistency", "the Phi recursion");
  ck_consistency->add_option("--model", ck_model)->required();
  ck_consistency->add_option("--depth", ck_depth)->capture_default_str();

  auto* ck_monotonicity = check->add_subcommand("monotonicity", "Phi is order reversing");
  ck_monotonicity->add_option("--model", ck_model)->required();
  ck_monotonicity->add_option("--depth", ck_depth)->capture_default_str();

  auto* ck_coupling = check->add_subcommand("coupling", "restriction lumpability");
  ck_coupling->add_option("--model", ck_model)->required();
  ck_coupling->add_option("--n", ck_n)->capture_default_str();
  ck_coupling->add_option("--m", ck_m)->capture_default_str();

  auto* ck_symmetry = check->add_subcommand("symmetry", "permutation invariance");
  ck_symmetry->add_option("--model", ck_model)->required();
  ck_symmetry->add_option("--n", ck_n)->capture_default_str();

  auto* ck_identity = check->add_subcommand("identity-limit", "P_N -> I criterion");
  ck_identity->add_option("--models", ck_models, "model JSON files, growing N_min")
      ->required()
      ->expected(-2);

  auto* ck_meppf = check->add_subcommand("meppf", "partition probability function axioms");
  ck_meppf->add_option("--model", ck_model, "build the table from a model's Phi values");
  ck_meppf->add_option("--table", ck_table, "or load a table JSON");
  ck_meppf->add_option("--depth", ck_depth)->capture_default_str();

  auto* ck_bounds = check->add_subcommand("bounds", "moment identities and coalescence bounds");
  ck_bounds->add_option("--model", ck_model)->required();

  // simulate <what>
  auto* simulate = app.add_subcommand("simulate", "sample trajectories");
  simulate->require_subcommand(1);
  std::string sim_model, sim_initial, sim_types, sim_xi, sim_kingman;
  int sim_generations = 10, sim_depth = 4;
  double sim_tmax = 10.0;
  std::optional<std::uint64_t> sim_seed;

  auto* sim_ancestry = simulate->add_subcommand("ancestry", "finite-N backward chain");
  sim_ancestry->add_option("--model", sim_model)->required();
  sim_ancestry->add_option("--initial", sim_initial, "partition text, e.g. \"1:1|2:2\"");
  sim_ancestry->add_option("--types", sim_types, "singleton types, e.g. \"1,2\"");
  sim_ancestry->add_option("--generations", sim_generations)->capture_default_str();
  sim_ancestry->add_option("--seed", sim_seed);

  auto* sim_coalescent = simulate->add_subcommand("coalescent", "limiting continuous-time chain");
  sim_coalescent->add_option("--kingman", sim_kingman, "comma list of rates a_k");
  sim_coalescent->add_option("--xi", sim_xi, "Xi spec JSON (rates completed to --depth)");
  sim_coalescent->add_option("--depth", sim_depth)->capture_default_str();
  sim_coalescent->add_option("--initial", sim_initial)->required();
  sim_coalescent->add_option("--tmax", sim_tmax)->capture_default_str();
  sim_coalescent->add_option("--seed", sim_seed);

  // limit <what>
  auto* limit = app.add_subcommand("limit", "limiting matrices and generators");
  limit->require_subcommand(1);
  std::string li_a, li_rho;
  int li_n = 2, li_d = 2;
  long li_M = 10;

  auto* li_kingman = limit->add_subcommand("kingman", "multi-type Kingman generator");
  li_kingman->add_option("--a", li_a, "comma list of rates a_k")->required();
  li_kingman->add_option("--n", li_n)->capture_default_str();

  auto* li_strong = limit->add_subcommand("strong-mutation", "P_N = A + c_N B expansion");
  li_strong->add_option("--M", li_M)->capture_default_str();
  li_strong->add_option("--n", li_n)->capture_default_str();
  li_strong->add_option("--d", li_d)->capture_default_str();

  auto* li_discrete = limit->add_subcommand("discrete", "discrete-time limit matrix");
  li_discrete->add_option("--rho", li_rho, "JSON file with a d x d matrix")->required();
  li_discrete->add_option("--n", li_n)->capture_default_str();

  // rates <what>
  auto* rates = app.add_subcommand("rates", "Xi rate tables");
  rates->require_subcommand(1);
  std::string ra_xi;
  int ra_depth = 4;

  auto* ra_xi_cmd = rates->add_subcommand("xi", "rates of >=2-entry diagonal tensors");
  ra_xi_cmd->add_option("--xi", ra_xi, "Xi spec JSON")->required();
  ra_xi_cmd->add_option("--depth", ra_depth)->capture_default_str();

  auto* ra_complete = rates->add_subcommand("complete", "completed table including ones");
  ra_complete->add_option("--xi", ra_xi, "Xi spec JSON")->required();
  ra_complete->add_option("--depth", ra_depth)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    Json config;
    for (int i = 1; i < argc; ++i) config.push_back(argv[i]);

    if (*enumerate) {
      if (count_only) {
        std::cout << enumerate_partitions(en_n, en_d).size() << "\n";
        return 0;
      }
      auto states = enumerate_partitions(en_n, en_d);
      Json result;
      result["n"] = en_n;
      result["d"] = en_d;
      result["count"] = states.size();
      std::vector<std::string> encoded;
      for (const auto& s : states) encoded.push_back(s.encode());
      result["states"] = encoded;
      std::ostringstream csv;
      csv << "state\n";
      for (const auto& s : encoded) csv << "\"" << s << "\"\n";
      output.write(config, result, csv.str());
      return 0;
    }

    if (*matrix_cmd) {
      auto matrix = transition_matrix(load_model(model_path), ma_n);
      output.write(config, exact_matrix_to_json(matrix), exact_matrix_to_csv(matrix));
      return 0;
    }

    if (*block_cmd) {
      auto matrix = block_counting_matrix(load_model(bc_model), bc_n);
      output.write(config, block_counting_to_json(matrix), block_counting_to_csv(matrix));
      return 0;
    }

    if (*mc_cmd) {
      const std::uint64_t seed = resolve_seed(mc_seed);
      auto matrix = mc_transition_estimate(load_model(mc_model), mc_n, mc_reps, seed);
      output.write(config, mc_matrix_to_json(matrix), mc_matrix_to_csv(matrix));
      return 0;
    }

    if (*ck_consistency) {
      return report_exit(check_consistency(load_model(ck_model), ck_depth), output, config);
    }
    if (*ck_monotonicity) {
      return report_exit(check_monotonicity(load_model(ck_model), ck_depth), output, config);
    }
    if (*ck_coupling) {
      return report_exit(check_natural_coupling(load_model(ck_model), ck_n, ck_m), output,
                         config);
    }
    if (*ck_symmetry) {
      return report_exit(check_permutation_symmetry(load_model(ck_model), ck_n), output,
                         config);
    }
    if (*ck_identity) {
      std::vector<CanningsModel> models;
      for (const auto& path : ck_models) models.push_back(load_model(path));
      return report_exit(check_identity_limit(models), output, config);
    }
    if (*ck_meppf) {
      if (ck_table.empty() == ck_model.empty()) {
        throw std::invalid_argument("meppf needs exactly one of --model or --table");
      }
      PpfTable table = ck_table.empty()
                           ? PpfTable::from_model(load_model(ck_model), ck_depth)
                           : ppf_table_from_json(load_json(ck_table));
      return report_exit(check_meppf(table), output, config);
    }
    if (*ck_bounds) {
      return report_exit(moment_identities_check(load_model(ck_model)), output, config);
    }

    if (*sim_ancestry) {
      auto model = load_model(sim_model);
      const std::uint64_t seed = resolve_seed(sim_seed);
      SplitMix64 rng(seed);
      auto initial = parse_initial(sim_initial, sim_types, model.d());
      auto trajectory = simulate_ancestry(model, initial, sim_generations, rng);
      output.write(config, trajectory_to_json(trajectory));
      return 0;
    }

    if (*sim_coalescent) {
      if (sim_kingman.empty() == sim_xi.empty()) {
        throw std::invalid_argument("coalescent needs exactly one of --kingman or --xi");
      }
      RateTable table = sim_kingman.empty()
                            ? complete_rates_by_consistency(
                                  xi_rate_table(xi_spec_from_json(load_json(sim_xi)), sim_depth),
                                  sim_depth)
                            : kingman_rates(parse_weights(sim_kingman));
      auto initial = LabeledPartition::parse(sim_initial, table.d());
      auto generator = limit_generator(table, initial.n());
      const std::uint64_t seed = resolve_seed(sim_seed);
      SplitMix64 rng(seed);
      auto trajectory = simulate_coalescent(generator, initial, sim_tmax, rng);
      output.write(config, timed_trajectory_to_json(trajectory));
      return 0;
    }

    if (*li_kingman) {
      auto generator = limit_generator(kingman_rates(parse_weights(li_a)), li_n);
      output.write(config, generator_to_json(generator), generator_to_csv(generator));
      return 0;
    }

    if (*li_strong) {
      auto expansion = strong_mutation_expansion(li_M, li_n, li_d);
      Json result;
      result["M"] = li_M;
      result["c_N"] = to_fraction_string(expansion.c_n);
      result["P_N"] = exact_matrix_to_json(expansion.p_n);
      result["A"] = exact_matrix_to_json(expansion.a);
      result["B"] = exact_matrix_to_json(expansion.b);
      result["residual"] = expansion.residual.get_d();
      output.write(config, result);
      return 0;
    }

    if (*li_discrete) {
      auto rho = load_json(li_rho).get<std::vector<std::vector<double>>>();
      auto matrix = discrete_limit_matrix(rho, li_n);
      output.write(config, real_matrix_to_json(matrix), real_matrix_to_csv(matrix));
      return 0;
    }

    if (*ra_xi_cmd) {
      auto table = xi_rate_table(xi_spec_from_json(load_json(ra_xi)), ra_depth);
      output.write(config, rate_table_to_json(table));
      return 0;
    }

    if (*ra_complete) {
      auto spec = xi_spec_from_json(load_json(ra_xi));
      auto table = complete_rates_by_consistency(xi_rate_table(spec, ra_depth), ra_depth);
      output.write(config, rate_table_to_json(table));
      return 0;
    }

    throw std::invalid_argument("no subcommand executed");
  } catch (const IncompleteTableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& key : e.missing_keys) std::cerr << "  missing: " << key << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
