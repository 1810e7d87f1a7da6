#include "gani/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "gani/error.hpp"
#include "gani/homophily.hpp"
#include "gani/io.hpp"
#include "gani/pipeline.hpp"
#include "gani/synthetic.hpp"
#include "gani/text.hpp"

namespace gani {

namespace fs = std::filesystem;

namespace {

std::string fixed4(double value) {
  std::array<char, 32> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, 4);
  return {buf.data(), res.ptr};
}

std::vector<Victim> parse_victims(const std::vector<std::string>& names) {
  std::vector<Victim> out;
  for (const auto& name : names) {
    const Victim v = parse_victim(name);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

std::array<double, 3> parse_ratios(const std::string& text) {
  const auto fields = split_fields(text);
  if (fields.size() != 3) throw InvalidArgument("--split expects three comma-separated ratios");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    try {
      out[i] = parse_double(fields[i], "split ratio");
    } catch (const DatasetError& e) {
      throw InvalidArgument(e.what());
    }
  }
  return out;
}

struct LoadedData {
  std::string name;
  Graph graph;
  DataSplit split;
};

// Loads a dataset, restricts it to its largest connected component unless
// told otherwise, and draws the split on the resulting node set.
LoadedData load_for_run(const std::string& dataset, bool keep_all,
                        const std::array<double, 3>& ratios, std::uint64_t split_seed) {
  const fs::path manifest = resolve_dataset(dataset);
  Graph g = load_dataset(manifest);
  std::string name = read_manifest(manifest).name;
  if (!keep_all) g = largest_connected_component(g, DataSplit{}).first;
  DataSplit split = make_split(g.num_nodes(), ratios, split_seed);
  return {std::move(name), std::move(g), std::move(split)};
}

void print_accuracies(std::ostream& out, std::span<const VictimAccuracy> rows) {
  out << "victim,clean,poisoned\n";
  for (const auto& a : rows) {
    out << to_string(a.victim) << ',' << format_double(a.clean) << ','
        << format_double(a.poisoned) << '\n';
  }
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
}

}  // namespace

fs::path resolve_dataset(const std::string& spec) {
  const fs::path p(spec);
  if (fs::is_regular_file(p)) return p;
  if (fs::is_directory(p)) return p / "manifest.json";
  if (const char* root = std::getenv("GANI_DATA_DIR")) {
    const fs::path candidate = fs::path(root) / spec / "manifest.json";
    if (fs::is_regular_file(candidate)) return candidate;
  }
  throw DatasetError("dataset '" + spec + "' not found (set GANI_DATA_DIR or pass a manifest)");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Node-injection poisoning attack on graph neural networks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // attack
  auto* attack = app.add_subcommand("attack", "Run the injection attack and write its outputs");
  std::string dataset;
  std::string out_dir;
  std::string split_text = "0.1,0.1,0.8";
  std::uint64_t split_seed = 0;
  bool keep_all = false;
  bool traces = false;
  AttackConfig cfg;
  std::string label_source = "predicted";
  std::vector<std::string> victim_names = {"gcn"};
  attack->add_option("--dataset", dataset, "Manifest path, dataset directory or name")->required();
  attack->add_option("--out", out_dir, "Output directory")->required();
  attack->add_option("--ratio", cfg.injection_ratio, "Injected nodes as a fraction of n")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0))
      ->check(CLI::PositiveNumber);
  attack->add_option("--alpha", cfg.ga.candidate_rate, "Candidate selection rate")
      ->capture_default_str();
  attack->add_option("--pc", cfg.ga.crossover_rate, "Crossover probability")->capture_default_str();
  attack->add_option("--pm", cfg.ga.mutation_rate, "Mutation probability")->capture_default_str();
  attack->add_option("--pop", cfg.ga.population_size, "GA population size")->capture_default_str();
  attack->add_option("--iters", cfg.ga.max_iterations, "GA iterations")->capture_default_str();
  attack->add_option("--label-source", label_source, "predicted or ground_truth")
      ->capture_default_str()
      ->check(CLI::IsMember({"predicted", "ground_truth"}));
  attack->add_option("--seed", cfg.seed, "Attack seed")->capture_default_str();
  attack->add_option("--split", split_text, "train,val,test ratios")->capture_default_str();
  attack->add_option("--split-seed", split_seed, "Split seed")->capture_default_str();
  attack->add_option("--victims", victim_names, "Victims to retrain (gcn, sgc, jaccard_gcn)")
      ->delimiter(',')
      ->capture_default_str();
  attack->add_option("--workers", cfg.ga.workers, "Fitness evaluation threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  attack->add_flag("--no-lcc", keep_all, "Keep every node instead of the largest component");
  attack->add_flag("--traces", traces, "Write per-injection GA traces");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Retrain victims on a saved perturbed graph");
  std::string run_dir;
  std::optional<std::uint64_t> eval_seed;
  std::vector<std::string> eval_victims;
  evaluate->add_option("--run", run_dir, "Output directory of an attack run")->required();
  evaluate->add_option("--seed", eval_seed, "Attack seed (default: the run's)");
  evaluate->add_option("--victims", eval_victims, "Victims (default: the run's)")->delimiter(',');

  // report
  auto* report = app.add_subcommand("report", "Imperceptibility report of a perturbed graph");
  std::string report_graph;
  report->add_option("--graph", report_graph, "Perturbed graph manifest or directory")
      ->required();

  // homophily
  auto* homophily = app.add_subcommand("homophily", "Average node homophily");
  std::string homophily_dataset;
  bool homophily_all = false;
  homophily->add_option("--dataset", homophily_dataset, "Manifest path, directory or name")
      ->required();
  homophily->add_flag("--no-lcc", homophily_all, "Use every node instead of the largest component");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "Write a small planted-partition dataset");
  SyntheticSpec spec;
  std::string synth_out;
  std::string synth_kind = "binary";
  std::uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--nodes", spec.num_nodes)->capture_default_str();
  synth->add_option("--classes", spec.num_classes)->capture_default_str();
  synth->add_option("--features", spec.num_features)->capture_default_str();
  synth->add_option("--kind", synth_kind)
      ->capture_default_str()
      ->check(CLI::IsMember({"binary", "continuous"}));
  synth->add_option("--seed", synth_seed)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (attack->parsed()) {
      cfg.label_source = parse_label_source(label_source);
      cfg.victims = parse_victims(victim_names);
      cfg.validate();
      const auto ratios = parse_ratios(split_text);
      const LoadedData data = load_for_run(dataset, keep_all, ratios, split_seed);
      const AttackResult result = run_attack(data.graph, data.split, cfg);
      write_attack_outputs(out_dir, result, data.split, cfg, data.name, traces);
      out << "injected " << result.injections.size() << " nodes into " << data.name << " ("
          << data.graph.num_nodes() << " nodes, " << data.graph.num_edges() << " links)\n";
      print_accuracies(out, result.accuracies);
    } else if (evaluate->parsed()) {
      const fs::path dir(run_dir);
      const Graph perturbed = load_dataset(dir / "graph" / "manifest.json");
      const DataSplit split = load_split(dir / "split.json");
      std::uint64_t seed = 0;
      std::vector<std::string> names = eval_victims;
      if (fs::exists(dir / "attack.json")) {
        const auto doc = read_json_file(dir / "attack.json");
        seed = doc.value("seed", std::uint64_t{0});
        if (names.empty()) names = doc.value("victims", std::vector<std::string>{});
      }
      if (eval_seed) seed = *eval_seed;
      if (names.empty()) names = {"gcn"};
      std::vector<VictimAccuracy> rows;
      for (const Victim v : parse_victims(names)) {
        rows.push_back(
            evaluate_poisoning(perturbed, split, v, victim_train_config(v, victim_seed(seed, v))));
      }
      print_accuracies(out, rows);
    } else if (report->parsed()) {
      const Graph perturbed = load_dataset(resolve_dataset(report_graph));
      const auto r = imperceptibility_report(original_subgraph(perturbed), perturbed);
      out << "feature_range_violations," << r.feature_range_violations << '\n'
          << "injected_degree_membership," << (r.injected_degree_membership ? "true" : "false")
          << '\n'
          << "clean_mean_nonzeros," << format_double(r.features.clean_mean_nonzeros) << '\n'
          << "injected_mean_nonzeros," << format_double(r.features.injected_mean_nonzeros)
          << '\n'
          << "clean_mean_value," << format_double(r.features.clean_mean_value) << '\n'
          << "injected_mean_value," << format_double(r.features.injected_mean_value) << '\n';
    } else if (homophily->parsed()) {
      Graph g = load_dataset(resolve_dataset(homophily_dataset));
      if (!homophily_all) g = largest_connected_component(g, DataSplit{}).first;
      out << fixed4(average_homophily(g, g.labels())) << '\n';
    } else if (synth->parsed()) {
      spec.kind = parse_feature_kind(synth_kind);
      const Graph g = make_synthetic_graph(spec, synth_seed);
      save_dataset(synth_out, g, "synthetic");
      out << "wrote " << g.num_nodes() << " nodes, " << g.num_edges() << " links to "
          << synth_out << '\n';
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace gani
