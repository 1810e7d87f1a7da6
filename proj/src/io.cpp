#include "gani/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gani/error.hpp"
#include "gani/random.hpp"
#include "gani/text.hpp"

namespace gani {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("io", "failed writing " + path.string());
}

// Reads a CSV file, checks its header row and hands each data row's fields to
// `fn` along with the 1-based line number.
template <typename Fn>
void read_csv(const fs::path& path, std::string_view header, std::size_t width, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next() || line != header) {
    throw DatasetError(path.string() + ": expected header '" + std::string(header) + "'");
  }
  while (next()) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw DatasetError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(width) + " fields");
    }
    fn(fields, line_no);
  }
}

std::string where(const fs::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

std::vector<NodeId> node_list(const json& doc, const char* key, const fs::path& path) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw DatasetError(path.string() + ": missing array '" + key + "'");
  }
  std::vector<NodeId> out;
  for (const auto& v : doc[key]) {
    if (!v.is_number_unsigned()) {
      throw DatasetError(path.string() + ": '" + key + "' holds a non-index value");
    }
    out.push_back(v.get<NodeId>());
  }
  return out;
}

}  // namespace

std::string to_string(FeatureKind kind) {
  return kind == FeatureKind::binary ? "binary" : "continuous";
}

FeatureKind parse_feature_kind(std::string_view name) {
  if (name == "binary") return FeatureKind::binary;
  if (name == "continuous") return FeatureKind::continuous;
  throw DatasetError("unknown feature kind '" + std::string(name) + "'");
}

DatasetManifest read_manifest(const fs::path& manifest_path) {
  const json doc = read_json(manifest_path);
  DatasetManifest m;
  try {
    m.name = doc.at("name").get<std::string>();
    m.num_nodes = doc.at("num_nodes").get<std::size_t>();
    m.num_features = doc.at("num_features").get<std::size_t>();
    m.num_classes = doc.at("num_classes").get<std::size_t>();
    m.feature_kind = parse_feature_kind(doc.at("feature_kind").get<std::string>());
    const auto dir = manifest_path.parent_path();
    m.edges = dir / doc.at("edges").get<std::string>();
    m.features = dir / doc.at("features").get<std::string>();
    m.labels = dir / doc.at("labels").get<std::string>();
    if (doc.contains("num_original_nodes")) {
      m.num_original_nodes = doc["num_original_nodes"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw DatasetError(manifest_path.string() + ": " + e.what());
  }
  if (m.num_nodes == 0 || m.num_features == 0 || m.num_classes == 0) {
    throw DatasetError(manifest_path.string() + ": dimensions must be positive");
  }
  if (m.num_original_nodes && *m.num_original_nodes > m.num_nodes) {
    throw DatasetError(manifest_path.string() + ": num_original_nodes exceeds num_nodes");
  }
  for (const auto* p : {&m.edges, &m.features, &m.labels}) {
    if (!fs::exists(*p)) throw DatasetError("missing dataset file " + p->string());
  }
  return m;
}

Graph load_dataset(const fs::path& manifest_path) {
  const DatasetManifest m = read_manifest(manifest_path);
  const std::size_t n = m.num_nodes;

  std::vector<std::pair<NodeId, NodeId>> edges;
  std::set<std::pair<NodeId, NodeId>> seen;
  read_csv(m.edges, "u,v", 2, [&](const auto& f, std::size_t line_no) {
    auto u = parse_unsigned(f[0], "edge endpoint");
    auto v = parse_unsigned(f[1], "edge endpoint");
    if (u >= n || v >= n) throw DatasetError(where(m.edges, line_no) + ": node out of range");
    if (u == v) throw DatasetError(where(m.edges, line_no) + ": self-loop");
    if (u > v) std::swap(u, v);
    if (!seen.emplace(u, v).second) {
      throw DatasetError(where(m.edges, line_no) + ": duplicate edge");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  });

  Matrix x(n, m.num_features);
  std::vector<char> filled(n * m.num_features, 0);
  read_csv(m.features, "node,index,value", 3, [&](const auto& f, std::size_t line_no) {
    const auto v = parse_unsigned(f[0], "feature node");
    const auto j = parse_unsigned(f[1], "feature index");
    const double value = parse_double(f[2], "feature value");
    if (v >= n || j >= m.num_features) {
      throw DatasetError(where(m.features, line_no) + ": feature position out of range");
    }
    if (!std::isfinite(value) || value < 0.0) {
      throw DatasetError(where(m.features, line_no) + ": negative or non-finite feature");
    }
    char& slot = filled[v * m.num_features + j];
    if (slot) throw DatasetError(where(m.features, line_no) + ": duplicate feature entry");
    slot = 1;
    x(v, j) = value;
  });

  std::vector<ClassId> labels;
  labels.reserve(n);
  read_csv(m.labels, "label", 1, [&](const auto& f, std::size_t line_no) {
    const auto c = parse_signed(f[0], "label");
    if (c < 0 || static_cast<std::size_t>(c) >= m.num_classes) {
      throw DatasetError(where(m.labels, line_no) + ": label out of range");
    }
    labels.push_back(static_cast<ClassId>(c));
  });
  if (labels.size() != n) {
    throw DatasetError(m.labels.string() + ": " + std::to_string(labels.size()) +
                       " labels for " + std::to_string(n) + " nodes");
  }
  const std::size_t n_orig = m.num_original_nodes.value_or(n);
  std::vector<char> present(m.num_classes, 0);
  for (std::size_t v = 0; v < n_orig; ++v) present[static_cast<std::size_t>(labels[v])] = 1;
  if (std::count(present.begin(), present.end(), 0) != 0) {
    throw DatasetError(m.labels.string() + ": labels are not contiguous in [0, " +
                       std::to_string(m.num_classes) + ")");
  }

  try {
    return Graph::from_edges(n, edges, std::move(x), std::move(labels), m.num_classes,
                             m.feature_kind, n_orig);
  } catch (const InvalidArgument& e) {
    throw DatasetError(manifest_path.string() + ": " + e.what());
  }
}

void save_dataset(const fs::path& dir, const Graph& g, const std::string& name) {
  fs::create_directories(dir);
  json manifest = {
      {"name", name},
      {"num_nodes", g.num_nodes()},
      {"num_features", g.num_features()},
      {"num_classes", g.num_classes()},
      {"feature_kind", to_string(g.feature_kind())},
      {"edges", "edges.csv"},
      {"features", "features.csv"},
      {"labels", "labels.csv"},
  };
  if (g.num_original_nodes() != g.num_nodes()) {
    manifest["num_original_nodes"] = g.num_original_nodes();
  }
  write_json(dir / "manifest.json", manifest);

  {
    const auto path = dir / "edges.csv";
    auto out = open_out(path);
    out << "u,v\n";
    for (const auto& [u, v] : g.edge_list()) out << u << ',' << v << '\n';
    finish(out, path);
  }
  {
    const auto path = dir / "features.csv";
    auto out = open_out(path);
    out << "node,index,value\n";
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const auto row = g.feature_row(v);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] != 0.0) out << v << ',' << j << ',' << format_double(row[j]) << '\n';
      }
    }
    finish(out, path);
  }
  {
    const auto path = dir / "labels.csv";
    auto out = open_out(path);
    out << "label\n";
    for (const ClassId c : g.labels()) out << c << '\n';
    finish(out, path);
  }
}

DataSplit make_split(std::size_t num_nodes, const std::array<double, 3>& ratios,
                     std::uint64_t seed) {
  double total = 0.0;
  for (const double r : ratios) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("split ratios must be >= 0");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("split ratios must sum to 1");

  std::vector<NodeId> order(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) order[i] = static_cast<NodeId>(i);
  Rng rng = make_rng(seed);
  shuffle(std::span<NodeId>(order), rng);

  const auto n = static_cast<double>(num_nodes);
  const auto n_train = static_cast<std::size_t>(std::floor(ratios[0] * n));
  const auto n_val = std::min(num_nodes - n_train,
                              static_cast<std::size_t>(std::floor(ratios[1] * n)));
  DataSplit split;
  const auto b = order.begin();
  split.train.assign(b, b + static_cast<std::ptrdiff_t>(n_train));
  split.val.assign(b + static_cast<std::ptrdiff_t>(n_train),
                   b + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(b + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  for (auto* part : {&split.train, &split.val, &split.test}) {
    std::sort(part->begin(), part->end());
  }
  return split;
}

void save_split(const fs::path& path, const DataSplit& split) {
  write_json(path, json{{"train", split.train}, {"val", split.val}, {"test", split.test}});
}

DataSplit load_split(const fs::path& path) {
  const json doc = read_json(path);
  return {node_list(doc, "train", path), node_list(doc, "val", path),
          node_list(doc, "test", path)};
}

void write_accuracy_csv(const fs::path& path, std::span<const VictimAccuracy> accuracies) {
  auto out = open_out(path);
  out << "victim,clean,poisoned\n";
  for (const auto& a : accuracies) {
    out << to_string(a.victim) << ',' << format_double(a.clean) << ','
        << format_double(a.poisoned) << '\n';
  }
  finish(out, path);
}

void write_report(const fs::path& json_path, const fs::path& histogram_path,
                  const ImperceptibilityReport& report) {
  const auto& f = report.features;
  write_json(json_path,
             json{{"feature_range_violations", report.feature_range_violations},
                  {"injected_degree_membership", report.injected_degree_membership},
                  {"clean_mean_nonzeros", format_double(f.clean_mean_nonzeros)},
                  {"injected_mean_nonzeros", format_double(f.injected_mean_nonzeros)},
                  {"clean_mean_value", format_double(f.clean_mean_value)},
                  {"injected_mean_value", format_double(f.injected_mean_value)}});

  std::set<std::size_t> degrees;
  for (const auto& [deg, count] : report.clean_degree_histogram) degrees.insert(deg);
  for (const auto& [deg, count] : report.perturbed_degree_histogram) degrees.insert(deg);
  auto lookup = [](const std::map<std::size_t, std::size_t>& h, std::size_t deg) {
    const auto it = h.find(deg);
    return it == h.end() ? std::size_t{0} : it->second;
  };
  auto out = open_out(histogram_path);
  out << "degree,clean,perturbed\n";
  for (const std::size_t deg : degrees) {
    out << deg << ',' << lookup(report.clean_degree_histogram, deg) << ','
        << lookup(report.perturbed_degree_histogram, deg) << '\n';
  }
  finish(out, histogram_path);
}

void write_attack_outputs(const fs::path& dir, const AttackResult& result,
                          const DataSplit& split, const AttackConfig& cfg,
                          const std::string& dataset_name, bool write_traces) {
  fs::create_directories(dir);
  save_dataset(dir / "graph", result.perturbed_graph, dataset_name + "-perturbed");
  save_split(dir / "split.json", split);

  json injections = json::array();
  for (std::size_t i = 0; i < result.injections.size(); ++i) {
    const auto& rec = result.injections[i];
    json indices = json::array();
    json values = json::array();
    for (std::size_t j = 0; j < rec.feature_row.size(); ++j) {
      if (rec.feature_row[j] == 0.0) continue;
      indices.push_back(j);
      values.push_back(format_double(rec.feature_row[j]));
    }
    injections.push_back({{"id", rec.injected_id},
                          {"label", rec.assigned_label},
                          {"endpoints", rec.neighbors},
                          {"link_budget", result.budget.link_budgets[i]},
                          {"feature_indices", indices},
                          {"feature_values", values},
                          {"feature_shortfall", result.feature_shortfalls[i]}});
  }
  write_json(dir / "injections.json", json{{"feature_budget", result.budget.feature_budget},
                                           {"injections", injections}});

  write_accuracy_csv(dir / "accuracy.csv", result.accuracies);
  write_report(dir / "report.json", dir / "degree_histogram.csv", result.report);

  json victims = json::array();
  for (const Victim v : cfg.victims) victims.push_back(to_string(v));
  write_json(dir / "attack.json",
             json{{"dataset", dataset_name},
                  {"seed", cfg.seed},
                  {"injection_ratio", format_double(cfg.injection_ratio)},
                  {"injected_nodes", result.injections.size()},
                  {"label_source", to_string(cfg.label_source)},
                  {"alpha", format_double(cfg.ga.candidate_rate)},
                  {"crossover_rate", format_double(cfg.ga.crossover_rate)},
                  {"mutation_rate", format_double(cfg.ga.mutation_rate)},
                  {"population", cfg.ga.population_size},
                  {"iterations", cfg.ga.max_iterations},
                  {"victims", victims}});

  if (write_traces) {
    fs::create_directories(dir / "traces");
    for (std::size_t i = 0; i < result.ga_traces.size(); ++i) {
      write_trace_csv(dir / "traces" / ("injection_" + std::to_string(i) + ".csv"),
                      result.ga_traces[i]);
    }
  }
}

}  // namespace gani
