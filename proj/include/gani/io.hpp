#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gani/graph.hpp"
#include "gani/pipeline.hpp"

namespace gani {

// JSON manifest describing a dataset on disk. File paths are relative to the
// manifest's directory.
struct DatasetManifest {
  std::string name;
  std::size_t num_nodes = 0;
  std::size_t num_features = 0;
  std::size_t num_classes = 0;
  FeatureKind feature_kind = FeatureKind::binary;
  std::filesystem::path edges = "edges.csv";
  std::filesystem::path features = "features.csv";
  std::filesystem::path labels = "labels.csv";
  // Set for perturbed graphs; nodes past this count are injected.
  std::optional<std::size_t> num_original_nodes;
};

std::string to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view name);

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);

// Reads the manifest and its three CSVs:
//   edges.csv     "u,v" with u < v, one row per undirected edge
//   features.csv  "node,index,value", non-zero entries only
//   labels.csv    "label", one row per node in id order
Graph load_dataset(const std::filesystem::path& manifest_path);

// Writes manifest.json plus the three CSVs into `dir` (created if needed).
void save_dataset(const std::filesystem::path& dir, const Graph& g, const std::string& name);

// Seeded uniform shuffle of 0..n-1 cut into train/val/test. Train and val get
// floor(ratio * n); test takes the rest. Each part is sorted.
DataSplit make_split(std::size_t num_nodes, const std::array<double, 3>& ratios,
                     std::uint64_t seed);

void save_split(const std::filesystem::path& path, const DataSplit& split);
DataSplit load_split(const std::filesystem::path& path);

// Everything an attack run leaves on disk:
//   graph/                 perturbed graph in the dataset format
//   split.json             split the attack and victims used
//   injections.json        per injected node: id, label, endpoints, features
//   accuracy.csv           victim,clean,poisoned
//   report.json            imperceptibility summary
//   attack.json            settings needed to rerun or re-evaluate
//   degree_histogram.csv   degree,clean,perturbed
//   traces/injection_<i>.csv  GA traces, when write_traces is set
void write_attack_outputs(const std::filesystem::path& dir, const AttackResult& result,
                          const DataSplit& split, const AttackConfig& cfg,
                          const std::string& dataset_name, bool write_traces);

void write_accuracy_csv(const std::filesystem::path& path,
                        std::span<const VictimAccuracy> accuracies);
void write_report(const std::filesystem::path& json_path,
                  const std::filesystem::path& histogram_path,
                  const ImperceptibilityReport& report);

}  // namespace gani
