#pragma once

#include <span>

#include "gani/graph.hpp"

namespace gani {

// Fraction of v's neighbors whose label equals labels[v]. Throws for an
// isolated node, whose homophily is undefined.
double node_homophily(const Graph& g, std::span<const ClassId> labels, NodeId v);

// Mean node homophily over nodes with at least one neighbor; 0 if none has.
double average_homophily(const Graph& g, std::span<const ClassId> labels);

// Drop in v's homophily when one extra neighbor labelled `injected_label` is
// attached. An isolated node contributes 0.
double dnh(const Graph& g, std::span<const ClassId> labels, NodeId v,
           ClassId injected_label);

// Sum of dnh over distinct endpoints.
double tdnh(const Graph& g, std::span<const ClassId> labels,
            std::span<const NodeId> endpoints, ClassId injected_label);

}  // namespace gani
