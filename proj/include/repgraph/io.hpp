#pragma once

// CSV readers and writers for observations, distance matrices and sidecars.
//
// Observation rows start with the sample label (1 or 2):
//   vector:  label,x1,...,xd
//   ranking: label,o1,...,on        (o_i = object in position i)
//   network: label,a11,a12,...,ann  after a "nodes=<n>" header line
// Blank lines and lines starting with '#' are skipped. Errors carry the
// 1-based line number.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "repgraph/dataset.hpp"

namespace repgraph {

std::vector<Observation> read_observations(std::istream& in, PayloadKind kind);
void write_observations(std::ostream& out, const std::vector<Observation>& observations);

// K rows of K comma-separated numbers.
DistanceMatrix read_distance_matrix(std::istream& in, double tie_tolerance = 0.0);
void write_distance_matrix(std::ostream& out, const DistanceMatrix& d);

// One "label,value_index" row per observation (value_index 1-based).
DistinctTable read_sidecar(std::istream& in, std::size_t k);

// Per-value "value,n1,n2,m" table.
void write_distinct_table(std::ostream& out, const DistinctTable& table);

}  // namespace repgraph
