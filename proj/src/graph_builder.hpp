#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "features.hpp"

namespace leadwarn::graph {

inline constexpr int kNodeFeatureDim = 6;
inline constexpr int kEdgeFeatureDim = 3;

// Per-window directed transaction graph. Nodes are address codes sorted
// ascending; edges run counterparty -> receiving with parallel rows merged.
struct GraphSnapshot {
  std::vector<int> node_ids;
  // columns: in_deg, out_deg, usd_in, usd_out, tx_count, mean_log_usd
  Eigen::MatrixXd node_feats;
  std::vector<std::pair<int, int>> edge_list;  // (src_idx, dst_idx)
  // columns: tx count, summed USD, mean delta_t
  Eigen::MatrixXd edge_feats;
  Eigen::MatrixXd adjacency_norm;

  std::size_t num_nodes() const { return node_ids.size(); }
  std::size_t num_edges() const { return edge_list.size(); }
};

// Builds the snapshot over rows [start, start+len). Throws EmptyWindow when
// the range is empty or out of bounds.
GraphSnapshot build_snapshot(const features::FeatureTable& table,
                             std::size_t start, std::size_t len);

// D̃^{-1/2}(A_sym + I)D̃^{-1/2} over the presence-OR symmetrized adjacency.
// Isolated nodes reduce to identity rows.
Eigen::MatrixXd normalize_adjacency(std::size_t n_nodes,
                                    const std::vector<std::pair<int, int>>& edges);

// Debug dump: node list, edge list, and both feature matrices.
std::string snapshot_json(const GraphSnapshot& snap);

}  // namespace leadwarn::graph
