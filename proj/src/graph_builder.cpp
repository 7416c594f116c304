#include "graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errors.hpp"
#include "json.hpp"

namespace leadwarn::graph {

namespace {

struct EdgeAccum {
  std::int64_t count = 0;
  double usd_sum = 0.0;
  double dt_sum = 0.0;
};

struct NodeAccum {
  std::int64_t in_deg = 0;
  std::int64_t out_deg = 0;
  double usd_in = 0.0;
  double usd_out = 0.0;
  std::int64_t tx_count = 0;
  double log_usd_sum = 0.0;
};

}  // namespace

GraphSnapshot build_snapshot(const features::FeatureTable& table,
                             std::size_t start, std::size_t len) {
  const std::size_t n = table.rows.size();
  if (len == 0 || start >= n || start + len > n)
    throw Error(ErrorCode::empty_window,
                "window [" + std::to_string(start) + ", " +
                    std::to_string(start + len) + ") does not cover rows");

  std::map<int, NodeAccum> nodes;
  std::map<std::pair<int, int>, EdgeAccum> edges;
  for (std::size_t i = start; i < start + len; ++i) {
    const auto& row = table.rows[i];
    const int recv = row.recv_code;
    const int cp = row.cp_code;
    auto& e = edges[{cp, recv}];
    e.count += 1;
    e.usd_sum += row.usd_value;
    e.dt_sum += row.delta_t;

    auto& dst = nodes[recv];
    dst.usd_in += row.usd_value;
    dst.tx_count += 1;
    dst.log_usd_sum += row.log_usd;
    auto& src = nodes[cp];
    src.usd_out += row.usd_value;
    if (cp != recv) {
      src.tx_count += 1;
      src.log_usd_sum += row.log_usd;
    }
  }

  GraphSnapshot snap;
  snap.node_ids.reserve(nodes.size());
  for (const auto& [code, acc] : nodes) snap.node_ids.push_back(code);

  std::map<int, int> code_to_idx;
  for (std::size_t i = 0; i < snap.node_ids.size(); ++i)
    code_to_idx[snap.node_ids[i]] = static_cast<int>(i);

  snap.edge_list.reserve(edges.size());
  snap.edge_feats.resize(static_cast<Eigen::Index>(edges.size()),
                         kEdgeFeatureDim);
  Eigen::Index ei = 0;
  for (const auto& [key, acc] : edges) {
    const int src = code_to_idx.at(key.first);
    const int dst = code_to_idx.at(key.second);
    snap.edge_list.emplace_back(src, dst);
    snap.edge_feats(ei, 0) = static_cast<double>(acc.count);
    snap.edge_feats(ei, 1) = acc.usd_sum;
    snap.edge_feats(ei, 2) = acc.dt_sum / static_cast<double>(acc.count);
    ++ei;
    nodes[key.second].in_deg += 1;
    nodes[key.first].out_deg += 1;
  }

  snap.node_feats.resize(static_cast<Eigen::Index>(nodes.size()),
                         kNodeFeatureDim);
  Eigen::Index ni = 0;
  for (const auto& [code, acc] : nodes) {
    snap.node_feats(ni, 0) = static_cast<double>(acc.in_deg);
    snap.node_feats(ni, 1) = static_cast<double>(acc.out_deg);
    snap.node_feats(ni, 2) = acc.usd_in;
    snap.node_feats(ni, 3) = acc.usd_out;
    snap.node_feats(ni, 4) = static_cast<double>(acc.tx_count);
    snap.node_feats(ni, 5) =
        acc.tx_count > 0 ? acc.log_usd_sum / static_cast<double>(acc.tx_count)
                         : 0.0;
    ++ni;
  }

  snap.adjacency_norm = normalize_adjacency(snap.node_ids.size(), snap.edge_list);
  return snap;
}

Eigen::MatrixXd normalize_adjacency(
    std::size_t n_nodes, const std::vector<std::pair<int, int>>& edges) {
  const auto n = static_cast<Eigen::Index>(n_nodes);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [src, dst] : edges) {
    a(src, dst) = 1.0;
    a(dst, src) = 1.0;
  }
  a.diagonal().array() += 1.0;  // self-loops
  Eigen::VectorXd deg = a.rowwise().sum();
  Eigen::VectorXd inv_sqrt = deg.array().rsqrt();
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

std::string snapshot_json(const GraphSnapshot& snap) {
  nlohmann::json j;
  j["node_ids"] = snap.node_ids;
  auto mat = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["node_feats"] = mat(snap.node_feats);
  nlohmann::json el = nlohmann::json::array();
  for (const auto& [s, d] : snap.edge_list) el.push_back({s, d});
  j["edge_list"] = std::move(el);
  j["edge_feats"] = mat(snap.edge_feats);
  return j.dump(2);
}

}  // namespace leadwarn::graph
