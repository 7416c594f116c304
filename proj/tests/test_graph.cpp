#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "graph_builder.hpp"
#include "test_util.hpp"

using namespace leadwarn;

namespace {

struct Tx {
  int cp;
  int recv;
  double usd;
  double dt;
};

features::FeatureTable make_table(const std::vector<Tx>& txs) {
  features::FeatureTable t;
  for (const auto& tx : txs) {
    features::FeatureRow r;
    r.cp_code = tx.cp;
    r.recv_code = tx.recv;
    r.usd_value = tx.usd;
    r.log_usd = std::log1p(tx.usd);
    r.delta_t = tx.dt;
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("hand-checked snapshot") {
  auto t = make_table({{2, 0, 10.0, 0.0},
                       {0, 1, 20.0, 5.0},
                       {2, 0, 30.0, 7.0},
                       {1, 1, 40.0, 9.0}});
  auto s = graph::build_snapshot(t, 0, 4);

  REQUIRE(s.node_ids == std::vector<int>{0, 1, 2});
  REQUIRE(s.num_edges() == 3);
  // Edges are keyed (cp, recv) so map order is (0,1), (1,1), (2,0).
  CHECK(s.edge_list[0] == std::pair<int, int>{0, 1});
  CHECK(s.edge_list[1] == std::pair<int, int>{1, 1});
  CHECK(s.edge_list[2] == std::pair<int, int>{2, 0});
  CHECK(s.edge_feats(0, 0) == 1.0);
  CHECK(s.edge_feats(2, 0) == 2.0);  // parallel rows merged
  CHECK(s.edge_feats(2, 1) == doctest::Approx(40.0));
  CHECK(s.edge_feats(2, 2) == doctest::Approx(3.5));  // mean delta_t
  CHECK(s.edge_feats(1, 2) == doctest::Approx(9.0));

  const double l11 = std::log1p(10.0), l21 = std::log1p(20.0);
  const double l31 = std::log1p(30.0), l41 = std::log1p(40.0);
  // node 0: receives rows 0 and 2, sends row 1.
  CHECK(s.node_feats(0, 0) == 1.0);  // in_deg over merged edges
  CHECK(s.node_feats(0, 1) == 1.0);
  CHECK(s.node_feats(0, 2) == doctest::Approx(40.0));
  CHECK(s.node_feats(0, 3) == doctest::Approx(20.0));
  CHECK(s.node_feats(0, 4) == 3.0);
  CHECK(s.node_feats(0, 5) == doctest::Approx((l11 + l31 + l21) / 3.0));
  // node 1: self-loop row counts once in tx_count.
  CHECK(s.node_feats(1, 0) == 2.0);
  CHECK(s.node_feats(1, 1) == 1.0);
  CHECK(s.node_feats(1, 2) == doctest::Approx(60.0));
  CHECK(s.node_feats(1, 3) == doctest::Approx(40.0));
  CHECK(s.node_feats(1, 4) == 2.0);
  CHECK(s.node_feats(1, 5) == doctest::Approx((l21 + l41) / 2.0));
  // node 2: pure sender.
  CHECK(s.node_feats(2, 0) == 0.0);
  CHECK(s.node_feats(2, 1) == 1.0);
  CHECK(s.node_feats(2, 2) == 0.0);
  CHECK(s.node_feats(2, 3) == doctest::Approx(40.0));
  CHECK(s.node_feats(2, 4) == 2.0);
  CHECK(s.node_feats(2, 5) == doctest::Approx((l11 + l31) / 2.0));
}

TEST_CASE("usd and transaction counts are conserved") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> code(0, 9);
  std::uniform_real_distribution<double> usd(0.5, 500.0);
  std::vector<Tx> txs;
  double usd_total = 0.0;
  for (int i = 0; i < 200; ++i) {
    Tx tx{code(rng), code(rng), usd(rng), 1.0};
    usd_total += tx.usd;
    txs.push_back(tx);
  }
  auto t = make_table(txs);
  auto s = graph::build_snapshot(t, 0, txs.size());
  CHECK(s.node_feats.col(2).sum() == doctest::Approx(usd_total));
  CHECK(s.node_feats.col(3).sum() == doctest::Approx(usd_total));
  CHECK(s.edge_feats.col(1).sum() == doctest::Approx(usd_total));
  CHECK(s.edge_feats.col(0).sum() == doctest::Approx(200.0));
}

TEST_CASE("opposite directions stay distinct edges") {
  auto t = make_table({{0, 1, 5.0, 1.0}, {1, 0, 7.0, 2.0}});
  auto s = graph::build_snapshot(t, 0, 2);
  CHECK(s.num_edges() == 2);
}

TEST_CASE("node relabeling permutes the snapshot consistently") {
  std::vector<Tx> base = {{3, 1, 12.0, 2.0}, {1, 7, 8.0, 4.0},
                          {7, 3, 30.0, 1.0}, {3, 3, 9.0, 6.0},
                          {1, 7, 2.0, 3.0}};
  std::map<int, int> relabel = {{1, 20}, {3, 5}, {7, 11}};
  std::vector<Tx> renamed = base;
  for (auto& tx : renamed) {
    tx.cp = relabel.at(tx.cp);
    tx.recv = relabel.at(tx.recv);
  }
  auto ta = make_table(base);
  auto tb = make_table(renamed);
  auto sa = graph::build_snapshot(ta, 0, base.size());
  auto sb = graph::build_snapshot(tb, 0, renamed.size());
  REQUIRE(sa.num_nodes() == sb.num_nodes());

  std::map<int, Eigen::Index> idx_b;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sb.num_nodes()); ++i)
    idx_b[sb.node_ids[static_cast<std::size_t>(i)]] = i;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sa.num_nodes()); ++i) {
    const int code_a = sa.node_ids[static_cast<std::size_t>(i)];
    const Eigen::Index j = idx_b.at(relabel.at(code_a));
    CHECK((sa.node_feats.row(i) - sb.node_feats.row(j)).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0));
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(sa.num_nodes());
         ++k) {
      const int code_k = sa.node_ids[static_cast<std::size_t>(k)];
      const Eigen::Index l = idx_b.at(relabel.at(code_k));
      CHECK(sa.adjacency_norm(i, k) ==
            doctest::Approx(sb.adjacency_norm(j, l)));
    }
  }
}

TEST_CASE("windowed ranges see only their rows") {
  auto t = make_table({{0, 1, 5.0, 1.0},
                       {2, 3, 7.0, 2.0},
                       {4, 5, 9.0, 3.0},
                       {6, 7, 11.0, 4.0}});
  auto s = graph::build_snapshot(t, 1, 2);
  CHECK(s.node_ids == std::vector<int>{2, 3, 4, 5});
  CHECK(s.num_edges() == 2);
}

TEST_CASE("normalized adjacency matches the closed form") {
  // 0-1, 1-2, node 3 isolated.
  auto a = graph::normalize_adjacency(4, {{0, 1}, {1, 2}});
  REQUIRE(a.rows() == 4);
  CHECK(a(0, 0) == doctest::Approx(0.5));
  CHECK(a(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(a(1, 0) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(a(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(a(1, 2) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(a(2, 2) == doctest::Approx(0.5));
  CHECK(a(0, 2) == doctest::Approx(0.0));
  // Isolated node reduces to an identity row.
  for (int k = 0; k < 4; ++k)
    CHECK(a(3, k) == doctest::Approx(k == 3 ? 1.0 : 0.0));
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("direction does not affect the symmetrized adjacency") {
  auto a = graph::normalize_adjacency(3, {{0, 1}, {1, 2}});
  auto b = graph::normalize_adjacency(3, {{1, 0}, {2, 1}, {1, 2}});
  CHECK((a - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("empty or out-of-range windows are rejected") {
  auto t = make_table({{0, 1, 5.0, 1.0}, {1, 2, 6.0, 2.0}});
  for (auto [start, len] : std::vector<std::pair<std::size_t, std::size_t>>{
           {0, 0}, {2, 1}, {1, 2}, {5, 3}}) {
    auto code = testing::thrown_code(
        [&, s = start, l = len] { graph::build_snapshot(t, s, l); });
    REQUIRE(code.has_value());
    CHECK(*code == ErrorCode::empty_window);
  }
}

TEST_CASE("snapshot json carries all sections") {
  auto t = make_table({{0, 1, 5.0, 1.0}});
  auto s = graph::build_snapshot(t, 0, 1);
  auto j = graph::snapshot_json(s);
  for (const char* key :
       {"node_ids", "node_feats", "edge_list", "edge_feats"})
    CHECK(j.find(key) != std::string::npos);
}
