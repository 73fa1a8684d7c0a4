#include <gtest/gtest.h>

#include <set>

#include "snft/consensus.hpp"

using namespace snft;
using namespace snft::consensus;

namespace {

Digest tag(uint8_t b) {
    Digest d{};
    d[0] = b;
    return d;
}

std::vector<WorkloadItem> simple_workload(size_t n, uint64_t start_ms = 500,
                                          uint64_t spacing_ms = 200) {
    std::vector<WorkloadItem> out;
    for (size_t i = 0; i < n; ++i)
        out.push_back({start_ms + i * spacing_ms, "batch-" + std::to_string(i),
                       {tag(static_cast<uint8_t>(i))}});
    return out;
}

void expect_safe(const SimResult& res) {
    EXPECT_TRUE(check_log_matching(res));
    EXPECT_TRUE(check_election_safety(res));
    EXPECT_TRUE(check_exactly_once(res));
}

}  // namespace

TEST(RaftNode, GrantsVoteOncePerTerm) {
    NodeConfig cfg;
    RaftNode n(0, cfg);
    Rng rng(1);
    n.reset_election_deadline(0, rng);
    auto out = n.on_message(10, {1, 0, RequestVote{1, 1, 0, 0}}, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(std::get<VoteReply>(out[0].payload).granted);
    // a second candidate in the same term is refused
    out = n.on_message(11, {2, 0, RequestVote{1, 2, 0, 0}}, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_FALSE(std::get<VoteReply>(out[0].payload).granted);
}

TEST(RaftNode, RefusesStaleLogCandidate) {
    NodeConfig cfg;
    RaftNode n(0, cfg);
    Rng rng(1);
    n.force_log({{2, "a", {}}, {3, "b", {}}});
    n.force_term(3);
    auto out = n.on_message(10, {1, 0, RequestVote{4, 1, 2, 2}}, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_FALSE(std::get<VoteReply>(out[0].payload).granted);
    // an up-to-date candidate wins the vote
    out = n.on_message(11, {2, 0, RequestVote{4, 2, 2, 3}}, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(std::get<VoteReply>(out[0].payload).granted);
}

TEST(RaftNode, TruncatesConflictingSuffix) {
    NodeConfig cfg;
    RaftNode n(0, cfg);
    Rng rng(1);
    n.force_log({{1, "a", {}}, {1, "stale", {}}});
    AppendEntries ae{2, 1, 1, 1, {{2, "b", {}}}, 0};
    auto out = n.on_message(10, {1, 0, ae}, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(std::get<AppendReply>(out[0].payload).success);
    ASSERT_EQ(n.log().size(), 2u);
    EXPECT_EQ(n.log()[1].batch_id, "b");
}

TEST(RaftNode, RejectsMissingPrev) {
    NodeConfig cfg;
    RaftNode n(0, cfg);
    Rng rng(1);
    AppendEntries ae{1, 1, 3, 1, {{1, "x", {}}}, 0};
    auto out = n.on_message(10, {1, 0, ae}, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_FALSE(std::get<AppendReply>(out[0].payload).success);
}

TEST(Cluster, RejectsEvenOrTinySize) {
    EXPECT_THROW(Cluster(SimParams{.cluster_size = 2}, 1), Error);
    EXPECT_THROW(Cluster(SimParams{.cluster_size = 4}, 1), Error);
    EXPECT_THROW(Cluster(SimParams{.cluster_size = 1}, 1), Error);
}

TEST(Cluster, UnknownNodeFault) {
    Cluster c(SimParams{.cluster_size = 3}, 1);
    EXPECT_THROW(c.inject_fault({100, FaultKind::CrashNode, {7}}), Error);
}

TEST(Cluster, ElectsLeaderAndCommits) {
    const auto res = run_simulation(3, {}, simple_workload(5), 42);
    expect_safe(res);
    ASSERT_EQ(res.committed_sequence.size(), 5u);
    // commit order may differ from submit order when an early batch
    // bounces off a follower while a later one reaches the leader first
    std::set<std::string> committed;
    for (const auto& e : res.committed_sequence) committed.insert(e.batch_id);
    for (size_t i = 0; i < 5; ++i)
        EXPECT_TRUE(committed.count("batch-" + std::to_string(i))) << i;
    EXPECT_EQ(res.commit_ms.size(), 5u);
    for (const auto& [batch, t] : res.commit_ms) EXPECT_GE(t, res.submit_ms.at(batch));
}

TEST(Cluster, Deterministic) {
    const auto workload = simple_workload(4);
    const auto a = run_simulation(5, {}, workload, 7);
    const auto b = run_simulation(5, {}, workload, 7);
    EXPECT_EQ(a.trace_ndjson(), b.trace_ndjson());
    EXPECT_EQ(a.committed_sequence.size(), b.committed_sequence.size());
    const auto c = run_simulation(5, {}, workload, 8);
    EXPECT_NE(a.trace_ndjson(), c.trace_ndjson());
}

TEST(Cluster, SurvivesLeaderCrash) {
    // crash node 0..4 in turn; a 5-node cluster tolerates any single crash
    for (int victim = 0; victim < 5; ++victim) {
        std::vector<FaultEvent> faults = {{2'000, FaultKind::CrashNode, {victim}}};
        const auto res = run_simulation(5, faults, simple_workload(6, 500, 800), 100 + victim);
        expect_safe(res);
        EXPECT_EQ(res.commit_ms.size(), 6u) << "victim " << victim;
    }
}

TEST(Cluster, CrashAndRestartRecovers) {
    std::vector<FaultEvent> faults = {{1'500, FaultKind::CrashNode, {0}},
                                      {6'000, FaultKind::RestartNode, {0}}};
    const auto res = run_simulation(3, faults, simple_workload(8, 500, 1'000), 9);
    expect_safe(res);
    EXPECT_EQ(res.commit_ms.size(), 8u);
}

TEST(Cluster, MinorityPartitionHeals) {
    std::vector<FaultEvent> faults = {{1'000, FaultKind::Partition, {0}},
                                      {8'000, FaultKind::Heal, {}}};
    const auto res = run_simulation(5, faults, simple_workload(6, 500, 1'500), 17);
    expect_safe(res);
    EXPECT_EQ(res.commit_ms.size(), 6u);
}

TEST(Cluster, FullPartitionStallsThenRecovers) {
    // split all three nodes into singleton cells: no quorum until heal
    SimParams params;
    params.cluster_size = 3;
    params.duration_ms = 30'000;
    std::vector<FaultEvent> faults = {{500, FaultKind::Partition, {0}},
                                      {501, FaultKind::Partition, {1}},
                                      {10'000, FaultKind::Heal, {}}};
    const auto res = run_simulation(3, faults, simple_workload(3, 1'000, 500), 23, params);
    expect_safe(res);
    ASSERT_EQ(res.commit_ms.size(), 3u);
    for (const auto& [batch, t] : res.commit_ms) EXPECT_GT(t, 10'000u) << batch;
}

TEST(Cluster, DuplicateSubmissionCommitsOnce) {
    std::vector<WorkloadItem> workload = {{500, "dup", {tag(1)}},
                                          {700, "dup", {tag(1)}},
                                          {900, "other", {tag(2)}}};
    const auto res = run_simulation(3, {}, workload, 31);
    expect_safe(res);
    size_t dup_count = 0;
    for (const auto& e : res.committed_sequence)
        if (e.batch_id == "dup") ++dup_count;
    EXPECT_EQ(dup_count, 1u);
    EXPECT_EQ(res.commit_ms.count("other"), 1u);
}

TEST(Cluster, LossyNetworkStillCommits) {
    SimParams params;
    params.cluster_size = 3;
    params.network.drop_rate = 0.10;
    params.duration_ms = 60'000;
    const auto res = run_simulation(3, {}, simple_workload(5, 500, 2'000), 57, params);
    expect_safe(res);
    EXPECT_EQ(res.commit_ms.size(), 5u);
}

TEST(Cluster, SeedSweepSafety) {
    const auto workload = simple_workload(3, 500, 1'000);
    for (uint64_t seed = 0; seed < 25; ++seed) {
        for (int n : {3, 5}) {
            std::vector<FaultEvent> faults;
            if (seed % 3 == 1) faults.push_back({2'000, FaultKind::CrashNode, {int(seed) % n}});
            if (seed % 3 == 2) {
                faults.push_back({1'500, FaultKind::Partition, {int(seed) % n}});
                faults.push_back({7'000, FaultKind::Heal, {}});
            }
            const auto res = run_simulation(n, faults, workload, seed);
            expect_safe(res);
        }
    }
}

TEST(Cluster, FaultScriptJson) {
    const auto j = nlohmann::json::parse(R"([
        {"at_ms": 100, "kind": "crash_node", "node": 1},
        {"at_ms": 500, "kind": "partition", "nodes": [0, 2]},
        {"at_ms": 900, "kind": "heal"}
    ])");
    const auto faults = fault_script_from_json(j);
    ASSERT_EQ(faults.size(), 3u);
    EXPECT_EQ(faults[0].kind, FaultKind::CrashNode);
    EXPECT_EQ(faults[0].nodes, std::vector<int>{1});
    EXPECT_EQ(faults[1].nodes, (std::vector<int>{0, 2}));
    EXPECT_TRUE(faults[2].nodes.empty());
}
