#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "snft/bench.hpp"
#include "snft/sim.hpp"
#include "test_support.hpp"

// Acceptance gate: one test per criterion, one PASS/FAIL line each.
// Each criterion is checked against an oracle independent of the code
// under test (restated matrices, recomputed combinatorics, file diffs).

using namespace snft;
namespace fs = std::filesystem;

namespace {

class Acceptance : public ::testing::Test {
protected:
    void SetUp() override { start_ = std::chrono::steady_clock::now(); }
    void TearDown() override {
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
        printf("[criterion %d] %s: %s (%lld ms)\n", index_, label_.c_str(),
               HasFailure() ? "FAIL" : "PASS", static_cast<long long>(ms));
        fflush(stdout);
    }
    void criterion(int index, std::string label) {
        index_ = index;
        label_ = std::move(label);
    }

private:
    std::chrono::steady_clock::time_point start_;
    int index_ = 0;
    std::string label_;
};

RouteScenario demo_scenario(const std::string& sid = "shp-demo") {
    RouteScenario sc;
    sc.shipment_id = sid;
    // distinctive coordinates double as leak-scan needles
    sc.waypoints = {{35.4271, 129.3163, 0},
                    {35.8642, 129.7415, 600'000},
                    {36.2913, 130.1587, 1'200'000}};
    sc.cadences_ms = RouteScenario::default_cadences();
    sc.baselines = RouteScenario::default_baselines();
    return sc;
}

SimulationConfig demo_config() {
    SimulationConfig cfg;
    cfg.seed = 42;
    cfg.scenarios = {demo_scenario()};
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    EXPECT_TRUE(f.good()) << p;
    return std::string(std::istreambuf_iterator<char>(f), {});
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("snft-accept-" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<SupervisoryRecord> synth_records(uint64_t seed, size_t shipments) {
    Rng rng(seed);
    std::vector<SupervisoryRecord> recs;
    for (size_t s = 0; s < shipments; ++s) {
        const std::string sid = "shp-" + std::to_string(s);
        const uint64_t base = 10'000 + s * 1'000;
        size_t n = 0;
        auto add = [&](const std::string& kind, std::optional<Severity> sev, bool on_time,
                       uint64_t t) {
            recs.push_back({sid + "/r" + std::to_string(n++), sid, kind, sev, t, on_time});
        };
        add("handover", std::nullopt, true, base);
        if (rng.bernoulli(0.5)) add("alert", Severity::Warning, true, base + 100);
        if (rng.bernoulli(0.2)) add("alert", Severity::Critical, true, base + 200);
        add("delivery", std::nullopt, rng.bernoulli(0.8), base + 500);
    }
    return recs;
}

// n-choose-k over a Pascal triangle in 128-bit arithmetic; kept free of
// the library's numerics so criterion 5 has an independent oracle.
long double binomial_ratio_oracle(int n, int v, int k) {
    std::vector<std::vector<unsigned __int128>> c(n + 1);
    for (int i = 0; i <= n; ++i) {
        c[i].assign(i + 1, 1);
        for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    return 1.0L - static_cast<long double>(c[n - v][k]) / static_cast<long double>(c[n][k]);
}

}  // namespace

TEST_F(Acceptance, C1_AccessControlFidelity) {
    criterion(1, "access-control fidelity 1.0 over grid + 1000 random cases");
    SimWorld world = default_world();
    const auto res = access_battery(AccessPolicy::default_policy(), world.registry,
                                           /*seed=*/2024, /*random_cases=*/1000);
    EXPECT_FALSE(res.vacuous);
    for (const auto& m : res.mismatches) ADD_FAILURE() << "mismatch at " << m.cell;
    EXPECT_DOUBLE_EQ(res.rejection_rate(), 1.0);
    EXPECT_DOUBLE_EQ(res.grant_rate(), 1.0);
    EXPECT_GT(res.denials_expected, 0u);
    EXPECT_GT(res.grants_expected, 0u);
}

TEST_F(Acceptance, C2_TamperDetection) {
    criterion(2, "500 mutations on a 100+ block ledger, detection rate 1.0");
    auto c = testsupport::make_consortium();
    LedgerStore store;
    Rng rng(11);
    uint64_t t = 0;
    for (size_t h = 0; h < 110; ++h) {
        std::vector<Transaction> txs;
        for (size_t i = 0; i < 3; ++i) {
            t += 100;
            const LayerTag layer =
                rng.bernoulli(0.4) ? LayerTag::Operational : LayerTag::Supervisory;
            txs.push_back(testsupport::make_tx(c, "carrier", TxType::SensorBatch, layer,
                                               "p-" + std::to_string(h * 3 + i), t));
        }
        testsupport::append(store, c, std::move(txs), t);
    }
    ASSERT_GE(store.blocks().size(), 100u);
    const auto res = tamper_battery(store, c.registry, c.node_keys, 500, 77);
    EXPECT_EQ(res.attempted, 500u);
    EXPECT_EQ(res.detected, res.attempted);
    EXPECT_DOUBLE_EQ(res.detection_rate(), 1.0);
}

TEST_F(Acceptance, C3_PublicTraceability) {
    criterion(3, "honest aggregates all verify, 200 single mutations all fail");
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const auto recs = synth_records(seed, 4);
        const auto agg = aggregate_public(0, 100'000, recs, 100'000);
        EXPECT_TRUE(verify_public_trace(agg, recs)) << "honest seed " << seed;
    }

    const auto recs = synth_records(99, 6);
    const auto agg = aggregate_public(0, 100'000, recs, 100'000);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        auto dirty = recs;
        auto dagg = agg;
        const size_t at = rng.uniform_u64(dirty.size());
        switch (i % 8) {
            case 0: dirty[at].record_id += "x"; break;
            case 1: dirty[at].shipment_id += "x"; break;
            case 2: dirty[at].kind += "x"; break;
            case 3: dirty[at].sim_time_ms += 1; break;
            case 4: dirty.erase(dirty.begin() + at); break;
            case 5: dirty.push_back(dirty[at]); dirty.back().record_id += "-dup"; break;
            case 6: dagg.shipment_count += 1; break;
            case 7: dagg.supervisory_link_digest[i % 32] ^= 0x01; break;
        }
        EXPECT_FALSE(verify_public_trace(dagg, dirty)) << "mutation case " << i;
    }
}

TEST_F(Acceptance, C4_ConsensusSafetyAndAvailability) {
    criterion(4, "1000 fault scenarios with zero safety violations; f=1 availability > 0");
    using namespace snft::consensus;
    std::vector<WorkloadItem> workload;
    for (int i = 0; i < 3; ++i)
        workload.push_back({100 + 500u * i, "b-" + std::to_string(i),
                            {crypto::sha256(to_bytes("tx-" + std::to_string(i)))}});
    SimParams params;
    params.duration_ms = 15'000;
    params.stop_when_workload_committed = true;

    for (uint64_t seed = 0; seed < 500; ++seed) {
        for (int n : {3, 5}) {
            Rng frng(seed * 2 + (n == 5));
            std::vector<FaultEvent> faults;
            const uint64_t at = 100 + frng.uniform_u64(2'000);
            switch (seed % 4) {
                case 0:
                    faults.push_back({at, FaultKind::CrashNode,
                                      {static_cast<int>(frng.uniform_u64(n))}});
                    break;
                case 1: {
                    const int victim = static_cast<int>(frng.uniform_u64(n));
                    faults.push_back({at, FaultKind::CrashNode, {victim}});
                    faults.push_back({at + 3'000, FaultKind::RestartNode, {victim}});
                    break;
                }
                case 2: {
                    std::vector<int> isolated = {static_cast<int>(frng.uniform_u64(n))};
                    if (n == 5) isolated.push_back((isolated[0] + 1) % n);
                    faults.push_back({at, FaultKind::Partition, isolated});
                    faults.push_back({at + 4'000, FaultKind::Heal, {}});
                    break;
                }
                case 3:
                    if (n == 5) {
                        const int a = static_cast<int>(frng.uniform_u64(n));
                        faults.push_back({at, FaultKind::CrashNode, {a}});
                        faults.push_back({at + 500, FaultKind::CrashNode, {(a + 2) % n}});
                    } else {
                        faults.push_back({at, FaultKind::CrashNode,
                                          {static_cast<int>(frng.uniform_u64(n))}});
                    }
                    break;
            }
            const auto res = run_simulation(n, faults, workload, seed * 31 + n, params);
            ASSERT_TRUE(check_log_matching(res)) << "seed " << seed << " n " << n;
            ASSERT_TRUE(check_election_safety(res)) << "seed " << seed << " n " << n;
            ASSERT_TRUE(check_exactly_once(res)) << "seed " << seed << " n " << n;
        }
    }

    // availability under f=1 crash in n=3 vs the fault-free baseline
    WorkloadSpec spec;
    spec.tx_rate = 20.0;
    spec.duration_ms = 20'000;
    spec.seed = 4;
    const auto baseline = run_workload(spec);
    auto faulted_spec = spec;
    faulted_spec.fault_script = {{2'000, FaultKind::CrashNode, {1}}};
    const auto faulted = run_workload(faulted_spec);
    ASSERT_GT(baseline.committed, 0u);
    EXPECT_GT(static_cast<double>(faulted.committed) / static_cast<double>(baseline.committed),
              0.0);
}

TEST_F(Acceptance, C5_AuditSoundness) {
    criterion(5, "audit detection rate within 2% of the combinatorics oracle");
    const long double expected = binomial_ratio_oracle(100, 5, 20);
    EXPECT_NEAR(static_cast<double>(expected), 0.6806, 0.001);

    const auto res = audit_soundness(100, 5, 20, 10'000, 1234);
    ASSERT_EQ(res.trials, 10'000u);
    const double detected_rate =
        static_cast<double>(res.trials - res.missed) / static_cast<double>(res.trials);
    EXPECT_NEAR(detected_rate, static_cast<double>(expected), 0.02);

    const auto full = audit_soundness(100, 5, 100, 500, 99);
    EXPECT_EQ(full.missed, 0u);
}

TEST_F(Acceptance, C6_ConfidentialityNonLeakage) {
    criterion(6, "no operational payload bytes in ledger, reports, or denied queries");
    SimWorld world = default_world();
    const SimulationConfig cfg = demo_config();
    const SimulationResult res = run_end_to_end(cfg, world);
    const fs::path out = fresh_dir("leak");
    write_artifacts(res, out);

    std::vector<std::string> haystacks = {slurp(out / "ledger.ndjson"),
                                          slurp(out / "public_report.json"),
                                          slurp(out / "public_report.csv")};

    // query outputs for every identity whose org holds no side store
    std::set<std::string> authorized_orgs;
    for (const auto& [org, _] : res.side_stores.stores()) authorized_orgs.insert(org);
    for (const auto& [id, ident] : world.registry.identities()) {
        if (authorized_orgs.count(ident.org_id)) continue;
        for (LayerTag layer : {LayerTag::Operational, LayerTag::Supervisory, LayerTag::Public}) {
            const auto q = query_ledger(world.registry, cfg.policy, res.ledger, res.side_stores,
                                        id, layer);
            nlohmann::json j = {{"allowed", q.decision.allowed}, {"records", q.records}};
            haystacks.push_back(j.dump());
        }
    }

    std::vector<std::string> needles;
    for (const auto& probe : res.operational_probes)
        needles.emplace_back(probe.begin(), probe.end());
    for (const auto& wp : cfg.scenarios[0].waypoints) {
        needles.push_back(nlohmann::json(wp.lat).dump());
        needles.push_back(nlohmann::json(wp.lon).dump());
    }
    ASSERT_GT(needles.size(), 6u);
    for (const auto& needle : needles) {
        ASSERT_FALSE(needle.empty());
        for (size_t h = 0; h < haystacks.size(); ++h)
            EXPECT_EQ(haystacks[h].find(needle), std::string::npos)
                << "payload bytes leaked into haystack " << h;
    }
}

TEST_F(Acceptance, C7_LifecycleEnforcement) {
    criterion(7, "exhaustive lifecycle enumeration matches the edge list");
    std::map<std::pair<int, int>, const TransitionEdge*> edge_by_key;
    for (const auto& e : transition_edges())
        edge_by_key[{static_cast<int>(e.from), static_cast<int>(e.event)}] = &e;

    Shipment proto;
    proto.shipment_id = "shp-a";
    proto.permit_tx = Digest{};
    PrivateAnchor a;
    a.anchor = crypto::hash(crypto::Domain::PrivateAnchor, to_bytes("route"));
    a.authorized_orgs = {"carrier-org"};
    proto.route_anchor = a;

    for (ShipmentState from : kAllShipmentStates) {
        for (LifecycleEvent ev : kAllLifecycleEvents) {
            for (Role role : kAllRoles) {
                Shipment s = proto;
                s.state = from;
                const auto it = edge_by_key.find({static_cast<int>(from), static_cast<int>(ev)});
                try {
                    const ShipmentState to = validate_transition(s, ev, role, true);
                    ASSERT_NE(it, edge_by_key.end());
                    EXPECT_EQ(role, it->second->actor);
                    EXPECT_EQ(to, it->second->to);
                } catch (const Error& e) {
                    if (it == edge_by_key.end()) {
                        EXPECT_EQ(e.code(), Errc::IllegalTransition);
                    } else {
                        EXPECT_NE(role, it->second->actor);
                        EXPECT_EQ(e.code(), Errc::WrongRole);
                    }
                }
            }
        }
    }

    // transport cannot start before the permit is approved
    Shipment s = proto;
    s.state = ShipmentState::PermitRequested;
    EXPECT_THROW(validate_transition(s, LifecycleEvent::StartTransport, Role::Carrier), Error);
    s.state = ShipmentState::Approved;
    s.permit_tx.reset();
    EXPECT_THROW(validate_transition(s, LifecycleEvent::StartTransport, Role::Carrier), Error);
}

TEST_F(Acceptance, C8_ThroughputAndLatency) {
    criterion(8, "nonzero TPS, ordered latency quantiles, tx-count conservation");
    WorkloadSpec spec;
    spec.tx_rate = 25.0;
    spec.duration_ms = 30'000;
    spec.seed = 8;
    const auto art = run_bench(spec);
    const auto& m = art.metrics;
    EXPECT_NO_THROW(m.check_invariants());
    EXPECT_GT(m.tps, 0.0);
    EXPECT_LE(m.latency_p50_ms, m.latency_p95_ms);
    EXPECT_LE(m.latency_p95_ms, m.latency_max_ms);
    EXPECT_DOUBLE_EQ(m.tps * (static_cast<double>(m.duration_ms) / 1000.0),
                     static_cast<double>(m.committed_tx_count));
}

TEST_F(Acceptance, C9_Determinism) {
    criterion(9, "identical seeds give byte-identical ledgers and reports");
    const fs::path a = fresh_dir("det-a");
    const fs::path b = fresh_dir("det-b");
    {
        SimWorld w = default_world();
        write_artifacts(run_end_to_end(demo_config(), w), a);
    }
    {
        SimWorld w = default_world();
        write_artifacts(run_end_to_end(demo_config(), w), b);
    }
    size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
        ++compared;
    }
    EXPECT_GE(compared, 8u);

    WorkloadSpec spec;
    spec.tx_rate = 15.0;
    spec.duration_ms = 15'000;
    spec.seed = 3;
    const fs::path ba = fresh_dir("bench-a");
    const fs::path bb = fresh_dir("bench-b");
    emit_report(run_bench(spec), ba);
    emit_report(run_bench(spec), bb);
    for (const auto& entry : fs::directory_iterator(ba)) {
        const auto name = entry.path().filename();
        EXPECT_EQ(slurp(ba / name), slurp(bb / name)) << name;
    }
}
