#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "snft/sim.hpp"

using namespace snft;
namespace fs = std::filesystem;

namespace {

RouteScenario demo_scenario(const std::string& sid = "shp-demo") {
    RouteScenario sc;
    sc.shipment_id = sid;
    sc.waypoints = {{35.0, 129.0, 0}, {35.5, 129.5, 600'000}, {36.0, 130.0, 1'200'000}};
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
    return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

TEST(Sim, ConfigValidation) {
    SimulationConfig cfg = demo_config();
    cfg.consensus.n = 4;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = demo_config();
    cfg.scenarios.clear();
    EXPECT_THROW(cfg.validate(), Error);
    cfg = demo_config();
    cfg.scenarios[0].waypoints.resize(1);
    try {
        cfg.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ConfigError);
        EXPECT_NE(std::string(e.what()).find("shp-demo"), std::string::npos);
    }
    EXPECT_NO_THROW(demo_config().validate());
}

TEST(Sim, HappyPathEndToEnd) {
    SimWorld world = default_world();
    const SimulationResult res = run_end_to_end(demo_config(), world);

    const auto& out = res.outcomes.at("shp-demo");
    EXPECT_EQ(out.shipment.state, ShipmentState::Archived);
    EXPECT_TRUE(out.on_time);
    EXPECT_FALSE(out.incident_recorded);
    ASSERT_TRUE(out.attestation.has_value());
    EXPECT_FALSE(res.ledger.verify_chain().has_value());
    EXPECT_GT(res.ledger.blocks().size(), 5u);

    // operational txs on the ledger carry anchors only
    for (const auto& b : res.ledger.blocks())
        for (const auto& tx : b.txs)
            if (tx.layer == LayerTag::Operational) EXPECT_TRUE(tx.has_anchor());

    // exactly one public aggregate tx
    size_t public_txs = 0;
    for (const auto& b : res.ledger.blocks())
        for (const auto& tx : b.txs)
            if (tx.layer == LayerTag::Public) ++public_txs;
    EXPECT_EQ(public_txs, 1u);

    EXPECT_TRUE(verify_public_trace(res.aggregate, res.supervisory_records));
    EXPECT_FALSE(res.aggregate.vacuous);
    EXPECT_DOUBLE_EQ(res.aggregate.on_time_rate, 1.0);
}

TEST(Sim, SealBreakRecordsIncident) {
    SimulationConfig cfg = demo_config();
    cfg.scenarios[0].injected_events = {{400'000, InjectKind::SealBreak, 0.0}};
    SimWorld world = default_world();
    const SimulationResult res = run_end_to_end(cfg, world);

    const auto& out = res.outcomes.at("shp-demo");
    EXPECT_TRUE(out.incident_recorded);
    EXPECT_EQ(out.shipment.state, ShipmentState::Archived);
    bool critical = false;
    for (const auto& a : out.alerts)
        if (a.rule_id == "seal_broken" && a.severity == Severity::Critical) critical = true;
    EXPECT_TRUE(critical);
    EXPECT_GE(res.outbox.size(), 1u);
    EXPECT_GE(res.aggregate.alert_counts.count("critical"), 1u);
}

TEST(Sim, NoRawPayloadBytesOnLedger) {
    SimWorld world = default_world();
    const SimulationResult res = run_end_to_end(demo_config(), world);
    const fs::path dir = fs::temp_directory_path() / "snft_sim_leak";
    write_artifacts(res, dir);
    const std::string ledger_text = slurp(dir / "ledger.ndjson");
    const std::string public_json = slurp(dir / "public_report.json");
    ASSERT_FALSE(res.operational_probes.empty());
    for (const auto& probe : res.operational_probes) {
        const std::string needle(probe.begin(), probe.end());
        EXPECT_EQ(ledger_text.find(needle), std::string::npos);
        EXPECT_EQ(public_json.find(needle), std::string::npos);
    }
    fs::remove_all(dir);
}

TEST(Sim, DeterministicArtifacts) {
    const fs::path a = fs::temp_directory_path() / "snft_sim_a";
    const fs::path b = fs::temp_directory_path() / "snft_sim_b";
    {
        SimWorld world = default_world();
        write_artifacts(run_end_to_end(demo_config(), world), a);
    }
    {
        SimWorld world = default_world();
        write_artifacts(run_end_to_end(demo_config(), world), b);
    }
    for (const char* name : {"ledger.ndjson", "consensus_trace.ndjson", "public_report.json",
                             "public_report.csv", "sidestores.json", "shipments.json",
                             "attestations.json", "supervisory_records.json", "outbox.ndjson"})
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Sim, ArtifactsRoundTrip) {
    const fs::path dir = fs::temp_directory_path() / "snft_sim_rt";
    SimWorld world = default_world();
    const SimulationResult res = run_end_to_end(demo_config(), world);
    write_artifacts(res, dir);
    const LedgerStore loaded = load_ledger((dir / "ledger.ndjson").string());
    EXPECT_FALSE(loaded.verify_chain().has_value());
    EXPECT_EQ(loaded.blocks().size(), res.ledger.blocks().size());
    const SideStoreSet stores = side_stores_from_json(load_json_file(dir / "sidestores.json"));
    EXPECT_EQ(stores.stores().size(), res.side_stores.stores().size());
    fs::remove_all(dir);
}

TEST(Sim, QueryRespectsPolicy) {
    SimWorld world = default_world();
    const SimulationResult res = run_end_to_end(demo_config(), world);
    const AccessPolicy policy = AccessPolicy::default_policy();

    // public observer reads public aggregates only
    world.registry.add_organization({"public-org", "Public", Role::PublicObserver, {}});
    const auto kp = crypto::keypair_from_seed(crypto::sha256(to_bytes("identity:observer")));
    world.registry.register_identity("public-org", Role::PublicObserver, kp.pk, "observer");

    const auto pub = query_ledger(world.registry, policy, res.ledger, res.side_stores, "observer",
                                  LayerTag::Public);
    EXPECT_TRUE(pub.decision.allowed);
    EXPECT_EQ(pub.records.size(), 1u);

    const auto op = query_ledger(world.registry, policy, res.ledger, res.side_stores, "observer",
                                 LayerTag::Operational);
    EXPECT_FALSE(op.decision.allowed);
    EXPECT_EQ(*op.decision.reason, DenyReason::RoleForbidden);
    EXPECT_TRUE(op.records.empty());

    // assigned carrier sees operational payloads from its side store
    const auto carrier = query_ledger(world.registry, policy, res.ledger, res.side_stores,
                                      world.carrier_id, LayerTag::Operational,
                                      ShipmentContext{"shp-demo", false});
    EXPECT_TRUE(carrier.decision.allowed);
    bool any_payload = false;
    for (const auto& rec : carrier.records)
        if (rec.contains("payload")) any_payload = true;
    EXPECT_TRUE(any_payload);

    // unassigned context denies with NotAssigned
    const auto denied = query_ledger(world.registry, policy, res.ledger, res.side_stores,
                                     world.carrier_id, LayerTag::Operational,
                                     ShipmentContext{"other-shipment", false});
    EXPECT_FALSE(denied.decision.allowed);
    EXPECT_EQ(*denied.decision.reason, DenyReason::NotAssigned);
}

TEST(Sim, MultipleShipments) {
    SimulationConfig cfg = demo_config();
    cfg.scenarios.push_back(demo_scenario("shp-two"));
    cfg.scenarios[1].injected_events = {{200'000, InjectKind::RadiationSpike, 10.0}};
    SimWorld world = default_world();
    const SimulationResult res = run_end_to_end(cfg, world);
    EXPECT_EQ(res.outcomes.size(), 2u);
    EXPECT_EQ(res.aggregate.shipment_count, 2u);
    EXPECT_TRUE(res.outcomes.at("shp-two").incident_recorded);
    // the spiked shipment fails the dose claim, so no attestation issued
    EXPECT_FALSE(res.outcomes.at("shp-two").attestation.has_value());
    EXPECT_TRUE(res.outcomes.at("shp-demo").attestation.has_value());
    EXPECT_FALSE(res.ledger.verify_chain().has_value());
}

TEST(Sim, ConfigFromJsonResolvesPaths) {
    const fs::path dir = fs::temp_directory_path() / "snft_sim_cfg";
    fs::create_directories(dir);
    write_text(dir / "scenario.json", nlohmann::json{
        {"shipment_id", "shp-file"},
        {"waypoints", {{{"lat", 1.0}, {"lon", 2.0}, {"arrival_ms", 0}},
                       {{"lat", 2.0}, {"lon", 3.0}, {"arrival_ms", 600'000}}}}}.dump());
    write_text(dir / "config.json", nlohmann::json{
        {"seed", 7}, {"scenarios", {"scenario.json"}},
        {"consensus", {{"n", 3}}}}.dump());
    const SimulationConfig cfg = config_from_json(load_json_file(dir / "config.json"), dir);
    EXPECT_EQ(cfg.seed, 7u);
    ASSERT_EQ(cfg.scenarios.size(), 1u);
    EXPECT_EQ(cfg.scenarios[0].shipment_id, "shp-file");
    fs::remove_all(dir);
}
