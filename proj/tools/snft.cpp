// snft-cli: operator surface over the library. Exit codes are a stable
// contract: 0 success, 2 policy denial, 3 verification failure,
// 4 config error.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "snft/bench.hpp"
#include "snft/sim.hpp"

namespace fs = std::filesystem;
using namespace snft;

namespace {

constexpr int kOk = 0;
constexpr int kDenied = 2;
constexpr int kVerifyFailed = 3;
constexpr int kConfigError = 4;

int map_error(const Error& e) {
    switch (e.code()) {
        case Errc::ConfigError:
        case Errc::ParseError:
        case Errc::InvalidSpec:
        case Errc::InvalidScenario:
        case Errc::IoFailure:
        case Errc::UnknownIdentity:
        case Errc::UnknownOrganization:
            return kConfigError;
        default:
            return kVerifyFailed;
    }
}

nlohmann::json read_json(const std::string& path) { return load_json_file(path); }

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

// ---- identity subcommands ----

int cmd_identity_register(const std::string& registry_path, const std::string& org,
                          const std::string& role, const std::string& id,
                          const std::string& key_seed) {
    nlohmann::json j = read_json(registry_path);
    j["identities"].push_back({{"identity_id", id},
                               {"org_id", org},
                               {"role", role},
                               {"key_seed", key_seed}});
    world_from_json(j);  // validates the updated registry end to end
    write_json(registry_path, j);
    std::cout << "registered " << id << " (" << role << ") under " << org << "\n";
    return kOk;
}

int cmd_identity_revoke(const std::string& registry_path, const std::string& id) {
    nlohmann::json j = read_json(registry_path);
    bool found = false;
    for (auto& ij : j.at("identities"))
        if (ij.at("identity_id") == id) {
            ij["revoked"] = true;
            found = true;
        }
    if (!found) throw Error(Errc::UnknownIdentity, id);
    write_json(registry_path, j);
    std::cout << "revoked " << id << "\n";
    return kOk;
}

int cmd_identity_list(const std::string& registry_path, bool as_json) {
    const nlohmann::json j = read_json(registry_path);
    if (as_json) {
        std::cout << j.at("identities").dump(2) << "\n";
        return kOk;
    }
    for (const auto& ij : j.at("identities"))
        std::cout << ij.at("identity_id").get<std::string>() << "\t"
                  << ij.at("role").get<std::string>() << "\t"
                  << ij.at("org_id").get<std::string>()
                  << (ij.value("revoked", false) ? "\t[revoked]" : "") << "\n";
    return kOk;
}

// ---- ledger / simulate / query / verify ----

int cmd_ledger_verify(const std::string& ledger_path, const std::string& registry_path) {
    const LedgerStore ledger = load_ledger(ledger_path);
    if (const auto v = ledger.verify_chain()) {
        std::cout << "FAIL chain: violation at height " << v->height << "\n";
        return kVerifyFailed;
    }
    std::cout << "PASS chain: " << ledger.blocks().size() << " blocks, " << ledger.tx_count()
              << " txs\n";
    if (!registry_path.empty()) {
        const SimWorld world = world_from_json(read_json(registry_path));
        const size_t quorum = world.node_keys.size() / 2 + 1;
        for (const auto& b : ledger.blocks()) {
            for (const auto& tx : b.txs) world.registry.authenticate(tx.signature, tx.signing_bytes());
            if (LedgerStore::count_valid_commit_sigs(b, world.node_keys) < quorum) {
                std::cout << "FAIL quorum: block " << b.height << "\n";
                return kVerifyFailed;
            }
        }
        std::cout << "PASS signatures and quorum\n";
    }
    return kOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, uint64_t seed_override,
                 bool has_seed) {
    const fs::path cfg_path(config_path);
    const nlohmann::json j = read_json(config_path);
    SimulationConfig cfg = config_from_json(j, cfg_path.parent_path());
    if (has_seed) cfg.seed = seed_override;
    const std::string registry_rel =
        j.contains("registry") ? j.at("registry").get<std::string>() : "";
    SimWorld world = registry_rel.empty()
                         ? default_world(cfg.consensus.n)
                         : world_from_json(load_json_file(cfg_path.parent_path() / registry_rel));
    SimulationResult res = run_end_to_end(cfg, world);
    write_artifacts(res, out_dir);
    for (const auto& [sid, out] : res.outcomes)
        std::cout << sid << ": " << shipment_state_name(out.shipment.state) << ", "
                  << out.alerts.size() << " alerts"
                  << (out.incident_recorded ? ", incident recorded" : "") << "\n";
    std::cout << "ledger: " << res.ledger.blocks().size() << " blocks -> " << out_dir << "\n";
    return kOk;
}

int cmd_query(const std::string& artifacts_dir, const std::string& registry_path,
              const std::string& policy_path, const std::string& identity_id,
              const std::string& layer_str, const std::string& shipment, bool in_incident,
              bool as_json) {
    const SimWorld world = world_from_json(read_json(registry_path));
    AccessPolicy policy = policy_path.empty() ? AccessPolicy::default_policy()
                                              : AccessPolicy::from_json(read_json(policy_path));
    const fs::path dir(artifacts_dir);
    const LedgerStore ledger = load_ledger((dir / "ledger.ndjson").string());
    const SideStoreSet stores = side_stores_from_json(read_json((dir / "sidestores.json").string()));

    Registry registry = world.registry;
    if (!shipment.empty())
        for (const auto& [id, ident] : world.registry.identities())
            if (ident.role == Role::Consignor || ident.role == Role::Carrier ||
                ident.role == Role::Consignee || ident.role == Role::RegulatorNational)
                registry.assign_shipment(id, shipment);

    std::optional<ShipmentContext> ctx;
    if (!shipment.empty()) ctx = ShipmentContext{shipment, in_incident};
    const QueryResult res = query_ledger(registry, policy, ledger, stores, identity_id,
                                         layer_from_name(layer_str), ctx);
    if (!res.decision.allowed) {
        std::cout << "DENY " << deny_reason_name(*res.decision.reason) << "\n";
        return kDenied;
    }
    if (as_json) std::cout << res.records.dump(2) << "\n";
    else
        for (const auto& rec : res.records)
            std::cout << rec.at("tx_id").get<std::string>() << "\t"
                      << rec.at("type").get<std::string>() << "\n";
    return kOk;
}

int cmd_verify(const std::string& artifacts_dir, const std::string& registry_path) {
    const fs::path dir(artifacts_dir);
    bool all_ok = true;
    LedgerStore ledger;
    bool chain_ok = false;
    try {
        ledger = load_ledger((dir / "ledger.ndjson").string());
        chain_ok = !ledger.verify_chain().has_value();
    } catch (const Error&) {
        chain_ok = false;
    }
    std::cout << (chain_ok ? "PASS" : "FAIL") << " chain\n";
    all_ok &= chain_ok;

    if (chain_ok) {
        bool inclusion_ok = true;
        for (const auto& b : ledger.blocks())
            for (const auto& tx : b.txs) {
                const auto ip = ledger.query_tx(tx.tx_id);
                if (!LedgerStore::verify_inclusion(ledger.blocks()[ip.height], ip))
                    inclusion_ok = false;
            }
        std::cout << (inclusion_ok ? "PASS" : "FAIL") << " inclusion proofs\n";
        all_ok &= inclusion_ok;

        if (!registry_path.empty()) {
            const SimWorld world = world_from_json(read_json(registry_path));
            bool sig_ok = true;
            const size_t quorum = world.node_keys.size() / 2 + 1;
            try {
                for (const auto& b : ledger.blocks()) {
                    for (const auto& tx : b.txs)
                        world.registry.authenticate(tx.signature, tx.signing_bytes());
                    if (LedgerStore::count_valid_commit_sigs(b, world.node_keys) < quorum)
                        sig_ok = false;
                }
            } catch (const Error&) {
                sig_ok = false;
            }
            std::cout << (sig_ok ? "PASS" : "FAIL") << " signatures and quorum\n";
            all_ok &= sig_ok;

            bool att_ok = true;
            if (fs::exists(dir / "attestations.json")) {
                for (const auto& aj : read_json((dir / "attestations.json").string())) {
                    const auto att = attestation_from_json(aj);
                    const Identity* attestor = world.registry.find(att.attestor_id);
                    if (!attestor || !verify_attestation_signature(att, attestor->public_key) ||
                        !verify_transcript(att))
                        att_ok = false;
                }
                std::cout << (att_ok ? "PASS" : "FAIL") << " attestations\n";
                all_ok &= att_ok;
            }
        }
    } else {
        std::cout << "SKIP inclusion proofs\nSKIP signatures and quorum\nSKIP attestations\n";
    }

    if (fs::exists(dir / "public_report.json") && fs::exists(dir / "supervisory_records.json")) {
        const nlohmann::json pj = read_json((dir / "public_report.json").string());
        std::vector<SupervisoryRecord> records;
        for (const auto& rj : read_json((dir / "supervisory_records.json").string())) {
            SupervisoryRecord r;
            r.record_id = rj.at("record_id").get<std::string>();
            r.shipment_id = rj.at("shipment_id").get<std::string>();
            r.kind = rj.at("kind").get<std::string>();
            const std::string sev = rj.at("severity").get<std::string>();
            if (!sev.empty()) r.severity = severity_from_name(sev);
            r.sim_time_ms = rj.at("sim_time_ms").get<uint64_t>();
            r.on_time = rj.at("on_time").get<bool>();
            records.push_back(std::move(r));
        }
        PublicAggregate agg;
        agg.period_start_ms = pj.at("period_start_ms").get<uint64_t>();
        agg.period_end_ms = pj.at("period_end_ms").get<uint64_t>();
        agg.shipment_count = pj.at("shipment_count").get<uint64_t>();
        agg.alert_counts = pj.at("alert_counts").get<std::map<std::string, uint64_t>>();
        agg.on_time_rate = pj.at("on_time_rate").get<double>();
        agg.vacuous = pj.at("vacuous").get<bool>();
        agg.supervisory_link_digest = digest_from_hex(pj.at("supervisory_link").get<std::string>());
        const bool trace_ok = verify_public_trace(agg, records);
        std::cout << (trace_ok ? "PASS" : "FAIL") << " public traceability\n";
        all_ok &= trace_ok;
    }
    return all_ok ? kOk : kVerifyFailed;
}

// ---- bench subcommands ----

int cmd_bench_run(const std::string& spec_path, const std::string& out_dir, uint64_t seed_override,
                  bool has_seed) {
    WorkloadSpec spec;
    if (!spec_path.empty()) {
        const nlohmann::json j = read_json(spec_path);
        if (j.contains("shipments")) spec.shipments = j.at("shipments").get<int>();
        if (j.contains("tx_rate")) spec.tx_rate = j.at("tx_rate").get<double>();
        if (j.contains("duration_ms")) spec.duration_ms = j.at("duration_ms").get<uint64_t>();
        if (j.contains("cluster_size")) spec.cluster_size = j.at("cluster_size").get<int>();
        if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
        if (j.contains("fault_script"))
            spec.fault_script = consensus::fault_script_from_json(j.at("fault_script"));
        if (j.contains("drop_rate")) spec.network.drop_rate = j.at("drop_rate").get<double>();
    }
    if (has_seed) spec.seed = seed_override;
    const BenchArtifacts art = run_bench(spec);
    emit_report(art, out_dir);
    std::cout << "tps=" << art.metrics.tps << " p50=" << art.metrics.latency_p50_ms
              << "ms p95=" << art.metrics.latency_p95_ms << "ms committed="
              << art.metrics.committed_tx_count << " -> " << out_dir << "\n";
    const bool targets_ok = art.metrics.unauthorized_rejection_rate == 1.0 &&
                            art.metrics.authorized_grant_rate == 1.0 &&
                            art.metrics.tamper_detection_rate == 1.0 &&
                            art.metrics.public_verifiability_rate == 1.0;
    return targets_ok ? kOk : kVerifyFailed;
}

int cmd_bench_access(const std::string& policy_path, uint64_t seed) {
    const AccessPolicy policy = policy_path.empty()
                                    ? AccessPolicy::default_policy()
                                    : AccessPolicy::from_json(read_json(policy_path));
    Registry empty;
    const auto res = access_battery(policy, empty, seed);
    std::cout << "rejection_rate=" << res.rejection_rate() << " grant_rate=" << res.grant_rate()
              << (res.vacuous ? " (registry vacuous, grid+probe identities only)" : "") << "\n";
    for (const auto& m : res.mismatches)
        std::cout << "MISMATCH " << m.cell << " expected "
                  << (m.expected_allow ? "allow" : "deny") << " got "
                  << (m.got_allow ? "allow" : "deny") << "\n";
    return (res.rejection_rate() == 1.0 && res.grant_rate() == 1.0) ? kOk : kVerifyFailed;
}

int cmd_bench_tamper(const std::string& ledger_path, const std::string& registry_path, size_t n,
                     uint64_t seed) {
    const LedgerStore ledger = load_ledger(ledger_path);
    const SimWorld world = world_from_json(read_json(registry_path));
    const auto res = tamper_battery(ledger, world.registry, world.node_keys, n, seed);
    std::cout << "attempted=" << res.attempted << " detected=" << res.detected
              << " rate=" << res.detection_rate() << (res.empty_flagged ? " (n=0 flagged)" : "")
              << "\n";
    return res.detection_rate() == 1.0 ? kOk : kVerifyFailed;
}

int cmd_bench_report(const std::string& metrics_path, const std::string& format) {
    const MetricsReport m = MetricsReport::from_json(read_json(metrics_path));
    m.check_invariants();
    if (format == "csv") std::cout << m.to_csv();
    else std::cout << m.to_json().dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    crypto::init();
    CLI::App app{"spent-fuel transport ledger simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    uint64_t seed = 0;
    bool has_seed = false;
    std::string out_dir = "out";
    app.add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        has_seed = true;
    });
    app.add_option("--out", out_dir, "output directory");

    // identity
    auto* identity = app.add_subcommand("identity", "registry management");
    std::string reg_path, org, role_str, id_str, key_seed = "key";
    auto* id_reg = identity->add_subcommand("register", "add an identity");
    id_reg->add_option("--registry", reg_path)->required();
    id_reg->add_option("--org", org)->required();
    id_reg->add_option("--role", role_str)->required();
    id_reg->add_option("--id", id_str)->required();
    id_reg->add_option("--key-seed", key_seed)->required();
    auto* id_rev = identity->add_subcommand("revoke", "revoke an identity");
    id_rev->add_option("--registry", reg_path)->required();
    id_rev->add_option("--id", id_str)->required();
    auto* id_list = identity->add_subcommand("list", "list identities");
    id_list->add_option("--registry", reg_path)->required();
    std::string format = "text";
    id_list->add_option("--format", format, "text|json");

    // ledger
    auto* ledger_cmd = app.add_subcommand("ledger", "ledger tools");
    std::string ledger_path;
    auto* ledger_verify = ledger_cmd->add_subcommand("verify", "verify a ledger file");
    ledger_verify->add_option("--ledger", ledger_path)->required();
    std::string lv_registry;
    ledger_verify->add_option("--registry", lv_registry);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run the end-to-end pipeline");
    std::string config_path;
    simulate->add_option("--config", config_path)->required();

    // query
    auto* query = app.add_subcommand("query", "layer-filtered ledger query");
    std::string artifacts_dir, q_registry, q_policy, q_as, q_layer, q_shipment;
    bool q_incident = false;
    std::string q_format = "text";
    query->add_option("--artifacts", artifacts_dir)->required();
    query->add_option("--registry", q_registry)->required();
    query->add_option("--policy", q_policy);
    query->add_option("--as", q_as)->required();
    query->add_option("--layer", q_layer)->required();
    query->add_option("--shipment", q_shipment);
    query->add_flag("--incident", q_incident);
    query->add_option("--format", q_format, "text|json");

    // verify
    auto* verify = app.add_subcommand("verify", "verify simulation artifacts");
    std::string v_artifacts, v_registry;
    verify->add_option("--artifacts", v_artifacts)->required();
    verify->add_option("--registry", v_registry);

    // bench
    auto* bench = app.add_subcommand("bench", "benchmark harness");
    auto* bench_run = bench->add_subcommand("run", "throughput/latency workload");
    std::string spec_path;
    bench_run->add_option("--spec", spec_path);
    auto* bench_access = bench->add_subcommand("access", "access-control battery");
    std::string b_policy;
    bench_access->add_option("--policy", b_policy);
    auto* bench_tamper = bench->add_subcommand("tamper", "tamper-detection battery");
    std::string b_ledger, b_registry;
    size_t b_n = 500;
    bench_tamper->add_option("--ledger", b_ledger)->required();
    bench_tamper->add_option("--registry", b_registry)->required();
    bench_tamper->add_option("-n", b_n);
    auto* bench_report = bench->add_subcommand("report", "re-emit a metrics report");
    std::string b_metrics, b_format = "json";
    bench_report->add_option("--metrics", b_metrics)->required();
    bench_report->add_option("--format", b_format, "csv|json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (id_reg->parsed()) return cmd_identity_register(reg_path, org, role_str, id_str, key_seed);
        if (id_rev->parsed()) return cmd_identity_revoke(reg_path, id_str);
        if (id_list->parsed()) return cmd_identity_list(reg_path, format == "json");
        if (ledger_verify->parsed()) return cmd_ledger_verify(ledger_path, lv_registry);
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir, seed, has_seed);
        if (query->parsed())
            return cmd_query(artifacts_dir, q_registry, q_policy, q_as, q_layer, q_shipment,
                             q_incident, q_format == "json");
        if (verify->parsed()) return cmd_verify(v_artifacts, v_registry);
        if (bench_run->parsed()) return cmd_bench_run(spec_path, out_dir, seed, has_seed);
        if (bench_access->parsed()) return cmd_bench_access(b_policy, has_seed ? seed : 1);
        if (bench_tamper->parsed()) return cmd_bench_tamper(b_ledger, b_registry, b_n,
                                                            has_seed ? seed : 7);
        if (bench_report->parsed()) return cmd_bench_report(b_metrics, b_format);
    } catch (const Error& e) {
        std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return map_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    std::cerr << "no subcommand\n";
    return kConfigError;
}
