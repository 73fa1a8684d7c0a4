#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "snft/error.hpp"
#include "snft/identity.hpp"
#include "snft/layeraccess.hpp"
#include "snft/ledger.hpp"
#include "snft/rng.hpp"

namespace snft {

enum class SensorType { Gps, Radiation, Temperature, Shock, TamperSeal, Rfid };

inline constexpr SensorType kAllSensors[] = {SensorType::Gps,   SensorType::Radiation,
                                             SensorType::Temperature, SensorType::Shock,
                                             SensorType::TamperSeal,  SensorType::Rfid};

inline const char* sensor_name(SensorType s) {
    switch (s) {
        case SensorType::Gps: return "gps";
        case SensorType::Radiation: return "radiation";
        case SensorType::Temperature: return "temperature";
        case SensorType::Shock: return "shock";
        case SensorType::TamperSeal: return "tamper_seal";
        case SensorType::Rfid: return "rfid";
    }
    return "unknown";
}

inline SensorType sensor_from_name(std::string_view name) {
    for (SensorType s : kAllSensors)
        if (name == sensor_name(s)) return s;
    throw Error(Errc::ParseError, "unknown sensor: " + std::string(name));
}

struct GpsFix {
    double lat = 0.0;
    double lon = 0.0;
};

// Units are fixed per sensor: radiation uSv/h, temperature degC,
// shock peak g, seal intact flag, rfid tag id.
using SensorValue = std::variant<GpsFix, double, bool, std::string>;

struct SensorReading {
    std::string shipment_id;
    SensorType sensor = SensorType::Gps;
    uint64_t seq = 0;  // strictly increasing per (shipment, sensor)
    uint64_t sim_time_ms = 0;
    SensorValue value;

    // numeric projection used by windowed statistics; GPS and RFID have none
    std::optional<double> numeric() const {
        if (std::holds_alternative<double>(value)) return std::get<double>(value);
        if (std::holds_alternative<bool>(value)) return std::get<bool>(value) ? 1.0 : 0.0;
        return std::nullopt;
    }

    Bytes canonical_bytes() const {
        CanonicalWriter w;
        w.field("shipment_id", std::string_view(shipment_id));
        w.field("sensor", std::string_view(sensor_name(sensor)));
        w.field_u64("seq", seq);
        w.field_u64("sim_time_ms", sim_time_ms);
        if (const auto* g = std::get_if<GpsFix>(&value)) {
            w.field_f64("lat", g->lat);
            w.field_f64("lon", g->lon);
        } else if (const auto* d = std::get_if<double>(&value)) {
            w.field_f64("v", *d);
        } else if (const auto* b = std::get_if<bool>(&value)) {
            w.field_u64("v", *b ? 1 : 0);
        } else {
            w.field("v", std::string_view(std::get<std::string>(value)));
        }
        return w.finish();
    }
};

enum class Severity { Info, Warning, Critical };

inline const char* severity_name(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Warning: return "warning";
        case Severity::Critical: return "critical";
    }
    return "unknown";
}

inline Severity severity_from_name(std::string_view name) {
    for (Severity s : {Severity::Info, Severity::Warning, Severity::Critical})
        if (name == severity_name(s)) return s;
    throw Error(Errc::ParseError, "unknown severity: " + std::string(name));
}

enum class Comparator { Greater, Less, Equal };

struct AlertRule {
    std::string rule_id;
    SensorType sensor = SensorType::Radiation;
    Comparator comparator = Comparator::Greater;
    double threshold = 0.0;  // seal rules compare against intact as 0/1
    Severity severity = Severity::Warning;

    bool violated_by(const SensorReading& r) const {
        if (r.sensor != sensor) return false;
        auto v = r.numeric();
        if (!v) return false;
        switch (comparator) {
            case Comparator::Greater: return *v > threshold;
            case Comparator::Less: return *v < threshold;
            case Comparator::Equal: return *v == threshold;
        }
        return false;
    }
};

inline std::vector<AlertRule> alert_rules_from_json(const nlohmann::json& j) {
    std::vector<AlertRule> rules;
    for (const auto& rj : j) {
        AlertRule r;
        r.rule_id = rj.at("rule_id").get<std::string>();
        r.sensor = sensor_from_name(rj.at("sensor").get<std::string>());
        const std::string cmp = rj.at("comparator").get<std::string>();
        if (cmp == ">") r.comparator = Comparator::Greater;
        else if (cmp == "<") r.comparator = Comparator::Less;
        else if (cmp == "==") r.comparator = Comparator::Equal;
        else throw Error(Errc::ParseError, "bad comparator " + cmp);
        r.threshold = rj.at("threshold").get<double>();
        r.severity = severity_from_name(rj.at("severity").get<std::string>());
        if (!std::isfinite(r.threshold)) throw Error(Errc::ParseError, "non-finite threshold");
        rules.push_back(std::move(r));
    }
    return rules;
}

// Thresholds are configuration defaults with no external provenance.
inline std::vector<AlertRule> default_alert_rules() {
    return {
        {"radiation_excess", SensorType::Radiation, Comparator::Greater, 3.0, Severity::Critical},
        {"shock_impact", SensorType::Shock, Comparator::Greater, 25.0, Severity::Warning},
        {"temperature_high", SensorType::Temperature, Comparator::Greater, 85.0, Severity::Warning},
        {"seal_broken", SensorType::TamperSeal, Comparator::Equal, 0.0, Severity::Critical},
    };
}

enum class InjectKind { RadiationSpike, ShockImpact, SealBreak, GpsDropout };

inline const char* inject_kind_name(InjectKind k) {
    switch (k) {
        case InjectKind::RadiationSpike: return "radiation_spike";
        case InjectKind::ShockImpact: return "shock_impact";
        case InjectKind::SealBreak: return "seal_break";
        case InjectKind::GpsDropout: return "gps_dropout";
    }
    return "unknown";
}

inline InjectKind inject_kind_from_name(std::string_view name) {
    for (InjectKind k : {InjectKind::RadiationSpike, InjectKind::ShockImpact, InjectKind::SealBreak,
                         InjectKind::GpsDropout})
        if (name == inject_kind_name(k)) return k;
    throw Error(Errc::ParseError, "unknown injected event kind: " + std::string(name));
}

struct Waypoint {
    double lat = 0.0;
    double lon = 0.0;
    uint64_t arrival_ms = 0;
};

struct Baseline {
    double nominal = 0.0;
    double noise_amplitude = 0.0;  // gaussian sigma
};

struct InjectedEvent {
    uint64_t at_ms = 0;
    InjectKind kind = InjectKind::RadiationSpike;
    double magnitude = 0.0;  // spike/impact size; dropout duration in ms
};

struct RouteScenario {
    std::string shipment_id;
    std::vector<Waypoint> waypoints;
    std::map<SensorType, uint64_t> cadences_ms;
    std::map<SensorType, Baseline> baselines;
    std::vector<InjectedEvent> injected_events;
    std::string rfid_tag = "rfid-0";

    // GPS cadence anchored to the once-per-minute tracking figure;
    // the rest are configurable defaults. Shock is event-driven.
    static std::map<SensorType, uint64_t> default_cadences() {
        return {{SensorType::Gps, 60'000},
                {SensorType::Radiation, 10'000},
                {SensorType::Temperature, 30'000},
                {SensorType::TamperSeal, 10'000}};
    }

    static std::map<SensorType, Baseline> default_baselines() {
        return {{SensorType::Gps, {0.0, 0.0001}},
                {SensorType::Radiation, {1.0, 0.05}},
                {SensorType::Temperature, {28.0, 0.5}}};
    }

    uint64_t end_ms() const { return waypoints.empty() ? 0 : waypoints.back().arrival_ms; }

    void validate() const {
        if (waypoints.size() < 2) throw Error(Errc::InvalidScenario, "need at least two waypoints");
        for (size_t i = 1; i < waypoints.size(); ++i)
            if (waypoints[i].arrival_ms <= waypoints[i - 1].arrival_ms)
                throw Error(Errc::InvalidScenario, "waypoint times must be strictly increasing");
        for (const auto& [s, c] : cadences_ms)
            if (c == 0) throw Error(Errc::InvalidScenario, "non-positive cadence");
    }
};

inline RouteScenario scenario_from_json(const nlohmann::json& j) {
    RouteScenario sc;
    sc.shipment_id = j.at("shipment_id").get<std::string>();
    for (const auto& wj : j.at("waypoints"))
        sc.waypoints.push_back({wj.at("lat").get<double>(), wj.at("lon").get<double>(),
                                wj.at("arrival_ms").get<uint64_t>()});
    sc.cadences_ms = RouteScenario::default_cadences();
    if (j.contains("cadences_ms"))
        for (const auto& [k, v] : j.at("cadences_ms").items())
            sc.cadences_ms[sensor_from_name(k)] = v.get<uint64_t>();
    sc.baselines = RouteScenario::default_baselines();
    if (j.contains("baselines"))
        for (const auto& [k, v] : j.at("baselines").items())
            sc.baselines[sensor_from_name(k)] = {v.at("nominal").get<double>(),
                                                 v.at("noise_amplitude").get<double>()};
    if (j.contains("injected_events"))
        for (const auto& ej : j.at("injected_events"))
            sc.injected_events.push_back({ej.at("at_ms").get<uint64_t>(),
                                          inject_kind_from_name(ej.at("kind").get<std::string>()),
                                          ej.at("magnitude").get<double>()});
    if (j.contains("rfid_tag")) sc.rfid_tag = j.at("rfid_tag").get<std::string>();
    return sc;
}

// Deterministic for (scenario, seed). GPS positions interpolate
// linearly between waypoints; noise comes from per-sensor substreams
// so adding a sensor never shifts another sensor's draws.
inline std::vector<SensorReading> generate_readings(const RouteScenario& sc, uint64_t seed) {
    sc.validate();
    Rng master(seed);
    const uint64_t end = sc.end_ms();
    std::vector<SensorReading> out;

    auto baseline = [&](SensorType s) {
        auto it = sc.baselines.find(s);
        return it == sc.baselines.end() ? Baseline{} : it->second;
    };
    auto cadence = [&](SensorType s) -> std::optional<uint64_t> {
        auto it = sc.cadences_ms.find(s);
        if (it == sc.cadences_ms.end()) return std::nullopt;
        return it->second;
    };
    auto interp = [&](uint64_t t) -> GpsFix {
        const auto& wp = sc.waypoints;
        if (t <= wp.front().arrival_ms) return {wp.front().lat, wp.front().lon};
        if (t >= wp.back().arrival_ms) return {wp.back().lat, wp.back().lon};
        for (size_t i = 1; i < wp.size(); ++i) {
            if (t <= wp[i].arrival_ms) {
                const double f = static_cast<double>(t - wp[i - 1].arrival_ms) /
                                 static_cast<double>(wp[i].arrival_ms - wp[i - 1].arrival_ms);
                return {wp[i - 1].lat + f * (wp[i].lat - wp[i - 1].lat),
                        wp[i - 1].lon + f * (wp[i].lon - wp[i - 1].lon)};
            }
        }
        return {wp.back().lat, wp.back().lon};
    };
    auto in_dropout = [&](uint64_t t) {
        for (const auto& e : sc.injected_events)
            if (e.kind == InjectKind::GpsDropout && t >= e.at_ms &&
                t < e.at_ms + static_cast<uint64_t>(e.magnitude))
                return true;
        return false;
    };

    // GPS
    if (auto c = cadence(SensorType::Gps)) {
        Rng rng = master.fork(0);
        const double sigma = baseline(SensorType::Gps).noise_amplitude;
        uint64_t seq = 0;
        for (uint64_t t = 0; t <= end; t += *c) {
            const double jlat = rng.gaussian(0.0, sigma);
            const double jlon = rng.gaussian(0.0, sigma);
            if (in_dropout(t)) continue;  // draws burned so later fixes do not shift
            GpsFix fix = interp(t);
            fix.lat += jlat;
            fix.lon += jlon;
            out.push_back({sc.shipment_id, SensorType::Gps, seq++, t, fix});
        }
    }

    // scalar sensors with a cadence
    auto emit_scalar = [&](SensorType s, uint64_t stream, auto value_at) {
        if (auto c = cadence(s)) {
            Rng rng = master.fork(stream);
            uint64_t seq = 0;
            for (uint64_t t = 0; t <= end; t += *c)
                out.push_back({sc.shipment_id, s, seq++, t, value_at(t, rng, *c)});
        }
    };
    emit_scalar(SensorType::Radiation, 1, [&](uint64_t t, Rng& rng, uint64_t c) -> SensorValue {
        const Baseline b = baseline(SensorType::Radiation);
        double v = b.nominal + rng.gaussian(0.0, b.noise_amplitude);
        for (const auto& e : sc.injected_events)
            if (e.kind == InjectKind::RadiationSpike && t >= e.at_ms && t < e.at_ms + c)
                v += e.magnitude;
        return std::max(0.0, v);
    });
    emit_scalar(SensorType::Temperature, 2, [&](uint64_t, Rng& rng, uint64_t) -> SensorValue {
        const Baseline b = baseline(SensorType::Temperature);
        return b.nominal + rng.gaussian(0.0, b.noise_amplitude);
    });
    emit_scalar(SensorType::TamperSeal, 3, [&](uint64_t t, Rng&, uint64_t) -> SensorValue {
        for (const auto& e : sc.injected_events)
            if (e.kind == InjectKind::SealBreak && t >= e.at_ms) return false;
        return true;
    });

    // shock is event-driven: one reading per impact
    {
        uint64_t seq = 0;
        for (const auto& e : sc.injected_events)
            if (e.kind == InjectKind::ShockImpact)
                out.push_back({sc.shipment_id, SensorType::Shock, seq++, e.at_ms,
                               std::max(0.0, e.magnitude)});
    }

    // RFID scans at waypoints
    {
        uint64_t seq = 0;
        for (const auto& wp : sc.waypoints)
            out.push_back({sc.shipment_id, SensorType::Rfid, seq++, wp.arrival_ms, sc.rfid_tag});
    }

    std::stable_sort(out.begin(), out.end(), [](const SensorReading& a, const SensorReading& b) {
        if (a.sim_time_ms != b.sim_time_ms) return a.sim_time_ms < b.sim_time_ms;
        return static_cast<int>(a.sensor) < static_cast<int>(b.sensor);
    });
    return out;
}

struct AnomalyFlag {
    uint64_t sim_time_ms = 0;
    std::string rule_id;
};

struct EdgeSummary {
    std::string shipment_id;
    SensorType sensor = SensorType::Radiation;
    uint64_t window_start_ms = 0;
    uint64_t window_end_ms = 0;
    uint64_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::vector<AnomalyFlag> anomaly_flags;
};

// Tumbling windows aligned to scenario start. Sensors without a
// numeric projection (GPS, RFID) are not summarized.
inline std::vector<EdgeSummary> edge_aggregate(const std::vector<SensorReading>& stream,
                                               uint64_t window_ms,
                                               const std::vector<AlertRule>& rules) {
    if (window_ms == 0) throw Error(Errc::InvalidScenario, "window_ms must be positive");
    std::map<std::pair<uint64_t, int>, EdgeSummary> windows;
    for (const auto& r : stream) {
        auto v = r.numeric();
        if (!v) continue;
        const uint64_t w = r.sim_time_ms / window_ms;
        auto& s = windows[{w, static_cast<int>(r.sensor)}];
        if (s.count == 0) {
            s.shipment_id = r.shipment_id;
            s.sensor = r.sensor;
            s.window_start_ms = w * window_ms;
            s.window_end_ms = (w + 1) * window_ms;
            s.min = s.max = *v;
            s.mean = 0.0;
        }
        s.min = std::min(s.min, *v);
        s.max = std::max(s.max, *v);
        s.mean += *v;  // running sum; divided below
        ++s.count;
        for (const auto& rule : rules)
            if (rule.violated_by(r)) s.anomaly_flags.push_back({r.sim_time_ms, rule.rule_id});
    }
    std::vector<EdgeSummary> out;
    out.reserve(windows.size());
    for (auto& [_, s] : windows) {
        s.mean /= static_cast<double>(s.count);
        out.push_back(std::move(s));
    }
    return out;
}

inline nlohmann::json reading_to_json(const SensorReading& r) {
    nlohmann::json j;
    j["shipment_id"] = r.shipment_id;
    j["sensor"] = sensor_name(r.sensor);
    j["seq"] = r.seq;
    j["sim_time_ms"] = r.sim_time_ms;
    if (const auto* g = std::get_if<GpsFix>(&r.value))
        j["value"] = {{"lat", g->lat}, {"lon", g->lon}};
    else if (const auto* d = std::get_if<double>(&r.value))
        j["value"] = *d;
    else if (const auto* b = std::get_if<bool>(&r.value))
        j["value"] = *b;
    else
        j["value"] = std::get<std::string>(r.value);
    return j;
}

inline SensorReading reading_from_json(const nlohmann::json& j) {
    SensorReading r;
    r.shipment_id = j.at("shipment_id").get<std::string>();
    r.sensor = sensor_from_name(j.at("sensor").get<std::string>());
    r.seq = j.at("seq").get<uint64_t>();
    r.sim_time_ms = j.at("sim_time_ms").get<uint64_t>();
    const auto& v = j.at("value");
    if (v.is_object()) r.value = GpsFix{v.at("lat").get<double>(), v.at("lon").get<double>()};
    else if (v.is_boolean()) r.value = v.get<bool>();
    else if (v.is_number()) r.value = v.get<double>();
    else r.value = v.get<std::string>();
    return r;
}

inline nlohmann::json summary_to_json(const EdgeSummary& s) {
    nlohmann::json flags = nlohmann::json::array();
    for (const auto& f : s.anomaly_flags)
        flags.push_back({{"sim_time_ms", f.sim_time_ms}, {"rule_id", f.rule_id}});
    return {{"shipment_id", s.shipment_id}, {"sensor", sensor_name(s.sensor)},
            {"window_start_ms", s.window_start_ms}, {"window_end_ms", s.window_end_ms},
            {"count", s.count}, {"min", s.min}, {"max", s.max}, {"mean", s.mean},
            {"anomaly_flags", flags}};
}

inline std::string readings_to_csv(const std::vector<SensorReading>& stream) {
    std::ostringstream out;
    out << "shipment,sensor,seq,t_ms,value\n";
    for (const auto& r : stream) {
        out << r.shipment_id << ',' << sensor_name(r.sensor) << ',' << r.seq << ','
            << r.sim_time_ms << ',';
        if (const auto* g = std::get_if<GpsFix>(&r.value))
            out << g->lat << ';' << g->lon;
        else if (const auto* d = std::get_if<double>(&r.value))
            out << *d;
        else if (const auto* b = std::get_if<bool>(&r.value))
            out << (*b ? "true" : "false");
        else
            out << std::get<std::string>(r.value);
        out << '\n';
    }
    return out.str();
}

// Wraps raw readings plus summaries into one operational SensorBatch
// tx; the raw payload goes off-ledger, the tx carries only the anchor.
inline Transaction package_batch(const std::vector<SensorReading>& readings,
                                 const std::vector<EdgeSummary>& summaries,
                                 const Identity& carrier, const crypto::SecretKey& carrier_sk,
                                 const std::string& shipment_id,
                                 const std::set<std::string>& authorized_orgs,
                                 SideStoreSet& side_stores, Rng& salt_rng, uint64_t sim_time_ms) {
    if (readings.empty() && summaries.empty()) throw Error(Errc::EmptyBatch, "nothing to package");
    if (!carrier.assigned_shipments.count(shipment_id))
        throw Error(Errc::NotAssigned, carrier.identity_id + " not assigned to " + shipment_id);
    nlohmann::json payload;
    payload["shipment_id"] = shipment_id;
    payload["readings"] = nlohmann::json::array();
    for (const auto& r : readings) payload["readings"].push_back(reading_to_json(r));
    payload["summaries"] = nlohmann::json::array();
    for (const auto& s : summaries) payload["summaries"].push_back(summary_to_json(s));
    const std::string dumped = payload.dump();

    Bytes salt(16);
    for (auto& b : salt) b = static_cast<uint8_t>(salt_rng.uniform_u64(256));
    PrivateAnchor anchor = side_stores.put_private(to_bytes(dumped), salt, authorized_orgs,
                                                   "sensor-batch/" + shipment_id);

    Transaction tx;
    tx.tx_type = TxType::SensorBatch;
    tx.submitter = carrier.identity_id;
    tx.sim_time_ms = sim_time_ms;
    tx.layer = LayerTag::Operational;
    tx.body = std::move(anchor);
    tx.seal(carrier_sk);
    return tx;
}

}  // namespace snft
