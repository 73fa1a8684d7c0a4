#pragma once

#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "snft/bytes.hpp"
#include "snft/error.hpp"
#include "snft/rng.hpp"

namespace snft::consensus {

// Leader-based crash-fault-tolerant replication over a deterministic
// discrete-event network. The whole cluster runs in one logical thread;
// every run is a pure function of (seed, fault script, workload).

struct LogEntry {
    uint64_t term = 0;
    std::string batch_id;
    std::vector<Digest> tx_ids;

    bool operator==(const LogEntry& o) const {
        return term == o.term && batch_id == o.batch_id && tx_ids == o.tx_ids;
    }
};

enum class NodeMode { Follower, Candidate, Leader };

inline const char* node_mode_name(NodeMode m) {
    switch (m) {
        case NodeMode::Follower: return "follower";
        case NodeMode::Candidate: return "candidate";
        case NodeMode::Leader: return "leader";
    }
    return "unknown";
}

struct RequestVote {
    uint64_t term;
    int candidate;
    uint64_t last_log_index;
    uint64_t last_log_term;
};
struct VoteReply {
    uint64_t term;
    bool granted;
    int voter;
};
struct AppendEntries {
    uint64_t term;
    int leader;
    uint64_t prev_index;
    uint64_t prev_term;
    std::vector<LogEntry> entries;
    uint64_t leader_commit;
};
struct AppendReply {
    uint64_t term;
    bool success;
    int follower;
    uint64_t match_index;
};
struct ClientPropose {
    std::string batch_id;
    std::vector<Digest> tx_ids;
};
struct ClientReply {
    bool accepted;      // true once the batch is committed
    int leader_hint;    // -1 if unknown
    std::string batch_id;
};

using Payload =
    std::variant<RequestVote, VoteReply, AppendEntries, AppendReply, ClientPropose, ClientReply>;

inline constexpr int kClientId = -1;

struct Message {
    int from = kClientId;
    int to = kClientId;
    Payload payload;
};

struct NodeConfig {
    int cluster_size = 3;
    uint64_t election_timeout_min_ms = 150;
    uint64_t election_timeout_max_ms = 300;
    uint64_t heartbeat_interval_ms = 50;
};

// One replica's state machine. step() and the message handlers are pure
// over (state, event, timeout draw); all randomness enters through the
// caller-provided timeout generator.
class RaftNode {
public:
    RaftNode(int id, NodeConfig cfg) : id_(id), cfg_(cfg) {}

    int id() const { return id_; }
    NodeMode mode() const { return mode_; }
    uint64_t term() const { return term_; }
    uint64_t commit_index() const { return commit_index_; }
    const std::vector<LogEntry>& log() const { return log_; }
    std::optional<int> voted_for() const { return voted_for_; }
    uint64_t election_deadline() const { return election_deadline_; }
    std::optional<int> known_leader() const { return known_leader_; }

    std::vector<LogEntry> committed_prefix() const {
        return {log_.begin(), log_.begin() + static_cast<long>(commit_index_)};
    }

    void reset_election_deadline(uint64_t now, Rng& timeout_rng) {
        election_deadline_ = now + cfg_.election_timeout_min_ms +
                             timeout_rng.uniform_u64(cfg_.election_timeout_max_ms -
                                                     cfg_.election_timeout_min_ms + 1);
    }

    // Volatile state is lost on crash; term, vote, and log persist as
    // if on stable storage.
    void on_restart(uint64_t now, Rng& timeout_rng) {
        mode_ = NodeMode::Follower;
        commit_index_ = 0;
        votes_.clear();
        known_leader_.reset();
        next_index_.clear();
        match_index_.clear();
        reset_election_deadline(now, timeout_rng);
    }

    std::vector<Message> on_timer(uint64_t now, Rng& timeout_rng) {
        std::vector<Message> out;
        if (mode_ == NodeMode::Leader) {
            if (now >= heartbeat_due_) {
                heartbeat_due_ = now + cfg_.heartbeat_interval_ms;
                broadcast_append(out);
            }
            return out;
        }
        if (now >= election_deadline_) start_election(now, timeout_rng, out);
        return out;
    }

    std::vector<Message> on_message(uint64_t now, const Message& m, Rng& timeout_rng) {
        std::vector<Message> out;
        std::visit(
            [&](const auto& p) { handle(now, m.from, p, timeout_rng, out); },
            m.payload);
        return out;
    }

    uint64_t heartbeat_due() const { return heartbeat_due_; }

    // test hooks
    void force_term(uint64_t t) { term_ = t; }
    void force_log(std::vector<LogEntry> log) {
        log_ = std::move(log);
        batch_ids_.clear();
        for (const auto& e : log_) batch_ids_.insert(e.batch_id);
    }

private:
    uint64_t last_log_index() const { return log_.size(); }
    uint64_t last_log_term() const { return log_.empty() ? 0 : log_.back().term; }
    size_t quorum() const { return static_cast<size_t>(cfg_.cluster_size) / 2 + 1; }

    void become_follower(uint64_t term, uint64_t now, Rng& timeout_rng) {
        mode_ = NodeMode::Follower;
        term_ = term;
        voted_for_.reset();
        votes_.clear();
        reset_election_deadline(now, timeout_rng);
    }

    void start_election(uint64_t now, Rng& timeout_rng, std::vector<Message>& out) {
        mode_ = NodeMode::Candidate;
        ++term_;
        voted_for_ = id_;
        votes_ = {id_};
        known_leader_.reset();
        reset_election_deadline(now, timeout_rng);
        for (int peer = 0; peer < cfg_.cluster_size; ++peer) {
            if (peer == id_) continue;
            out.push_back({id_, peer,
                           RequestVote{term_, id_, last_log_index(), last_log_term()}});
        }
        if (votes_.size() >= quorum()) become_leader(now, out);  // n=1 degenerate
    }

    void become_leader(uint64_t now, std::vector<Message>& out) {
        mode_ = NodeMode::Leader;
        known_leader_ = id_;
        next_index_.assign(cfg_.cluster_size, last_log_index() + 1);
        match_index_.assign(cfg_.cluster_size, 0);
        match_index_[id_] = last_log_index();
        heartbeat_due_ = now + cfg_.heartbeat_interval_ms;
        broadcast_append(out);
    }

    void broadcast_append(std::vector<Message>& out) {
        for (int peer = 0; peer < cfg_.cluster_size; ++peer) {
            if (peer == id_) continue;
            send_append(peer, out);
        }
    }

    void send_append(int peer, std::vector<Message>& out) {
        const uint64_t next = next_index_[peer];
        const uint64_t prev_index = next - 1;
        const uint64_t prev_term = prev_index == 0 ? 0 : log_[prev_index - 1].term;
        std::vector<LogEntry> entries(log_.begin() + static_cast<long>(prev_index), log_.end());
        out.push_back({id_, peer,
                       AppendEntries{term_, id_, prev_index, prev_term, std::move(entries),
                                     commit_index_}});
    }

    void handle(uint64_t now, int, const RequestVote& rv, Rng& timeout_rng,
                std::vector<Message>& out) {
        if (rv.term > term_) become_follower(rv.term, now, timeout_rng);
        bool granted = false;
        if (rv.term == term_ && mode_ == NodeMode::Follower &&
            (!voted_for_ || *voted_for_ == rv.candidate)) {
            const bool up_to_date =
                rv.last_log_term > last_log_term() ||
                (rv.last_log_term == last_log_term() && rv.last_log_index >= last_log_index());
            if (up_to_date) {
                granted = true;
                voted_for_ = rv.candidate;
                reset_election_deadline(now, timeout_rng);
            }
        }
        out.push_back({id_, rv.candidate, VoteReply{term_, granted, id_}});
    }

    void handle(uint64_t now, int, const VoteReply& vr, Rng&, std::vector<Message>& out) {
        if (mode_ != NodeMode::Candidate || vr.term != term_ || !vr.granted) return;
        votes_.insert(vr.voter);
        if (votes_.size() >= quorum()) become_leader(now, out);
    }

    void handle(uint64_t now, int, const AppendEntries& ae, Rng& timeout_rng,
                std::vector<Message>& out) {
        if (ae.term > term_ || (ae.term == term_ && mode_ == NodeMode::Candidate))
            become_follower(ae.term, now, timeout_rng);
        if (ae.term < term_) {
            out.push_back({id_, ae.leader, AppendReply{term_, false, id_, 0}});
            return;
        }
        // valid leader for this term
        known_leader_ = ae.leader;
        reset_election_deadline(now, timeout_rng);
        if (ae.prev_index > log_.size() ||
            (ae.prev_index > 0 && log_[ae.prev_index - 1].term != ae.prev_term)) {
            out.push_back({id_, ae.leader, AppendReply{term_, false, id_, 0}});
            return;
        }
        // append, truncating any conflicting suffix
        uint64_t idx = ae.prev_index;
        for (const auto& entry : ae.entries) {
            ++idx;
            if (idx <= log_.size()) {
                if (log_[idx - 1].term == entry.term) continue;
                for (size_t i = idx - 1; i < log_.size(); ++i) batch_ids_.erase(log_[i].batch_id);
                log_.resize(idx - 1);
            }
            log_.push_back(entry);
            batch_ids_.insert(entry.batch_id);
        }
        const uint64_t last_new = ae.prev_index + ae.entries.size();
        if (ae.leader_commit > commit_index_)
            commit_index_ = std::min(ae.leader_commit, last_new);
        out.push_back({id_, ae.leader, AppendReply{term_, true, id_, last_new}});
    }

    void handle(uint64_t now, int, const AppendReply& ar, Rng& timeout_rng,
                std::vector<Message>& out) {
        if (ar.term > term_) {
            become_follower(ar.term, now, timeout_rng);
            return;
        }
        if (mode_ != NodeMode::Leader || ar.term != term_) return;
        if (ar.success) {
            match_index_[ar.follower] = std::max(match_index_[ar.follower], ar.match_index);
            next_index_[ar.follower] = match_index_[ar.follower] + 1;
            advance_commit();
        } else {
            if (next_index_[ar.follower] > 1) --next_index_[ar.follower];
            send_append(ar.follower, out);
        }
    }

    void handle(uint64_t now, int from, const ClientPropose& cp, Rng&, std::vector<Message>& out) {
        if (mode_ != NodeMode::Leader) {
            out.push_back({id_, from,
                           ClientReply{false, known_leader_.value_or(-1), cp.batch_id}});
            return;
        }
        if (!batch_ids_.count(cp.batch_id)) {
            log_.push_back(LogEntry{term_, cp.batch_id, cp.tx_ids});
            batch_ids_.insert(cp.batch_id);
            match_index_[id_] = last_log_index();
            heartbeat_due_ = now + cfg_.heartbeat_interval_ms;
            broadcast_append(out);
            advance_commit();
        } else if (committed_batch(cp.batch_id)) {
            out.push_back({id_, from, ClientReply{true, id_, cp.batch_id}});
        }
        // duplicate still in flight: silence; client retries until committed
    }

    void handle(uint64_t, int, const ClientReply&, Rng&, std::vector<Message>&) {}

    bool committed_batch(const std::string& batch_id) const {
        for (uint64_t i = 0; i < commit_index_; ++i)
            if (log_[i].batch_id == batch_id) return true;
        return false;
    }

    // commit rule: only entries of the current term count directly
    void advance_commit() {
        for (uint64_t n = last_log_index(); n > commit_index_; --n) {
            if (log_[n - 1].term != term_) break;
            size_t replicas = 0;
            for (int peer = 0; peer < cfg_.cluster_size; ++peer)
                if (match_index_[peer] >= n) ++replicas;
            if (replicas >= quorum()) {
                commit_index_ = n;
                break;
            }
        }
    }

    int id_;
    NodeConfig cfg_;
    NodeMode mode_ = NodeMode::Follower;
    uint64_t term_ = 0;
    std::optional<int> voted_for_;
    std::vector<LogEntry> log_;
    uint64_t commit_index_ = 0;
    std::optional<int> known_leader_;
    std::set<int> votes_;
    std::vector<uint64_t> next_index_;
    std::vector<uint64_t> match_index_;
    std::set<std::string> batch_ids_;
    uint64_t election_deadline_ = 0;
    uint64_t heartbeat_due_ = 0;
};

// ---- deterministic network simulation ----

enum class FaultKind { CrashNode, RestartNode, Partition, Heal };

inline const char* fault_kind_name(FaultKind k) {
    switch (k) {
        case FaultKind::CrashNode: return "crash_node";
        case FaultKind::RestartNode: return "restart_node";
        case FaultKind::Partition: return "partition";
        case FaultKind::Heal: return "heal";
    }
    return "unknown";
}

inline FaultKind fault_kind_from_name(std::string_view name) {
    for (FaultKind k : {FaultKind::CrashNode, FaultKind::RestartNode, FaultKind::Partition,
                        FaultKind::Heal})
        if (name == fault_kind_name(k)) return k;
    throw Error(Errc::ParseError, "unknown fault kind: " + std::string(name));
}

struct FaultEvent {
    uint64_t at_ms = 0;
    FaultKind kind = FaultKind::CrashNode;
    std::vector<int> nodes;  // crash/restart: one node; partition: the isolated group
};

struct WorkloadItem {
    uint64_t at_ms = 0;
    std::string batch_id;
    std::vector<Digest> tx_ids;
};

struct NetworkConfig {
    uint64_t latency_min_ms = 5;
    uint64_t latency_max_ms = 30;
    double drop_rate = 0.0;
};

struct TraceEvent {
    uint64_t at_ms = 0;
    std::string kind;
    nlohmann::json detail;

    nlohmann::json to_json() const { return {{"at_ms", at_ms}, {"kind", kind}, {"detail", detail}}; }
};

struct SimResult {
    std::vector<TraceEvent> trace;
    std::vector<std::vector<LogEntry>> committed_logs;  // per node at end of run
    std::vector<std::pair<uint64_t, int>> leaders_per_term;  // (term, node) observations
    std::map<std::string, uint64_t> submit_ms;   // batch -> first submission
    std::map<std::string, uint64_t> commit_ms;   // batch -> first cluster commit
    std::vector<LogEntry> committed_sequence;    // longest committed prefix across nodes
    uint64_t end_ms = 0;

    std::string trace_ndjson() const {
        std::string out;
        for (const auto& e : trace) out += e.to_json().dump() + "\n";
        return out;
    }
};

struct SimParams {
    int cluster_size = 3;
    NodeConfig node;
    NetworkConfig network;
    uint64_t duration_ms = 30'000;
    uint64_t client_retry_ms = 400;
    bool stop_when_workload_committed = false;
};

class Cluster {
public:
    Cluster(SimParams params, uint64_t seed)
        : params_(params), net_rng_(Rng(seed).fork(1000)) {
        if (params.cluster_size < 3 || params.cluster_size % 2 == 0)
            throw Error(Errc::InvalidClusterSize, std::to_string(params.cluster_size));
        params_.node.cluster_size = params.cluster_size;
        Rng master(seed);
        for (int i = 0; i < params.cluster_size; ++i) {
            nodes_.emplace_back(i, params_.node);
            timeout_rngs_.push_back(master.fork(static_cast<uint64_t>(i) + 1));
            alive_.push_back(true);
            timer_due_.emplace_back();
            recorded_commit_.push_back(0);
        }
        client_rng_ = master.fork(2000);
        for (int i = 0; i < params.cluster_size; ++i) {
            nodes_[i].reset_election_deadline(0, timeout_rngs_[i]);
            schedule_timer(i, nodes_[i].election_deadline());
        }
    }

    void inject_fault(const FaultEvent& fault) {
        for (int n : fault.nodes)
            if (n < 0 || n >= params_.cluster_size)
                throw Error(Errc::UnknownNode, std::to_string(n));
        push(fault.at_ms, EventKind::Fault, Message{}, fault);
    }

    void submit(const WorkloadItem& item) {
        ++expected_submits_;
        push(item.at_ms, EventKind::ClientSubmit, Message{}, FaultEvent{}, item);
    }

    SimResult run() {
        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            if (ev.at_ms > params_.duration_ms) break;
            now_ = ev.at_ms;
            dispatch(ev);
            if (params_.stop_when_workload_committed && pending_.empty() &&
                seen_submits_ == expected_submits_)
                break;
        }
        SimResult res;
        res.trace = std::move(trace_);
        res.leaders_per_term = leaders_per_term_;
        res.submit_ms = submit_ms_;
        res.commit_ms = commit_ms_;
        res.end_ms = now_;
        size_t best = 0;
        for (const auto& node : nodes_) {
            res.committed_logs.push_back(node.committed_prefix());
            if (node.commit_index() > nodes_[best].commit_index())
                best = static_cast<size_t>(node.id());
        }
        res.committed_sequence = nodes_[best].committed_prefix();
        return res;
    }

    const RaftNode& node(int i) const { return nodes_[static_cast<size_t>(i)]; }

private:
    enum class EventKind { Deliver, TimerFire, Fault, ClientSubmit, ClientRetry };

    struct Event {
        uint64_t at_ms;
        uint64_t seq;
        EventKind kind;
        Message msg;          // Deliver
        FaultEvent fault;     // Fault
        WorkloadItem item;    // ClientSubmit
        int timer_node = 0;   // TimerFire
        std::string retry_batch;  // ClientRetry

        bool operator>(const Event& o) const {
            if (at_ms != o.at_ms) return at_ms > o.at_ms;
            return seq > o.seq;
        }
    };

    void push(uint64_t at, EventKind kind, Message msg = {}, FaultEvent fault = {},
              WorkloadItem item = {}, int timer_node = 0, std::string retry_batch = {}) {
        queue_.push(Event{at, seq_++, kind, std::move(msg), std::move(fault), std::move(item),
                          timer_node, std::move(retry_batch)});
    }

    // one live timer chain per node: rescheduling later than an already
    // queued fire is a no-op, keeping the event count linear in sim time
    void schedule_timer(int node, uint64_t at) {
        auto& due = timer_due_[static_cast<size_t>(node)];
        if (due && *due <= at) return;
        due = at;
        Event ev{at, seq_++, EventKind::TimerFire, {}, {}, {}, node, {}};
        queue_.push(std::move(ev));
    }

    bool severed(int a, int b) const {
        return severed_.count({std::min(a, b), std::max(a, b)}) > 0;
    }

    void send(const Message& m) {
        // drop and latency draws happen for every send so the stream
        // stays aligned regardless of partitions
        const bool dropped = params_.network.drop_rate > 0.0 &&
                             net_rng_.bernoulli(params_.network.drop_rate);
        const uint64_t latency =
            params_.network.latency_min_ms +
            net_rng_.uniform_u64(params_.network.latency_max_ms - params_.network.latency_min_ms + 1);
        if (dropped) return;
        push(now_ + latency, EventKind::Deliver, m);
    }

    void emit(const std::vector<Message>& msgs) {
        for (const auto& m : msgs) send(m);
    }

    void trace(std::string kind, nlohmann::json detail) {
        trace_.push_back({now_, std::move(kind), std::move(detail)});
    }

    void after_node_step(int i, NodeMode mode_before, uint64_t term_before) {
        RaftNode& nd = nodes_[static_cast<size_t>(i)];
        if (nd.mode() == NodeMode::Leader &&
            (mode_before != NodeMode::Leader || term_before != nd.term())) {
            leaders_per_term_.emplace_back(nd.term(), i);
            trace("become_leader", {{"node", i}, {"term", nd.term()}});
        }
        // next timer for this node
        const uint64_t due = nd.mode() == NodeMode::Leader ? nd.heartbeat_due()
                                                           : nd.election_deadline();
        schedule_timer(i, due);
        record_commits(i);
    }

    void record_commits(int i) {
        const RaftNode& nd = nodes_[static_cast<size_t>(i)];
        const auto& log = nd.log();
        uint64_t& from = recorded_commit_[static_cast<size_t>(i)];
        for (uint64_t idx = from + 1; idx <= nd.commit_index(); ++idx) {
            const std::string& batch = log[idx - 1].batch_id;
            auto [it, fresh] = commit_ms_.emplace(batch, now_);
            if (fresh) {
                trace("commit", {{"batch_id", batch}, {"index", idx}, {"node", i}});
                pending_.erase(batch);
            }
        }
        from = std::max(from, nd.commit_index());
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EventKind::Deliver: {
                const int to = ev.msg.to;
                if (to == kClientId) {
                    on_client_message(ev.msg);
                    return;
                }
                if (!alive_[static_cast<size_t>(to)]) return;
                if (ev.msg.from != kClientId && severed(ev.msg.from, to)) return;
                RaftNode& nd = nodes_[static_cast<size_t>(to)];
                const NodeMode before_mode = nd.mode();
                const uint64_t before_term = nd.term();
                emit(nd.on_message(now_, ev.msg, timeout_rngs_[static_cast<size_t>(to)]));
                after_node_step(to, before_mode, before_term);
                break;
            }
            case EventKind::TimerFire: {
                const int i = ev.timer_node;
                auto& due = timer_due_[static_cast<size_t>(i)];
                if (!due || *due != ev.at_ms) return;  // superseded chain
                due.reset();
                if (!alive_[static_cast<size_t>(i)]) return;
                RaftNode& nd = nodes_[static_cast<size_t>(i)];
                const NodeMode before_mode = nd.mode();
                const uint64_t before_term = nd.term();
                emit(nd.on_timer(now_, timeout_rngs_[static_cast<size_t>(i)]));
                after_node_step(i, before_mode, before_term);
                break;
            }
            case EventKind::Fault: apply_fault(ev.fault); break;
            case EventKind::ClientSubmit: {
                submit_ms_.emplace(ev.item.batch_id, now_);
                pending_[ev.item.batch_id] = ev.item;
                ++seen_submits_;
                trace("submit", {{"batch_id", ev.item.batch_id}});
                client_send(ev.item);
                break;
            }
            case EventKind::ClientRetry: {
                auto it = pending_.find(ev.retry_batch);
                if (it == pending_.end()) return;  // committed meanwhile
                // silence means the target is dead or unreachable: rotate.
                // a reply (even a rejection) carried a leader hint instead.
                if (!client_reply_seen_)
                    client_target_ = (client_target_ + 1) % params_.cluster_size;
                client_reply_seen_ = false;
                client_send(it->second);
                break;
            }
        }
    }

    void client_send(const WorkloadItem& item) {
        send({kClientId, client_target_, ClientPropose{item.batch_id, item.tx_ids}});
        push(now_ + params_.client_retry_ms, EventKind::ClientRetry, {}, {}, {}, 0, item.batch_id);
    }

    void on_client_message(const Message& m) {
        const auto& reply = std::get<ClientReply>(m.payload);
        client_reply_seen_ = true;
        // a batch stays pending until a node commits it; acceptance only
        // means it reached a leader's log, which a crash can still lose
        if (reply.accepted) return;
        if (reply.leader_hint >= 0) client_target_ = reply.leader_hint;
        // resubmission happens on the already-scheduled retry timer
    }

    void apply_fault(const FaultEvent& f) {
        trace(fault_kind_name(f.kind), {{"nodes", f.nodes}});
        switch (f.kind) {
            case FaultKind::CrashNode:
                for (int n : f.nodes) alive_[static_cast<size_t>(n)] = false;
                break;
            case FaultKind::RestartNode:
                for (int n : f.nodes) {
                    alive_[static_cast<size_t>(n)] = true;
                    nodes_[static_cast<size_t>(n)].on_restart(now_, timeout_rngs_[static_cast<size_t>(n)]);
                    schedule_timer(n, nodes_[static_cast<size_t>(n)].election_deadline());
                }
                break;
            case FaultKind::Partition: {
                std::set<int> group(f.nodes.begin(), f.nodes.end());
                for (int a = 0; a < params_.cluster_size; ++a)
                    for (int b = a + 1; b < params_.cluster_size; ++b)
                        if (group.count(a) != group.count(b))
                            severed_.insert({a, b});
                break;
            }
            case FaultKind::Heal: severed_.clear(); break;
        }
    }

    SimParams params_;
    std::vector<RaftNode> nodes_;
    std::vector<Rng> timeout_rngs_;
    Rng net_rng_{0};
    Rng client_rng_{0};
    std::vector<bool> alive_;
    std::set<std::pair<int, int>> severed_;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
    uint64_t seq_ = 0;
    uint64_t now_ = 0;
    std::vector<TraceEvent> trace_;
    std::vector<std::pair<uint64_t, int>> leaders_per_term_;
    std::map<std::string, uint64_t> submit_ms_;
    std::map<std::string, uint64_t> commit_ms_;
    std::map<std::string, WorkloadItem> pending_;
    std::vector<std::optional<uint64_t>> timer_due_;  // queued fire per node
    std::vector<uint64_t> recorded_commit_;
    int client_target_ = 0;
    bool client_reply_seen_ = false;
    size_t expected_submits_ = 0;
    size_t seen_submits_ = 0;
};

inline SimResult run_simulation(int cluster_size, const std::vector<FaultEvent>& faults,
                                const std::vector<WorkloadItem>& workload, uint64_t seed,
                                SimParams params = {}) {
    params.cluster_size = cluster_size;
    Cluster cluster(params, seed);
    for (const auto& f : faults) cluster.inject_fault(f);
    for (const auto& w : workload) cluster.submit(w);
    return cluster.run();
}

// ---- scenario script (JSON) ----

inline std::vector<FaultEvent> fault_script_from_json(const nlohmann::json& j) {
    std::vector<FaultEvent> out;
    for (const auto& fj : j) {
        FaultEvent f;
        f.at_ms = fj.at("at_ms").get<uint64_t>();
        f.kind = fault_kind_from_name(fj.at("kind").get<std::string>());
        if (fj.contains("nodes"))
            for (const auto& n : fj.at("nodes")) f.nodes.push_back(n.get<int>());
        else if (fj.contains("node"))
            f.nodes.push_back(fj.at("node").get<int>());
        out.push_back(std::move(f));
    }
    return out;
}

// ---- trace oracles (post-hoc assertions over SimResult) ----

// Log matching: any two committed prefixes agree entry-by-entry.
inline bool check_log_matching(const SimResult& res) {
    for (size_t a = 0; a < res.committed_logs.size(); ++a)
        for (size_t b = a + 1; b < res.committed_logs.size(); ++b) {
            const auto& la = res.committed_logs[a];
            const auto& lb = res.committed_logs[b];
            const size_t common = std::min(la.size(), lb.size());
            for (size_t i = 0; i < common; ++i)
                if (!(la[i] == lb[i])) return false;
        }
    return true;
}

// Election safety: at most one leader observed per term.
inline bool check_election_safety(const SimResult& res) {
    std::map<uint64_t, int> leader_by_term;
    for (const auto& [term, node] : res.leaders_per_term) {
        auto [it, fresh] = leader_by_term.emplace(term, node);
        if (!fresh && it->second != node) return false;
    }
    return true;
}

// Exactly-once: no batch id appears twice in any committed log.
inline bool check_exactly_once(const SimResult& res) {
    for (const auto& log : res.committed_logs) {
        std::set<std::string> seen;
        for (const auto& e : log)
            if (!seen.insert(e.batch_id).second) return false;
    }
    return true;
}

}  // namespace snft::consensus
