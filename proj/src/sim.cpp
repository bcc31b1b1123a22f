#include "wfdgm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace wfdgm {

namespace {

// rng stream tags; keep them fixed so runs stay reproducible across versions
constexpr uint64_t kStreamCapacity = 0x11c0ull;
constexpr uint64_t kStreamProtocol = 0x5040000ull;

bool in_range_sq(const Position& a, const Position& b, double range_sq)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy <= range_sq;
}

uint64_t exact_ticks(double period, double tick, const char* what)
{
    const double q = period / tick;
    const auto n = static_cast<uint64_t>(std::llround(q));
    if (n == 0 || std::abs(q - static_cast<double>(n)) > 1e-9) {
        throw std::runtime_error(std::string(what) + " must be a positive multiple of tick");
    }
    return n;
}

} // namespace

const char* protocol_name(Protocol p) { return p == Protocol::Wfdgm ? "wfdgm" : "baseline"; }

void SimConfig::validate() const
{
    if (node_count == 0) {
        throw std::runtime_error("node_count must be positive");
    }
    if (tick <= 0.0) {
        throw std::runtime_error("tick must be positive");
    }
    if (proto.t_d < tick) {
        throw std::runtime_error("t_d must be at least one tick");
    }
    if (duration < 0.0) {
        throw std::runtime_error("duration must be non-negative");
    }
    const double dq = duration / tick;
    if (std::abs(dq - std::round(dq)) > 1e-9) {
        throw std::runtime_error("duration must be a multiple of tick");
    }
    exact_ticks(proto.t_d, tick, "t_d");
    exact_ticks(proto.t_st > 0 ? proto.t_st : proto.t_d, tick, "t_st");
    exact_ticks(reach_sample_period, tick, "reach_sample_period");
    exact_ticks(diffusion_sample_period, tick, "diffusion_sample_period");
    if (capacity_min < 1 || capacity_min > capacity_max) {
        throw std::runtime_error("capacity range must satisfy 1 <= min <= max");
    }
    if (radio_range <= 0.0) {
        throw std::runtime_error("radio_range must be positive");
    }
    if (proto.res_th <= 0.0 || proto.res_th >= 1.0) {
        throw std::runtime_error("res_th must lie in (0,1)");
    }
    if (proto.p0 <= 0.0 || proto.p0 > 1.0) {
        throw std::runtime_error("p0 must lie in (0,1]");
    }
    const double wsum = proto.weights.sum();
    if (std::abs(wsum - 1.0) > 1e-9) {
        throw std::runtime_error("suitability weights must sum to 1");
    }
    if (std::abs(proto.w_st_prev + proto.w_st_mean - 1.0) > 1e-9) {
        throw std::runtime_error("stability weights must sum to 1");
    }
    if (proto.norm.pp_max <= 0.0 || proto.norm.c_max <= 0.0) {
        throw std::runtime_error("normalization caps must be positive");
    }
}

uint32_t RunResult::alive_count() const
{
    uint32_t n = 0;
    for (const auto a : alive) {
        n += a;
    }
    return n;
}

std::vector<double> RunResult::battery_metric_values() const
{
    if (!all_dead()) {
        return final_levels;
    }
    std::vector<double> out;
    out.reserve(discharge_time.size());
    for (const double t : discharge_time) {
        out.push_back(duration > 0 ? t / duration : 0.0);
    }
    return out;
}

std::vector<std::vector<uint32_t>> proximity_sets(std::span<const Position> positions,
                                                  std::span<const uint8_t> alive,
                                                  double radio_range)
{
    const auto n = static_cast<uint32_t>(positions.size());
    std::vector<std::vector<uint32_t>> nbrs(n);
    const double range_sq = radio_range * radio_range;

    // uniform cell binning; degenerates gracefully when everything fits one cell
    const double cell = radio_range;
    std::map<std::pair<int64_t, int64_t>, std::vector<uint32_t>> bins;
    for (uint32_t i = 0; i < n; ++i) {
        if (!alive[i]) {
            continue;
        }
        bins[{static_cast<int64_t>(std::floor(positions[i].x / cell)),
              static_cast<int64_t>(std::floor(positions[i].y / cell))}]
            .push_back(i);
    }
    for (const auto& [key, members] : bins) {
        for (int64_t dx = -1; dx <= 1; ++dx) {
            for (int64_t dy = -1; dy <= 1; ++dy) {
                auto it = bins.find({key.first + dx, key.second + dy});
                if (it == bins.end()) {
                    continue;
                }
                for (const uint32_t i : members) {
                    for (const uint32_t j : it->second) {
                        if (j != i && in_range_sq(positions[i], positions[j], range_sq)) {
                            nbrs[i].push_back(j);
                        }
                    }
                }
            }
        }
    }
    for (auto& list : nbrs) {
        std::sort(list.begin(), list.end());
    }
    return nbrs;
}

// ---------------------------------------------------------------------------
// Env: the per-node capability handle
// ---------------------------------------------------------------------------

class Simulation::Env : public LinkLayer {
  public:
    Env(Simulation& sim, uint32_t node) : sim_(sim), node_(node) {}

    void connect(NodeId target) override
    {
        sim_.queue_.push_back({Intent::Kind::Connect, node_, target, {}, {}});
    }
    void disconnect() override
    {
        sim_.queue_.push_back({Intent::Kind::Disconnect, node_, {}, {}, {}});
    }
    void send(const ControlMessage& msg, NodeId dest) override
    {
        sim_.queue_.push_back({Intent::Kind::Send, node_, dest, msg, {}});
    }
    void broadcast(const ControlMessage& msg, const std::set<NodeId>& recipients) override
    {
        sim_.queue_.push_back({Intent::Kind::Broadcast, node_, {}, msg,
                               std::vector<NodeId>(recipients.begin(), recipients.end())});
    }
    bool in_proximity(NodeId who) const override
    {
        const auto& list = sim_.nbrs_[node_];
        return std::binary_search(list.begin(), list.end(), who.ordinal);
    }
    double draw() override { return sim_.proto_rng_[node_].uniform01(); }
    std::pair<Token, Token> fresh_group() override
    {
        const Token group_id = ++sim_.token_counter_;
        const Token credentials = ++sim_.token_counter_;
        return {group_id, credentials};
    }
    void trace(TraceKind kind, uint32_t a, uint32_t b, double x) override
    {
        sim_.trace_event(node_, kind, a, b, x);
    }

  private:
    Simulation& sim_;
    uint32_t node_;
};

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

Simulation::Simulation(const SimConfig& cfg, std::unique_ptr<Mobility> mobility)
    : cfg_(cfg), mobility_(std::move(mobility))
{
    cfg_.validate();
    if (cfg_.proto.t_st <= 0.0) {
        cfg_.proto.t_st = cfg_.proto.t_d;
    }
    if (mobility_->node_count() != cfg_.node_count) {
        throw std::runtime_error("mobility model node count does not match config");
    }
    td_ticks_ = exact_ticks(cfg_.proto.t_d, cfg_.tick, "t_d");
    tst_ticks_ = exact_ticks(cfg_.proto.t_st, cfg_.tick, "t_st");
    reach_ticks_ = exact_ticks(cfg_.reach_sample_period, cfg_.tick, "reach_sample_period");
    diff_ticks_ = exact_ticks(cfg_.diffusion_sample_period, cfg_.tick,
                              "diffusion_sample_period");
}

Simulation::~Simulation() = default;

void Simulation::trace_event(uint32_t node, TraceKind kind, uint32_t a, uint32_t b, double x)
{
    if (cfg_.collect_trace) {
        trace_.push_back({now_, node, kind, a, b, x});
    }
}

void Simulation::boot_nodes()
{
    const uint32_t n = cfg_.node_count;
    pos_ = mobility_->initial_positions();
    alive_.assign(n, 1);
    prev_levels_.assign(n, 1.0);
    death_time_.assign(n, -1.0);
    nbrs_.assign(n, {});
    prev_nbrs_.assign(n, {});
    published_.assign(n, {});

    Rng cap_rng(cfg_.seed, kStreamCapacity);
    proto_rng_.reserve(n);
    nodes_.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        proto_rng_.emplace_back(cfg_.seed, kStreamProtocol + i);
    }
    for (uint32_t i = 0; i < n; ++i) {
        const uint32_t capacity = cap_rng.uniform_int(cfg_.capacity_min, cfg_.capacity_max);
        Env env(*this, i);
        if (cfg_.protocol == Protocol::Wfdgm) {
            nodes_.push_back(std::make_unique<WfdgmNode>(NodeId{i}, cfg_.proto, capacity, env));
        } else {
            nodes_.push_back(std::make_unique<BaselineNode>(NodeId{i}, capacity, env));
        }
    }
    publish_records();

    diffusion_ = DiffusionState(n);
    cg_ = ConnectivityGraph(n);
    reach_ = ReachabilitySamples(n);
}

void Simulation::rebuild_neighbors()
{
    nbrs_ = proximity_sets(pos_, alive_, cfg_.radio_range);
    nbrs_dirty_ = false;
}

void Simulation::enforce_link_range()
{
    const double range_sq = cfg_.radio_range * cfg_.radio_range;
    for (uint32_t o = 0; o < cfg_.node_count; ++o) {
        if (!alive_[o] || nodes_[o]->group().members.empty()) {
            continue;
        }
        std::vector<NodeId> gone;
        for (const NodeId m : nodes_[o]->group().members) {
            if (!in_range_sq(pos_[o], pos_[m.ordinal], range_sq)) {
                gone.push_back(m);
            }
        }
        for (const NodeId m : gone) {
            trace_event(m.ordinal, TraceKind::LinkBreak, o, 0, 0.0);
            Env owner_env(*this, o);
            nodes_[o]->on_member_left(m, owner_env);
            Env member_env(*this, m.ordinal);
            nodes_[m.ordinal]->on_group_dissolved(member_env);
        }
    }
}

void Simulation::fold_neighbor_changes()
{
    for (uint32_t i = 0; i < cfg_.node_count; ++i) {
        if (!alive_[i] || nbrs_[i] == prev_nbrs_[i]) {
            continue;
        }
        std::set<NodeId> current;
        for (const uint32_t j : nbrs_[i]) {
            current.insert(NodeId{j});
        }
        nodes_[i]->note_neighbors(current);
        prev_nbrs_[i] = nbrs_[i];
    }
}

void Simulation::run_protocol_phase(uint64_t tick_index)
{
    for (uint32_t i = 0; i < cfg_.node_count; ++i) {
        if (!alive_[i]) {
            continue;
        }
        // phase-staggered decisions: node i fires on ticks that match its
        // ordinal modulo the period
        if (tick_index % td_ticks_ == i % td_ticks_) {
            scratch_records_.clear();
            for (const uint32_t j : nbrs_[i]) {
                scratch_records_.push_back(published_[j]);
            }
            Env env(*this, i);
            nodes_[i]->tick(now_, scratch_records_, env);
        }
    }
}

void Simulation::apply_connect(uint32_t requester, NodeId target)
{
    trace_event(requester, TraceKind::ConnectReq, target.ordinal, 0, 0.0);
    ProtocolNode& req = *nodes_[requester];
    Env req_env(*this, requester);

    auto reject = [&](ConnectReject why, uint32_t size) {
        trace_event(requester, TraceKind::ConnectRej, target.ordinal,
                    static_cast<uint32_t>(why), 0.0);
        req.on_connect_rejected(target, why, size);
    };

    if (target.ordinal >= cfg_.node_count || target.ordinal == requester ||
        !alive_[target.ordinal]) {
        reject(ConnectReject::TargetNotGO, 0);
        return;
    }
    ProtocolNode& tgt = *nodes_[target.ordinal];
    if (!owns_group(tgt.role())) {
        reject(ConnectReject::TargetNotGO, 0);
        return;
    }
    if (req.role() == Role::Client || !req.group().members.empty()) {
        reject(ConnectReject::RequesterBusy, 0);
        return;
    }
    if (!in_range_sq(pos_[requester], pos_[target.ordinal],
                     cfg_.radio_range * cfg_.radio_range)) {
        reject(ConnectReject::OutOfRange, static_cast<uint32_t>(tgt.group().members.size()));
        return;
    }
    if (tgt.group().full()) {
        reject(ConnectReject::CapacityFull, static_cast<uint32_t>(tgt.group().members.size()));
        return;
    }

    // committed: exchange caches with the owner and every current member
    std::vector<NodeId> peers;
    peers.push_back(target);
    peers.insert(peers.end(), tgt.group().members.begin(), tgt.group().members.end());
    diffusion_.on_join(NodeId{requester}, peers);

    req.on_connected(target, tgt.group().group_id);
    Env tgt_env(*this, target.ordinal);
    tgt.on_member_joined(NodeId{requester}, tgt_env);
    trace_event(requester, TraceKind::ConnectOk, target.ordinal,
                static_cast<uint32_t>(tgt.group().members.size()), 0.0);
}

void Simulation::apply_disconnect(uint32_t node)
{
    ProtocolNode& client = *nodes_[node];
    if (client.role() != Role::Client || !client.current_go()) {
        return; // already reverted by another event this tick
    }
    const uint32_t go = client.current_go()->ordinal;
    trace_event(node, TraceKind::Disconnect, go, 0, 0.0);
    Env owner_env(*this, go);
    nodes_[go]->on_member_left(NodeId{node}, owner_env);
    Env client_env(*this, node);
    client.on_disconnected(client_env);
}

void Simulation::deliver(const ControlMessage& msg, uint32_t from, uint32_t to)
{
    trace_event(from, TraceKind::MsgSend, static_cast<uint32_t>(msg.kind), to, 0.0);
    if (to >= cfg_.node_count || !alive_[to]) {
        return;
    }
    trace_event(to, TraceKind::MsgDeliver, static_cast<uint32_t>(msg.kind), from, 0.0);
    Env env(*this, to);
    nodes_[to]->on_message(msg, now_, env);
}

void Simulation::process_intents()
{
    while (cursor_ < queue_.size()) {
        const Intent intent = queue_[cursor_++]; // by value: cascades reallocate
        if (!alive_[intent.issuer]) {
            continue;
        }
        switch (intent.kind) {
        case Intent::Kind::Connect:
            apply_connect(intent.issuer, intent.target);
            break;
        case Intent::Kind::Disconnect:
            apply_disconnect(intent.issuer);
            break;
        case Intent::Kind::Send:
            deliver(intent.msg, intent.issuer, intent.target.ordinal);
            break;
        case Intent::Kind::Broadcast:
            for (const NodeId r : intent.recipients) {
                deliver(intent.msg, intent.issuer, r.ordinal);
            }
            break;
        }
    }
    queue_.clear();
    cursor_ = 0;
}

void Simulation::update_batteries_and_deaths()
{
    const double end = now_ + cfg_.tick;
    bool any_death = false;
    for (uint32_t i = 0; i < cfg_.node_count; ++i) {
        if (!alive_[i]) {
            continue;
        }
        ProtocolNode& node = *nodes_[i];
        update_battery(node.battery(), node.role(),
                       static_cast<uint32_t>(node.group().members.size()), cfg_.tick,
                       cfg_.battery);
        if (node.battery().dead()) {
            any_death = true;
        }
    }
    if (!any_death) {
        return;
    }
    for (uint32_t i = 0; i < cfg_.node_count; ++i) {
        if (!alive_[i] || !nodes_[i]->battery().dead()) {
            continue;
        }
        ProtocolNode& node = *nodes_[i];
        alive_[i] = 0;
        death_time_[i] = end;
        trace_event(i, TraceKind::Death, 0, 0, end);
        if (node.role() == Role::Client && node.current_go()) {
            const uint32_t go = node.current_go()->ordinal;
            if (alive_[go]) {
                Env owner_env(*this, go);
                nodes_[go]->on_member_left(NodeId{i}, owner_env);
            }
        } else if (!node.group().members.empty()) {
            trace_event(i, TraceKind::DeathDissolve, 0,
                        static_cast<uint32_t>(node.group().members.size()), end);
            const std::set<NodeId> members = node.group().members;
            node.group().members.clear();
            for (const NodeId m : members) {
                if (alive_[m.ordinal]) {
                    Env env(*this, m.ordinal);
                    nodes_[m.ordinal]->on_group_dissolved(env);
                }
            }
        }
        published_[i] = ServiceRecord{};
        nbrs_dirty_ = true;
    }
    process_intents(); // GROUP_INFO broadcasts triggered by removals
}

void Simulation::accumulate_metrics(uint64_t tick_index)
{
    // contact time: every pair inside a group, owner included
    std::vector<uint32_t> cluster;
    for (uint32_t o = 0; o < cfg_.node_count; ++o) {
        if (!alive_[o]) {
            continue;
        }
        const auto& members = nodes_[o]->group().members;
        if (members.empty() || !owns_group(nodes_[o]->role())) {
            continue;
        }
        cluster.clear();
        cluster.push_back(o);
        for (const NodeId m : members) {
            cluster.push_back(m.ordinal);
        }
        for (std::size_t i = 0; i < cluster.size(); ++i) {
            for (std::size_t j = i + 1; j < cluster.size(); ++j) {
                cg_.add_contact(NodeId{cluster[i]}, NodeId{cluster[j]}, cfg_.tick);
            }
        }
    }

    const uint64_t done = tick_index + 1;
    if (done % reach_ticks_ == 0) {
        scratch_edges_.clear();
        for (uint32_t o = 0; o < cfg_.node_count; ++o) {
            if (!alive_[o]) {
                continue;
            }
            for (const NodeId m : nodes_[o]->group().members) {
                scratch_edges_.push_back({o, m.ordinal});
            }
        }
        reach_.sample(scratch_edges_);
    }
    if (done % diff_ticks_ == 0) {
        diffusion_.sample(now_ + cfg_.tick);
    }
}

void Simulation::publish_records()
{
    for (uint32_t i = 0; i < cfg_.node_count; ++i) {
        if (alive_[i]) {
            published_[i] =
                nodes_[i]->make_record(static_cast<uint32_t>(nbrs_[i].size()));
        }
    }
}

void Simulation::check_invariants() const
{
    std::vector<uint8_t> membership(cfg_.node_count, 0);
    std::size_t member_total = 0;
    uint32_t client_total = 0;
    for (uint32_t i = 0; i < cfg_.node_count; ++i) {
        if (!alive_[i]) {
            continue;
        }
        const ProtocolNode& node = *nodes_[i];
        if (node.battery().level < 0.0 || node.battery().level > 1.0) {
            throw std::logic_error("battery level out of range");
        }
        if (node.battery().level > prev_levels_[i] + 1e-12) {
            throw std::logic_error("battery level increased");
        }
        if (node.role() == Role::Client) {
            ++client_total;
            if (!node.current_go()) {
                throw std::logic_error("client without a GO");
            }
            const uint32_t go = node.current_go()->ordinal;
            if (!alive_[go] || nodes_[go]->group().members.count(NodeId{i}) == 0) {
                throw std::logic_error("client not registered with its GO");
            }
            if (!node.group().members.empty()) {
                throw std::logic_error("client owns a non-empty group");
            }
        } else {
            const auto& g = node.group();
            if (g.owner != NodeId{i} || g.members.count(NodeId{i}) > 0) {
                throw std::logic_error("malformed group record");
            }
            if (g.members.size() > g.capacity) {
                throw std::logic_error("group beyond capacity");
            }
            if (g.credentials == 0) {
                throw std::logic_error("owner without credentials");
            }
            for (const NodeId m : g.members) {
                if (!alive_[m.ordinal]) {
                    throw std::logic_error("dead node still a member");
                }
                if (membership[m.ordinal]++) {
                    throw std::logic_error("node member of two groups");
                }
                ++member_total;
            }
        }
    }
    if (member_total != client_total) {
        throw std::logic_error("membership conservation violated");
    }
}

RunResult Simulation::run()
{
    boot_nodes();

    const auto ticks = static_cast<uint64_t>(std::llround(cfg_.duration / cfg_.tick));
    if (ticks > 0) {
        diffusion_.sample(0.0);
    }

    for (uint64_t ti = 0; ti < ticks; ++ti) {
        now_ = static_cast<double>(ti) * cfg_.tick;

        if (!mobility_->static_scene()) {
            mobility_->step(now_, cfg_.tick, pos_);
            nbrs_dirty_ = true;
        }
        if (nbrs_dirty_) {
            rebuild_neighbors();
        }
        enforce_link_range();
        fold_neighbor_changes();

        run_protocol_phase(ti);
        process_intents();

        update_batteries_and_deaths();
        accumulate_metrics(ti);

        // stability windows close on a global cadence so that a node's own
        // index and the one it advertises stay comparable with its peers'
        if ((ti + 1) % tst_ticks_ == 0) {
            for (uint32_t i = 0; i < cfg_.node_count; ++i) {
                if (alive_[i]) {
                    nodes_[i]->refresh_stability();
                }
            }
        }
        publish_records();

        if (cfg_.validate_invariants) {
            check_invariants();
        }
        for (uint32_t i = 0; i < cfg_.node_count; ++i) {
            prev_levels_[i] = nodes_[i]->battery().level;
        }
    }

    RunResult result;
    result.node_count = cfg_.node_count;
    result.duration = cfg_.duration;
    result.diffusion = diffusion_.samples();
    result.cg = std::move(cg_);
    result.reach = std::move(reach_);
    result.alive = alive_;
    result.discharge_time = death_time_;
    result.final_levels.reserve(cfg_.node_count);
    for (uint32_t i = 0; i < cfg_.node_count; ++i) {
        result.final_levels.push_back(nodes_[i]->battery().level);
    }
    result.trace = std::move(trace_);
    return result;
}

} // namespace wfdgm
