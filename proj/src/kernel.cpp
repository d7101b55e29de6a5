#include "cloudadl/kernel.hpp"

#include <fnmatch.h>

#include <algorithm>

#include "cloudadl/errors.hpp"

namespace cloudadl {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::mt19937_64 instance_random(std::uint64_t seed, std::string_view path, ReplicaId replica) {
  std::uint64_t h = fnv1a(path);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(replica)};
  return std::mt19937_64(seq);
}

}  // namespace

void apply_latencies(RuntimeTopology& topo, const std::vector<LatencyOverride>& overrides) {
  for (const auto& o : overrides)
    if (o.steps < 1) throw RuntimeError(RuntimeErrc::BadArgument, "latency for '" + o.pattern + "' must be >= 1");
  for (auto& c : topo.channels)
    for (const auto& o : overrides)
      if (fnmatch(o.pattern.c_str(), c.id.c_str(), 0) == 0) c.latency = o.steps;
}

std::vector<Outgoing> handover(const TokenSet& incoming, std::vector<action::Emit> emissions) {
  std::vector<Outgoing> out;
  out.reserve(emissions.size());
  for (auto& e : emissions) out.push_back(Outgoing{std::move(e), incoming});
  return out;
}

struct Kernel::Replica {
  BehaviorState state;
  std::vector<std::deque<Message>> queues;  // one per in-port
  TokenSet held;
  std::mt19937_64 random;
};

struct Kernel::Node {
  std::unique_ptr<Interface> iface;
  std::shared_ptr<const Behavior> behavior;
  std::vector<std::string> inPorts;
  std::map<std::string, std::vector<std::size_t>, std::less<>> outChannels;
  std::optional<ReplicaGroup> group;
  std::vector<Replica> replicas;  // by ReplicaId
  std::optional<std::size_t> pendingTarget;
  std::size_t loggedSize = 0;
};

struct Kernel::Deferred {
  std::int64_t due = 0;
  std::uint64_t order = 0;
  InstanceRef from;
  Outgoing out;
};

Kernel::Kernel(std::shared_ptr<const ArchitectureModel> model, RuntimeTopology topology, KernelConfig config)
    : model_(std::move(model)), topo_(std::move(topology)), config_(std::move(config)) {
  if (!config_.registry) config_.registry = &BehaviorRegistry::builtins();
  apply_latencies(topo_, config_.latencies);

  for (const auto& [path, count] : config_.initialReplicas) {
    auto i = topo_.find_instance(path);
    if (!i || !topo_.instances[*i].replicaGroup)
      throw RuntimeError(RuntimeErrc::UnknownInstance, "'" + path + "' is not a replica group");
  }
  for (const auto& [path, s] : config_.strategies)
    if (!topo_.find_instance(path)) throw RuntimeError(RuntimeErrc::UnknownInstance, "no instance '" + path + "'");

  for (std::size_t i = 0; i < topo_.instances.size(); ++i) {
    const InstanceNode& inst = topo_.instances[i];
    auto nd = std::make_unique<Node>();
    nodes_.push_back(nullptr);
    if (inst.kind == InstanceKind::Atomic) {
      const ComponentTypeDef& type = *model_->find_component(inst.typeRef);
      nd->iface = std::make_unique<Interface>(type, *model_);
      BehaviorEnv env{model_.get(), std::filesystem::path(type.behavior->pos.origin).parent_path()};
      nd->behavior = config_.registry->create(*type.behavior, *nd->iface, env);
      for (const auto* p : nd->iface->inputs()) nd->inPorts.push_back(p->name);
      for (std::size_t c = 0; c < topo_.channels.size(); ++c) {
        const auto& from = topo_.channels[c].from;
        if (from.instance == i && !from.external) nd->outChannels[from.port].push_back(c);
      }
      std::size_t count = 1;
      if (inst.replicaGroup) {
        auto it = config_.initialReplicas.find(inst.path);
        count = it != config_.initialReplicas.end() ? std::max<std::size_t>(it->second, 1)
                                                    : inst.replicaGroup->initialCount;
        nd->group.emplace(inst.path, count);
        nd->loggedSize = count;
      }
      nodes_[i] = std::move(nd);
      for (ReplicaId r = 0; r < count; ++r) nodes_[i]->replicas.push_back(make_replica(i, r));
    } else {
      nodes_[i] = std::move(nd);
    }
  }
}

Kernel::~Kernel() = default;

Kernel::Replica Kernel::make_replica(std::size_t n, ReplicaId id) const {
  const Node& nd = node(n);
  Replica r;
  r.state = nd.behavior->initial_state();
  r.queues.resize(nd.inPorts.size());
  r.random = instance_random(config_.seed, topo_.instances[n].path, id);
  return r;
}

Kernel::Replica& Kernel::replica(InstanceRef ref) {
  Node& nd = node(ref.node);
  if (ref.replica >= nd.replicas.size())
    throw RuntimeError(RuntimeErrc::UnknownInstance, "no replica " + std::to_string(ref.replica) + " of " +
                                                         topo_.instances.at(ref.node).path);
  return nd.replicas[ref.replica];
}

const Kernel::Replica& Kernel::replica(InstanceRef ref) const {
  return const_cast<Kernel*>(this)->replica(ref);
}

ErrorStrategy Kernel::strategy(std::size_t n) const {
  const auto& inst = topo_.instances[n];
  auto it = config_.strategies.find(inst.path);
  return it != config_.strategies.end() ? it->second : inst.errorStrategy;
}

std::string Kernel::describe(InstanceRef ref) const {
  const auto& path = topo_.instances.at(ref.node).path;
  if (node(ref.node).group) return path + "[" + std::to_string(ref.replica) + "]";
  return path;
}

std::optional<InstanceRef> Kernel::find(std::string_view path, ReplicaId r) const {
  auto i = topo_.find_instance(path);
  if (!i) return std::nullopt;
  const Node& nd = node(*i);
  if (topo_.instances[*i].kind == InstanceKind::Atomic) {
    if (r >= nd.replicas.size()) return std::nullopt;
    if (nd.group && nd.group->status(r) == ReplicaStatus::Retired) return std::nullopt;
  } else if (r != 0) {
    return std::nullopt;
  }
  return InstanceRef{*i, r};
}

std::optional<InstanceRef> Kernel::parse_ref(std::string_view text) const {
  auto open = text.find('[');
  if (open == std::string_view::npos || text.back() != ']') return find(text);
  std::string digits(text.substr(open + 1, text.size() - open - 2));
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return find(text.substr(0, open), std::stoull(digits));
}

const ReplicaGroup* Kernel::group(std::string_view path) const {
  auto i = topo_.find_instance(path);
  if (!i || !node(*i).group) return nullptr;
  return &*node(*i).group;
}

const BehaviorState& Kernel::state(InstanceRef ref) const { return replica(ref).state; }
const TokenSet& Kernel::held_tokens(InstanceRef ref) const { return replica(ref).held; }

std::size_t Kernel::queue_length(InstanceRef ref, std::string_view port) const {
  const Node& nd = node(ref.node);
  for (std::size_t q = 0; q < nd.inPorts.size(); ++q)
    if (nd.inPorts[q] == port) return replica(ref).queues[q].size();
  throw RuntimeError(RuntimeErrc::BadPort, "no in-port '" + std::string(port) + "'");
}

std::uint64_t Kernel::send(std::size_t channel, const Payload& payload, const TokenSet& tokens,
                           std::optional<ReplicaId> pinned) {
  if (channel >= topo_.channels.size())
    throw RuntimeError(RuntimeErrc::UnknownChannel, "channel index " + std::to_string(channel));
  const ChannelSpec& ch = topo_.channels[channel];
  const MessageTypeDef* type = model_->find_message(ch.messageType);
  if (!type || !conforms(payload, *type))
    throw RuntimeError(RuntimeErrc::TypeError, render(payload) + " does not fit channel " + ch.id + " (" +
                                                   ch.messageType + ")");

  std::uint64_t seq = ++seq_;
  std::vector<GateEffect> effects;
  TokenSet carried = apply_gates(ch.gates, tokens, mint_, &effects);
  for (const auto& fx : effects) {
    Event e;
    e.step = step_;
    e.kind = fx.kind == GateKind::Open ? EventKind::Mint : EventKind::Strip;
    e.subject = ch.id;
    e.seq = seq;
    e.tokens = {fx.token};
    e.channel = channel;
    log_.push_back(std::move(e));
  }

  Message m{channel, payload, carried, seq, step_, step_ + static_cast<std::int64_t>(ch.latency), pinned};
  Event e;
  e.step = step_;
  e.kind = EventKind::Send;
  e.subject = ch.id;
  e.seq = seq;
  e.tokens = carried;
  e.payload = render(payload);
  e.channel = channel;
  log_.push_back(std::move(e));
  inFlight_.emplace(FlightKey{m.arriveStep, channel, seq}, std::move(m));
  return seq;
}

std::vector<std::uint64_t> Kernel::inject(std::string_view rootInPort, const Payload& payload) {
  if (!topo_.find_external(rootInPort, Direction::In))
    throw RuntimeError(RuntimeErrc::BadPort, "root has no in-port '" + std::string(rootInPort) + "'");
  std::vector<std::uint64_t> seqs;
  for (std::size_t c : topo_.channels_from(0, rootInPort, true)) seqs.push_back(send(c, payload));
  return seqs;
}

std::optional<std::string> Kernel::validate(InstanceRef from, const action::Emit& e) const {
  const Node& nd = node(from.node);
  const PortView* p = nd.iface ? nd.iface->find(e.port) : nullptr;
  if (!p || p->direction != Direction::Out) return "bad_port";
  if (!p->type || !conforms(e.payload, *p->type)) return "type_error";
  if (e.directive.kind == Directive::Kind::Default) return std::nullopt;
  if (!p->replicating) return "bad_directive";
  if (e.directive.kind == Directive::Kind::Index) {
    auto it = nd.outChannels.find(e.port);
    if (it == nd.outChannels.end()) return std::nullopt;
    for (std::size_t c : it->second) {
      const auto& to = topo_.channels[c].to;
      std::size_t n = to.external || !node(to.instance).group ? 1 : node(to.instance).group->live_count();
      if (e.directive.index >= n) return "bad_directive";
    }
  }
  return std::nullopt;
}

void Kernel::dispatch(InstanceRef from, const Outgoing& out) {
  auto it = node(from.node).outChannels.find(out.emit.port);
  if (it == node(from.node).outChannels.end()) return;  // unconnected port
  for (std::size_t c : it->second) {
    const auto& to = topo_.channels[c].to;
    const ReplicaGroup* g = to.external ? nullptr : (node(to.instance).group ? &*node(to.instance).group : nullptr);
    switch (out.emit.directive.kind) {
      case Directive::Kind::Default:
        send(c, out.emit.payload, out.tokens);
        break;
      case Directive::Kind::Index:
        send(c, out.emit.payload, out.tokens, g ? std::optional<ReplicaId>(g->live().at(out.emit.directive.index))
                                                : std::nullopt);
        break;
      case Directive::Kind::Broadcast:
        if (!g || g->live_count() <= 1) {
          send(c, out.emit.payload, out.tokens);
        } else {
          for (ReplicaId r : g->live()) send(c, out.emit.payload, out.tokens, r);
        }
        break;
    }
  }
}

void Kernel::emit_directed(InstanceRef from, std::string_view outPort, const Payload& payload, Directive directive,
                           const TokenSet& tokens) {
  replica(from);
  action::Emit e{std::string(outPort), payload, directive, 0};
  if (auto problem = validate(from, e)) {
    if (*problem == "bad_directive")
      throw RuntimeError(RuntimeErrc::BadDirective, render(directive) + " on " + describe(from) + "." +
                                                        std::string(outPort));
    if (*problem == "type_error") throw RuntimeError(RuntimeErrc::TypeError, render(payload));
    throw RuntimeError(RuntimeErrc::BadPort, describe(from) + " has no out-port '" + std::string(outPort) + "'");
  }
  dispatch(from, Outgoing{std::move(e), tokens});
}

std::size_t Kernel::receiver_count(InstanceRef from, std::string_view outPort) const {
  const Node& nd = node(from.node);
  const PortView* p = nd.iface ? nd.iface->find(outPort) : nullptr;
  if (!p || p->direction != Direction::Out || !p->replicating)
    throw RuntimeError(RuntimeErrc::BadDirective, "'" + std::string(outPort) + "' is not a replicating out-port");
  auto it = nd.outChannels.find(outPort);
  if (it == nd.outChannels.end() || it->second.empty()) return 0;
  const auto& to = topo_.channels[it->second.front()].to;
  if (to.external || !node(to.instance).group) return 1;
  return node(to.instance).group->live_count();
}

void Kernel::deliver(Message msg) {
  const ChannelSpec& ch = topo_.channels[msg.channel];
  Event e;
  e.step = step_;
  e.kind = EventKind::Deliver;
  e.seq = msg.seq;
  e.tokens = msg.tokens;
  e.payload = render(msg.payload);
  e.channel = msg.channel;
  e.port = ch.to.port;

  if (ch.to.external) {
    e.subject = topo_.instances[0].path + "." + ch.to.port;
    e.external = true;
    log_.push_back(std::move(e));
    return;
  }

  Node& nd = node(ch.to.instance);
  InstanceRef ref{ch.to.instance, 0};
  if (nd.group) {
    auto sel = nd.group->select(msg.tokens, msg.pinned);
    ref.replica = sel.replica;
    if (!sel.newlyBound.empty()) {
      Event b;
      b.step = step_;
      b.kind = EventKind::Bind;
      b.subject = describe(ref);
      b.seq = msg.seq;
      b.tokens = TokenSet(sel.newlyBound.begin(), sel.newlyBound.end());
      b.node = ref.node;
      b.replica = ref.replica;
      log_.push_back(std::move(b));
    }
  }
  Replica& rep = replica(ref);
  rep.held.insert(msg.tokens.begin(), msg.tokens.end());
  e.subject = describe(ref) + "." + ch.to.port;
  e.node = ref.node;
  e.replica = ref.replica;
  log_.push_back(std::move(e));

  auto q = std::find(nd.inPorts.begin(), nd.inPorts.end(), ch.to.port);
  rep.queues[static_cast<std::size_t>(q - nd.inPorts.begin())].push_back(std::move(msg));
}

void Kernel::activate(InstanceRef ref, const std::string& port, const Message& msg) {
  Node& nd = node(ref.node);
  Replica& rep = replica(ref);

  Stimulus in;
  in.port = port;
  in.payload = msg.payload;
  in.step = step_;
  for (const auto* p : nd.iface->outputs())
    if (p->replicating) in.receivers[p->name] = receiver_count(ref, p->name);

  std::vector<Action> actions;
  try {
    actions = nd.behavior->handle(rep.state, in, rep.random);
  } catch (const std::exception&) {
    actions = {action::Raise{"exception"}};
  }

  std::optional<std::string> failure;
  for (const auto& a : actions) {
    if (const auto* r = std::get_if<action::Raise>(&a)) {
      failure = r->kind;
      break;
    }
  }
  if (!failure) {
    for (const auto& a : actions) {
      if (const auto* e = std::get_if<action::Emit>(&a)) {
        failure = validate(ref, *e);
        if (failure) break;
      }
    }
  }
  if (failure) {
    Event e;
    e.step = step_;
    e.kind = EventKind::Raise;
    e.subject = describe(ref);
    e.seq = msg.seq;
    e.tokens = msg.tokens;
    e.payload = *failure;
    e.node = ref.node;
    e.replica = ref.replica;
    log_.push_back(std::move(e));
    supervise(ref, *failure, msg.seq);
    return;
  }

  std::vector<action::Emit> emissions;
  for (auto& a : actions) {
    if (auto* s = std::get_if<action::SetState>(&a)) {
      rep.state = std::move(s->state);
    } else if (auto* r = std::get_if<action::Record>(&a)) {
      tables_[topo_.instances[ref.node].path].push_back(std::move(r->payload));
    } else if (auto* e = std::get_if<action::Emit>(&a)) {
      emissions.push_back(std::move(*e));
    }
  }
  for (auto& out : handover(msg.tokens, std::move(emissions))) {
    if (out.emit.after > 0) {
      std::uint64_t order = deferred_.empty() ? 0 : deferred_.back().order + 1;
      deferred_.push_back(Deferred{step_ + out.emit.after, order, ref, std::move(out)});
    } else {
      dispatch(ref, out);
    }
  }
}

void Kernel::fault(InstanceRef at, const std::string& kind) {
  if (at.node >= nodes_.size()) throw RuntimeError(RuntimeErrc::UnknownInstance, "bad instance");
  if (topo_.instances[at.node].kind == InstanceKind::Atomic) replica(at);
  Event e;
  e.step = step_;
  e.kind = EventKind::Raise;
  e.subject = topo_.instances[at.node].kind == InstanceKind::Atomic ? describe(at) : topo_.instances[at.node].path;
  e.payload = kind;
  e.node = at.node;
  e.replica = at.replica;
  log_.push_back(std::move(e));
  supervise(at, kind, 0);
}

void Kernel::supervise(InstanceRef at, const std::string& kind, std::uint64_t seq) {
  auto event = [&](EventKind k, std::string subject) {
    Event e;
    e.step = step_;
    e.kind = k;
    e.subject = std::move(subject);
    e.seq = seq;
    e.payload = kind;
    log_.push_back(std::move(e));
  };
  bool atomic = topo_.instances[at.node].kind == InstanceKind::Atomic;
  auto subject_of = [&](std::size_t n) {
    return n == at.node && atomic ? describe(at) : topo_.instances[n].path;
  };
  auto restart_child = [&](std::size_t n) {
    restart(n, n == at.node && atomic ? std::optional<InstanceRef>(at) : std::nullopt);
    event(EventKind::Restart, subject_of(n));
  };

  switch (strategy(at.node)) {
    case ErrorStrategy::Resume: return;
    case ErrorStrategy::Restart: restart_child(at.node); return;
    case ErrorStrategy::Escalate: break;
  }

  std::size_t child = at.node;
  while (true) {
    auto parent = topo_.instances[child].parent;
    if (!parent) {
      event(EventKind::Fatal, subject_of(at.node));
      halted_ = true;
      return;
    }
    event(EventKind::Escalate, subject_of(child));
    switch (strategy(*parent)) {
      case ErrorStrategy::Resume: return;
      case ErrorStrategy::Restart: restart_child(child); return;
      case ErrorStrategy::Escalate: child = *parent; break;
    }
  }
}

void Kernel::restart(std::size_t subtreeNode, std::optional<InstanceRef> only) {
  auto reset = [&](std::size_t n, ReplicaId r) {
    Replica& rep = node(n).replicas[r];
    rep.state = node(n).behavior->initial_state();
    rep.held.clear();
    rep.random = instance_random(config_.seed, topo_.instances[n].path, r);
  };
  if (only) {
    reset(only->node, only->replica);
    return;
  }
  std::vector<std::size_t> stack{subtreeNode};
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    const Node& nd = node(n);
    for (ReplicaId r = 0; r < nd.replicas.size(); ++r)
      if (!nd.group || nd.group->status(r) != ReplicaStatus::Retired) reset(n, r);
    for (std::size_t c : topo_.instances[n].children) stack.push_back(c);
  }
}

void Kernel::scale(std::string_view groupPath, std::size_t target) {
  auto i = topo_.find_instance(groupPath);
  if (!i || !node(*i).group)
    throw RuntimeError(RuntimeErrc::UnknownInstance, "'" + std::string(groupPath) + "' is not a replica group");
  if (target < 1) throw RuntimeError(RuntimeErrc::BadArgument, "scale target must be >= 1");
  Node& nd = node(*i);
  ReplicaGroup& g = *nd.group;
  auto live = g.live();
  auto retiring = g.retiring();
  if (target == g.size() && retiring.empty()) return;

  if (target >= g.size()) {
    for (ReplicaId r : retiring) g.reactivate(r);
    while (g.size() < target) {
      ReplicaId id = g.add();
      nd.replicas.push_back(make_replica(*i, id));
    }
    nd.pendingTarget.reset();
  } else {
    std::vector<ReplicaId> members = live;
    members.insert(members.end(), retiring.begin(), retiring.end());
    std::sort(members.begin(), members.end());
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k < target) g.reactivate(members[k]);
      else g.mark_retiring(members[k]);
    }
    nd.pendingTarget = target;
  }
  try_retire(*i, false);
  log_scale(*i);
}

void Kernel::try_retire(std::size_t n, bool logChange) {
  Node& nd = node(n);
  if (!nd.group || !nd.pendingTarget) return;
  std::size_t before = nd.group->size();
  for (ReplicaId r : nd.group->retiring()) {
    const Replica& rep = nd.replicas[r];
    bool idle = std::all_of(rep.queues.begin(), rep.queues.end(), [](const auto& q) { return q.empty(); });
    if (idle && rep.held.empty()) nd.group->retire(r);
  }
  if (nd.group->retiring().empty()) nd.pendingTarget.reset();
  if (logChange && nd.group->size() != before) log_scale(n);
}

void Kernel::log_scale(std::size_t n) {
  Node& nd = node(n);
  const ReplicaGroup& g = *nd.group;
  Event e;
  e.step = step_;
  e.kind = EventKind::Scale;
  e.subject = g.path();
  std::size_t target = nd.pendingTarget.value_or(g.size());
  e.payload = "size=" + std::to_string(g.size()) + " target=" + std::to_string(target);
  if (!g.retiring().empty()) e.payload += " deferred=" + std::to_string(g.retiring().size());
  e.node = n;
  log_.push_back(std::move(e));
  nd.loggedSize = g.size();
}

bool Kernel::quiescent() const {
  if (!inFlight_.empty() || !deferred_.empty()) return false;
  for (const auto& nd : nodes_)
    for (const auto& rep : nd->replicas)
      for (const auto& q : rep.queues)
        if (!q.empty()) return false;
  return true;
}

void Kernel::step() {
  if (halted_) return;

  if (!deferred_.empty()) {
    std::vector<Deferred> due;
    std::vector<Deferred> later;
    for (auto& d : deferred_) (d.due <= step_ ? due : later).push_back(std::move(d));
    deferred_ = std::move(later);
    std::sort(due.begin(), due.end(),
              [](const Deferred& a, const Deferred& b) { return std::tie(a.due, a.order) < std::tie(b.due, b.order); });
    for (const auto& d : due) dispatch(d.from, d.out);
  }

  for (std::size_t n = 0; n < nodes_.size(); ++n) try_retire(n, true);

  while (!inFlight_.empty() && std::get<0>(inFlight_.begin()->first) <= step_) {
    auto handle = inFlight_.extract(inFlight_.begin());
    deliver(std::move(handle.mapped()));
  }

  struct Pending {
    FlightKey key;
    InstanceRef ref;
    std::size_t queue;
  };
  std::vector<Pending> pending;
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const Node& nd = *nodes_[n];
    for (ReplicaId r = 0; r < nd.replicas.size(); ++r)
      for (std::size_t q = 0; q < nd.replicas[r].queues.size(); ++q)
        for (const auto& m : nd.replicas[r].queues[q])
          pending.push_back({FlightKey{m.arriveStep, m.channel, m.seq}, {n, r}, q});
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) { return a.key < b.key; });
  for (const auto& p : pending) {
    if (halted_) return;
    auto& queue = replica(p.ref).queues[p.queue];
    Message msg = std::move(queue.front());
    queue.pop_front();
    activate(p.ref, node(p.ref.node).inPorts[p.queue], msg);
  }
  ++step_;
}

void Kernel::run(std::int64_t maxSteps) {
  while (!halted_ && step_ < maxSteps && !quiescent()) step();
}

}  // namespace cloudadl
