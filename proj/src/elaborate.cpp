#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

#include "cloudadl/analyzer.hpp"

namespace cloudadl {

const char* to_string(ErrorStrategy s) {
  switch (s) {
    case ErrorStrategy::Resume: return "resume";
    case ErrorStrategy::Restart: return "restart";
    case ErrorStrategy::Escalate: return "escalate";
  }
  return "?";
}

std::optional<ErrorStrategy> parse_strategy(std::string_view text) {
  if (text == "resume") return ErrorStrategy::Resume;
  if (text == "restart") return ErrorStrategy::Restart;
  if (text == "escalate") return ErrorStrategy::Escalate;
  return std::nullopt;
}

std::optional<std::size_t> RuntimeTopology::find_instance(std::string_view path) const {
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (instances[i].path == path) return i;
  return std::nullopt;
}

std::optional<std::size_t> RuntimeTopology::find_channel(std::string_view id) const {
  auto it = std::lower_bound(channels.begin(), channels.end(), id,
                             [](const ChannelSpec& c, std::string_view v) { return c.id < v; });
  if (it == channels.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - channels.begin());
}

std::vector<std::size_t> RuntimeTopology::channels_from(std::size_t instance, std::string_view port,
                                                        bool external) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& from = channels[i].from;
    if (from.instance == instance && from.port == port && from.external == external) out.push_back(i);
  }
  return out;
}

const ExternalPort* RuntimeTopology::find_external(std::string_view name, Direction dir) const {
  for (const auto& p : externalPorts)
    if (p.name == name && p.direction == dir) return &p;
  return nullptr;
}

std::size_t RuntimeTopology::internal_channel_count() const {
  return static_cast<std::size_t>(std::count_if(channels.begin(), channels.end(), [](const ChannelSpec& c) {
    return !c.from.external && !c.to.external;
  }));
}

namespace {

struct NodeKey {
  std::size_t instance;
  std::string port;
  auto operator<=>(const NodeKey&) const = default;
};

struct Edge {
  NodeKey to;
  std::vector<GateSpec> gates;
};

class Elaborator {
 public:
  Elaborator(const ArchitectureModel& model, RuntimeTopology& topo) : model_(model), topo_(topo) {}

  void instantiate(const ComponentTypeDef& type, std::string path, std::optional<std::size_t> parent,
                   bool replicating) {
    std::size_t index = topo_.instances.size();
    InstanceNode node;
    node.path = path;
    node.typeRef = type.name;
    node.kind = type.is_decomposed() ? InstanceKind::Supervisor : InstanceKind::Atomic;
    if (replicating) node.replicaGroup = ReplicaGroupSpec{};
    node.parent = parent;
    topo_.instances.push_back(std::move(node));
    if (parent) topo_.instances[*parent].children.push_back(index);
    types_.push_back(&type);

    std::map<std::string, std::size_t> childIndex;
    for (const auto& s : type.subcomponents) {
      childIndex[s.name] = topo_.instances.size();
      instantiate(*model_.find_component(s.typeRef), path + "/" + s.name, index, s.replicating);
    }

    for (const auto& k : type.connectors) {
      auto node_of = [&](const Endpoint& e) {
        return e.is_own() ? NodeKey{index, e.port()} : NodeKey{childIndex.at(e.instance()), e.port()};
      };
      Edge edge{node_of(k.target), {}};
      for (const auto& ctx : type.contexts) {
        for (const auto& g : ctx.opening)
          if (g.refers_to(k)) edge.gates.push_back({ctx.name, GateKind::Open});
        for (const auto& g : ctx.closing)
          if (g.refers_to(k)) edge.gates.push_back({ctx.name, GateKind::Close});
      }
      edges_[node_of(k.source)].push_back(std::move(edge));
    }
  }

  void fuse() {
    const ComponentTypeDef& rootType = *types_[0];
    for (const auto& p : rootType.ports)
      topo_.externalPorts.push_back({p.name, p.direction, p.messageType});

    bool atomicRoot = !rootType.is_decomposed();
    for (std::size_t i = 0; i < topo_.instances.size(); ++i) {
      const ComponentTypeDef& type = *types_[i];
      for (const auto& p : type.ports) {
        if (atomicRoot && i == 0) {
          // The root's own ports are both the boundary and the atomic ports.
          ChannelSpec c;
          c.id = label({0, p.name});
          c.from = {0, p.name, p.direction == Direction::In};
          c.to = {0, p.name, p.direction == Direction::Out};
          c.messageType = p.messageType;
          topo_.channels.push_back(std::move(c));
          continue;
        }
        bool emits = (p.direction == Direction::Out && topo_.instances[i].kind == InstanceKind::Atomic) ||
                     (i == 0 && p.direction == Direction::In);
        if (!emits) continue;
        ChannelEnd from{i, p.name, i == 0};
        std::vector<std::string> chain{label({i, p.name})};
        std::vector<GateSpec> gates;
        walk({i, p.name}, from, p.messageType, chain, gates);
      }
    }

    std::sort(topo_.channels.begin(), topo_.channels.end(),
              [](const ChannelSpec& a, const ChannelSpec& b) { return a.id < b.id; });
  }

 private:
  std::string label(const NodeKey& n) const { return topo_.instances[n.instance].path + "." + n.port; }

  bool is_sink(const NodeKey& n) const {
    if (topo_.instances[n.instance].kind == InstanceKind::Atomic) return true;
    return n.instance == 0;  // a root out-port reached from inside
  }

  void walk(const NodeKey& at, const ChannelEnd& from, const std::string& messageType,
            std::vector<std::string>& chain, std::vector<GateSpec>& gates) {
    auto it = edges_.find(at);
    if (it == edges_.end()) return;
    for (const auto& e : it->second) {
      if (chain.size() > topo_.instances.size() * 2 + 2) return;  // unreachable for checked models
      chain.push_back(label(e.to));
      gates.insert(gates.end(), e.gates.begin(), e.gates.end());
      if (is_sink(e.to)) {
        ChannelSpec c;
        for (std::size_t k = 0; k < chain.size(); ++k) c.id += (k ? "->" : "") + chain[k];
        c.from = from;
        c.to = {e.to.instance, e.to.port, e.to.instance == 0 && topo_.instances[0].kind == InstanceKind::Supervisor};
        c.messageType = messageType;
        c.gates = gates;
        topo_.channels.push_back(std::move(c));
      } else {
        walk(e.to, from, messageType, chain, gates);
      }
      gates.resize(gates.size() - e.gates.size());
      chain.pop_back();
    }
  }

  const ArchitectureModel& model_;
  RuntimeTopology& topo_;
  std::vector<const ComponentTypeDef*> types_;
  std::map<NodeKey, std::vector<Edge>> edges_;
};

}  // namespace

RuntimeTopology elaborate(const ArchitectureModel& model, std::string_view rootType) {
  const ComponentTypeDef* root = model.find_component(rootType);
  if (!root) throw std::invalid_argument("unknown root type '" + std::string(rootType) + "'");
  RuntimeTopology topo;
  Elaborator e(model, topo);
  e.instantiate(*root, "root", std::nullopt, false);
  e.fuse();
  return topo;
}

}  // namespace cloudadl
