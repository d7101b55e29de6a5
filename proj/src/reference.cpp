#include <algorithm>
#include <deque>

#include "cloudadl/errors.hpp"
#include "cloudadl/harness.hpp"

namespace cloudadl {

ReferenceResult reference_run(const Scenario& s, const BehaviorRegistry* registry) {
  if (!registry) registry = &BehaviorRegistry::builtins();
  if (!s.faults.empty()) throw RuntimeError(RuntimeErrc::OracleInapplicable, "scenario injects faults");
  const RuntimeTopology& topo = s.topology;
  const ArchitectureModel& model = *s.model;

  struct Unit {
    std::unique_ptr<Interface> iface;
    std::shared_ptr<const Behavior> behavior;
    BehaviorState state;
    std::map<std::string, std::size_t> receivers;
  };
  std::vector<Unit> units(topo.instances.size());
  for (std::size_t i = 0; i < topo.instances.size(); ++i) {
    const auto& inst = topo.instances[i];
    if (inst.kind != InstanceKind::Atomic) continue;
    const ComponentTypeDef& type = *model.find_component(inst.typeRef);
    Unit& u = units[i];
    u.iface = std::make_unique<Interface>(type, model);
    BehaviorEnv env{&model, std::filesystem::path(type.behavior->pos.origin).parent_path()};
    u.behavior = registry->create(*type.behavior, *u.iface, env);
    if (u.behavior->replication_dependent())
      throw RuntimeError(RuntimeErrc::OracleInapplicable, inst.path + " uses replication-dependent behavior");
    u.state = u.behavior->initial_state();
    for (const auto* p : u.iface->outputs())
      if (p->replicating) u.receivers[p->name] = topo.channels_from(i, p->name, false).empty() ? 0 : 1;
  }

  std::vector<const Injection*> order;
  for (const auto& inj : s.injections) order.push_back(&inj);
  std::stable_sort(order.begin(), order.end(), [](const Injection* a, const Injection* b) { return a->at < b->at; });

  std::mt19937_64 random(s.seed);
  ReferenceResult result;
  for (const auto& p : topo.externalPorts)
    if (p.direction == Direction::Out) result.outputs[p.name];

  struct Pending {
    std::size_t channel;
    Payload payload;
  };
  for (const Injection* inj : order) {
    std::deque<Pending> work;
    for (std::size_t c : topo.channels_from(0, inj->port, true)) work.push_back({c, inj->payload});
    while (!work.empty()) {
      Pending m = std::move(work.front());
      work.pop_front();
      const ChannelSpec& ch = topo.channels[m.channel];
      if (ch.to.external) {
        result.outputs[ch.to.port].push_back(render(m.payload));
        continue;
      }
      Unit& u = units[ch.to.instance];
      Stimulus in{ch.to.port, m.payload, inj->at, u.receivers};
      std::vector<Action> actions;
      try {
        actions = u.behavior->handle(u.state, in, random);
      } catch (const std::exception& e) {
        throw RuntimeError(RuntimeErrc::OracleInapplicable, topo.instances[ch.to.instance].path + " threw: " + e.what());
      }
      for (auto& a : actions) {
        if (auto* r = std::get_if<action::Raise>(&a))
          throw RuntimeError(RuntimeErrc::OracleInapplicable,
                             topo.instances[ch.to.instance].path + " raised " + r->kind);
      }
      for (auto& a : actions) {
        if (auto* st = std::get_if<action::SetState>(&a)) {
          u.state = std::move(st->state);
        } else if (auto* rec = std::get_if<action::Record>(&a)) {
          result.tables[topo.instances[ch.to.instance].path].push_back(std::move(rec->payload));
        } else if (auto* e = std::get_if<action::Emit>(&a)) {
          for (std::size_t c : topo.channels_from(ch.to.instance, e->port, false)) work.push_back({c, e->payload});
        }
      }
    }
  }
  return result;
}

}  // namespace cloudadl
