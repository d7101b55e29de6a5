#include <gtest/gtest.h>

#include <map>

#include "cloudadl/analyzer.hpp"
#include "cloudadl/parser.hpp"
#include "support.hpp"

using namespace cloudadl;
namespace tu = cloudadl::testing;

namespace {

const ChannelSpec* chan(const RuntimeTopology& t, std::string_view id) {
  auto i = t.find_channel(id);
  return i ? &t.channels[*i] : nullptr;
}

ArchitectureModel parsed(const std::string& text) {
  ModelResult r = parse_model(text, "m.arc");
  if (!r.ok()) throw std::runtime_error(tu::codes(r.diagnostics));
  return std::move(*r.model);
}

ArchitectureModel bundled_model(std::initializer_list<const char*> files) {
  std::vector<std::filesystem::path> paths;
  for (const char* f : files) paths.push_back(tu::models_dir() / f);
  ModelResult r = load_files(paths);
  if (!r.ok()) throw std::runtime_error(tu::codes(r.diagnostics));
  return std::move(*r.model);
}

std::vector<std::string> channel_ids(const RuntimeTopology& t) {
  std::vector<std::string> ids;
  for (const auto& c : t.channels) ids.push_back(c.id);
  return ids;
}

}  // namespace

TEST(Check, SensorChannelIsWellFormed) {
  EXPECT_TRUE(check(bundled_model({"messages.arc", "sensor_channel.arc"})).empty());
  EXPECT_TRUE(check(bundled_model({"sticky_session.arc"})).empty());
  EXPECT_TRUE(check(bundled_model({"supervision.arc"})).empty());
  EXPECT_TRUE(check(bundled_model({"pipeline.arc"})).empty());
}

TEST(Check, EachRuleHasItsOwnCode) {
  for (const auto& bad : tu::bad_model_corpus()) {
    Diagnostics d = check(parsed(bad.text));
    ASSERT_FALSE(d.empty()) << bad.rule;
    for (const auto& diag : d) EXPECT_EQ(diag.code, bad.code) << bad.rule << ": " << format(diag);
  }
}

TEST(Check, UpdateToAckConnectorIsTypeMismatch) {
  Diagnostics d = check(parsed(
      "message Update { v: integer; } message Ack { ok: boolean; }\n"
      "component S { port in Update i; behavior sink(); }\n"
      "component T { port out Ack o; component S s; connect s.i -> o; }\n"));
  // s.i is an in-port, so the direction rule fires before typing
  EXPECT_EQ(tu::codes(d), "E_DIRECTION");
  d = check(parsed(
      "message Update { v: integer; } message Ack { ok: boolean; }\n"
      "component S { port in Update i; port out Update o; behavior forward(); }\n"
      "component T { port out Ack o; component S s; connect s.o -> o; }\n"));
  ASSERT_EQ(tu::codes(d), "E_TYPE_MISMATCH");
  EXPECT_EQ(d[0].pos.line, 3);
}

TEST(Check, SelfContainingTypeIsRecursive) {
  Diagnostics d = check(parsed("component A { component A a; }"));
  EXPECT_EQ(tu::codes(d), "E_RECURSION");
}

TEST(Check, DecomposedTypeWithBehavior) {
  Diagnostics d = check(parsed(
      "component L { behavior sink(); }\n"
      "component T { component L l; behavior sink(); }\n"));
  EXPECT_EQ(tu::codes(d), "E_BEHAVIOR");
}

TEST(Check, SelfLoopOnSubcomponentIsRejected) {
  Diagnostics d = check(parsed(
      "message A { v: integer; }\n"
      "component L { port in A i; port out A o; behavior forward(); }\n"
      "component T { component L l; connect l.o -> l.i; }\n"));
  EXPECT_EQ(tu::codes(d), "E_DIRECTION");
}

TEST(Check, UnresolvedSubcomponentPort) {
  Diagnostics d = check(parsed(
      "message A { v: integer; }\n"
      "component L { port in A i; behavior sink(); }\n"
      "component T { port in A i; component L l; connect i -> l.nope; connect i -> ghost.i; }\n"));
  EXPECT_EQ(tu::codes(d), "E_UNRESOLVED E_UNRESOLVED");
}

TEST(Check, ContextMayNotOpenAndCloseOnOneConnector) {
  Diagnostics d = check(parsed(
      "message A { v: integer; }\n"
      "component L { port in A i; behavior sink(); }\n"
      "component T { port in A i; component L l; connect i -> l.i;\n"
      "  context c { open i -> l.i; close i -> l.i; } context d { open i -> l.i; } context e { close i -> l.i; } }\n"));
  ASSERT_EQ(tu::codes(d), "E_GATE_REF");
  EXPECT_EQ(d[0].pos.line, 4);
}

TEST(Check, EmptyComponentNeedsBehavior) {
  EXPECT_EQ(tu::codes(check(parsed("component Empty { }"))), "E_BEHAVIOR");
}

TEST(Elaborate, SensorChannelTree) {
  ArchitectureModel m = bundled_model({"messages.arc", "sensor_channel.arc"});
  RuntimeTopology t = elaborate(m, "SensorChannel");
  ASSERT_EQ(t.instances.size(), 5u);
  EXPECT_EQ(t.instances[0].path, "root");
  EXPECT_EQ(t.instances[0].kind, InstanceKind::Supervisor);
  std::size_t atomic = 0;
  for (const auto& inst : t.instances) atomic += inst.kind == InstanceKind::Atomic;
  EXPECT_EQ(atomic, 4u);
  auto store = t.find_instance("root/store");
  ASSERT_TRUE(store);
  ASSERT_TRUE(t.instances[*store].replicaGroup.has_value());
  EXPECT_EQ(t.instances[*store].replicaGroup->initialCount, 1u);
  EXPECT_FALSE(t.instances[*t.find_instance("root/handler")].replicaGroup.has_value());
  EXPECT_EQ(t.instances[*store].errorStrategy, ErrorStrategy::Escalate);
  EXPECT_EQ(t.instances[*store].parent, std::optional<std::size_t>(0));

  std::vector<std::string> expected = {
      "root.update->root/handler.update",
      "root/auth.approved->root/handler.approved",
      "root/auth.rejected->root/handler.rejected",
      "root/handler.ack->root.ack",
      "root/handler.toAuth->root/auth.request",
      "root/handler.toStore->root/store.update",
      "root/handler.toValidator->root/validator.check",
      "root/validator.invalid->root/handler.invalid",
      "root/validator.valid->root/handler.valid",
  };
  EXPECT_EQ(channel_ids(t), expected);
  for (const auto& c : t.channels) EXPECT_EQ(c.latency, 1u);
  const ChannelSpec* in = chan(t, "root.update->root/handler.update");
  ASSERT_NE(in, nullptr);
  EXPECT_TRUE(in->from.external);
  EXPECT_EQ(in->messageType, "Update");
  const ChannelSpec* ack = chan(t, "root/handler.ack->root.ack");
  ASSERT_NE(ack, nullptr);
  EXPECT_TRUE(ack->to.external);
  EXPECT_EQ(ack->messageType, "Ack");
  ASSERT_EQ(t.externalPorts.size(), 2u);
}

TEST(Elaborate, StickySessionGatesOnFusedChannels) {
  RuntimeTopology t = elaborate(bundled_model({"sticky_session.arc"}), "Top");
  const ChannelSpec* in = chan(t, "root.req->root/p.req->root/p/a.start");
  ASSERT_NE(in, nullptr);
  ASSERT_EQ(in->gates.size(), 1u);
  EXPECT_EQ(in->gates[0].context, "session");
  EXPECT_EQ(in->gates[0].kind, GateKind::Open);
  const ChannelSpec* out = chan(t, "root/p/a.done->root/p.resp->root.resp");
  ASSERT_NE(out, nullptr);
  ASSERT_EQ(out->gates.size(), 1u);
  EXPECT_EQ(out->gates[0].kind, GateKind::Close);
  const ChannelSpec* back = chan(t, "root/c.output->root/p/a.back");
  EXPECT_EQ(back, nullptr);
  back = chan(t, "root/p/c.output->root/p/a.back");
  ASSERT_NE(back, nullptr);
  EXPECT_TRUE(back->gates.empty());
  EXPECT_EQ(t.channels.size(), 5u);
  EXPECT_EQ(t.instances[*t.find_instance("root/p")].kind, InstanceKind::Supervisor);
  EXPECT_TRUE(t.instances[*t.find_instance("root/p/a")].replicaGroup.has_value());
}

TEST(Elaborate, AtomicRoot) {
  ArchitectureModel m = parsed("message M { v: integer; }\ncomponent F { port in M i; port out M o; behavior forward(); }");
  ASSERT_TRUE(check(m).empty());
  RuntimeTopology t = elaborate(m, "F");
  EXPECT_EQ(t.instances.size(), 1u);
  EXPECT_EQ(t.internal_channel_count(), 0u);
  EXPECT_EQ(t.externalPorts.size(), 2u);
  ASSERT_EQ(t.channels.size(), 2u);
  EXPECT_EQ(t.channels[0].id, "root.i");
  EXPECT_TRUE(t.channels[0].from.external);
  EXPECT_EQ(t.channels[1].id, "root.o");
  EXPECT_TRUE(t.channels[1].to.external);
}

TEST(Elaborate, UnknownRootThrows) {
  EXPECT_THROW(elaborate(parsed("component C { behavior sink(); }"), "Nope"), std::invalid_argument);
}

TEST(Elaborate, GatesAccumulateInTraversalOrder) {
  ArchitectureModel m = parsed(
      "message M { v: integer; }\n"
      "component L { port in M i; port out M o; behavior forward(); }\n"
      "component Inner { port in M i; port out M o; component L l; connect i -> l.i; connect l.o -> o;\n"
      "  context b { open i -> l.i; } context c { close i -> l.i; } }\n"
      "component Outer { port in M i; port out M o; component Inner n; connect i -> n.i; connect n.o -> o;\n"
      "  context a { open i -> n.i; } }\n");
  ASSERT_TRUE(check(m).empty()) << tu::codes(check(m));
  RuntimeTopology t = elaborate(m, "Outer");
  const ChannelSpec* c = chan(t, "root.i->root/n.i->root/n/l.i");
  ASSERT_NE(c, nullptr);
  std::vector<std::pair<std::string, GateKind>> gates;
  for (const auto& g : c->gates) gates.emplace_back(g.context, g.kind);
  std::vector<std::pair<std::string, GateKind>> expected = {
      {"a", GateKind::Open}, {"b", GateKind::Open}, {"c", GateKind::Close}};
  EXPECT_EQ(gates, expected);
}

TEST(Elaborate, FanOutAndFanIn) {
  ArchitectureModel m = parsed(
      "message M { v: integer; }\n"
      "component L { port in M i; port out M o; behavior forward(); }\n"
      "component T { port in M i; port out M o; component L a; component L b; component L c;\n"
      "  connect i -> a.i; connect i -> b.i; connect a.o -> c.i; connect b.o -> c.i; connect c.o -> o; }\n");
  ASSERT_TRUE(check(m).empty());
  RuntimeTopology t = elaborate(m, "T");
  EXPECT_EQ(t.channels_from(0, "i", true).size(), 2u);
  EXPECT_EQ(t.channels.size(), 5u);
}

TEST(Elaborate, DeterministicAndTypePreserving) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto sys = tu::random_system(rng);
    RuntimeTopology again = elaborate(*sys.scenario.model, "Sys");
    EXPECT_EQ(channel_ids(again), channel_ids(sys.scenario.topology));
    for (const auto& c : again.channels) EXPECT_EQ(c.messageType, "M");
  }
}

// Every gate on a fused channel comes from a connector on its chain, and
// every gate declared on a traversed connector shows up exactly once.
TEST(Elaborate, GateConservation) {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 100; ++n) {
    auto sys = tu::random_system(rng);
    const ArchitectureModel& model = *sys.scenario.model;
    const RuntimeTopology& topo = sys.scenario.topology;
    for (const auto& ch : topo.channels) {
      std::vector<std::string> labels;
      std::size_t start = 0;
      for (;;) {
        auto arrow = ch.id.find("->", start);
        labels.push_back(ch.id.substr(start, arrow == std::string::npos ? std::string::npos : arrow - start));
        if (arrow == std::string::npos) break;
        start = arrow + 2;
      }
      std::multiset<std::pair<std::string, GateKind>> declared;
      for (std::size_t k = 0; k + 1 < labels.size(); ++k) {
        auto split = [](const std::string& l) {
          auto dot = l.rfind('.');
          return std::pair{l.substr(0, dot), l.substr(dot + 1)};
        };
        auto [fromPath, fromPort] = split(labels[k]);
        auto [toPath, toPort] = split(labels[k + 1]);
        auto parent = [](const std::string& p) { return p.substr(0, p.rfind('/')); };
        auto leaf = [](const std::string& p) { return p.substr(p.rfind('/') + 1); };
        std::string owner;
        Endpoint src, tgt;
        if (parent(toPath) == fromPath && toPath != fromPath) {
          owner = fromPath;
          src.segments = {fromPort};
          tgt.segments = {leaf(toPath), toPort};
        } else if (parent(fromPath) == toPath && toPath != fromPath) {
          owner = toPath;
          src.segments = {leaf(fromPath), fromPort};
          tgt.segments = {toPort};
        } else {
          owner = parent(fromPath);
          src.segments = {leaf(fromPath), fromPort};
          tgt.segments = {leaf(toPath), toPort};
        }
        const auto& inst = topo.instances[*topo.find_instance(owner)];
        const ComponentTypeDef* type = model.find_component(inst.typeRef);
        ASSERT_NE(type, nullptr);
        for (const auto& ctx : type->contexts) {
          for (const auto& g : ctx.opening)
            if (g.source == src && g.target == tgt) declared.insert({ctx.name, GateKind::Open});
          for (const auto& g : ctx.closing)
            if (g.source == src && g.target == tgt) declared.insert({ctx.name, GateKind::Close});
        }
      }
      std::multiset<std::pair<std::string, GateKind>> fused;
      for (const auto& g : ch.gates) fused.insert({g.context, g.kind});
      EXPECT_EQ(fused, declared) << ch.id;
    }
  }
}
