#include "cloudadl/tokens.hpp"

#include <algorithm>

namespace cloudadl {

std::string render(const ContextToken& t) { return t.context + "#" + std::to_string(t.serial); }

std::string render(const TokenSet& tokens) {
  if (tokens.empty()) return "-";
  std::vector<std::string> parts;
  parts.reserve(tokens.size());
  for (const auto& t : tokens) parts.push_back(render(t));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(',');
    out += parts[i];
  }
  return out;
}

std::int64_t MintCounters::mint(const std::string& context) {
  auto [it, inserted] = next_.try_emplace(context, 1);
  return it->second++;
}

std::int64_t MintCounters::peek(const std::string& context) const {
  auto it = next_.find(context);
  return it == next_.end() ? 1 : it->second;
}

TokenSet apply_gates(std::span<const GateSpec> gates, TokenSet tokens, MintCounters& counters,
                     std::vector<GateEffect>* effects) {
  for (const auto& g : gates) {
    if (g.kind == GateKind::Open) {
      ContextToken t{g.context, counters.mint(g.context)};
      if (effects) effects->push_back({GateKind::Open, t});
      tokens.insert(std::move(t));
    } else {
      for (auto it = tokens.begin(); it != tokens.end();) {
        if (it->context == g.context) {
          if (effects) effects->push_back({GateKind::Close, *it});
          it = tokens.erase(it);
        } else {
          ++it;
        }
      }
    }
  }
  return tokens;
}

}  // namespace cloudadl
