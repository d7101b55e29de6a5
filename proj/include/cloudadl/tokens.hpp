#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cloudadl/topology.hpp"

namespace cloudadl {

struct ContextToken {
  std::string context;
  std::int64_t serial = 0;

  auto operator<=>(const ContextToken&) const = default;
  bool operator==(const ContextToken&) const = default;
};

using TokenSet = std::set<ContextToken>;

std::string render(const ContextToken& t);  // ctx#serial
// Rendered tokens sorted as strings and joined with ','; "-" when empty.
std::string render(const TokenSet& tokens);

// Next serial per context name. Serials start at 1.
class MintCounters {
 public:
  std::int64_t mint(const std::string& context);
  std::int64_t peek(const std::string& context) const;
  void set(const std::string& context, std::int64_t next) { next_[context] = next; }

 private:
  std::map<std::string, std::int64_t> next_;
};

struct GateEffect {
  GateKind kind = GateKind::Open;
  ContextToken token;
};

// Opens mint a fresh token of their context; closes strip every token of
// theirs. Gates apply in list order.
TokenSet apply_gates(std::span<const GateSpec> gates, TokenSet tokens, MintCounters& counters,
                     std::vector<GateEffect>* effects = nullptr);

}  // namespace cloudadl
