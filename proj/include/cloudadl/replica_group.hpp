#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cloudadl/tokens.hpp"

namespace cloudadl {

using ReplicaId = std::size_t;

enum class ReplicaStatus { Live, Retiring, Retired };

// The replicas realizing one replicating subcomponent. Ids are never reused.
// Retiring replicas still receive messages bound to them but take no new
// unbound traffic.
class ReplicaGroup {
 public:
  explicit ReplicaGroup(std::string path, std::size_t initial = 1);

  struct Selection {
    ReplicaId replica = 0;
    std::vector<ContextToken> newlyBound;
  };

  // A pinned, not yet retired replica wins, then the lowest bound token, then
  // round-robin over live(). Unbound message tokens get bound to the choice.
  // Throws RuntimeError(EmptyGroup).
  Selection select(const TokenSet& tokens, std::optional<ReplicaId> pinned = std::nullopt);

  ReplicaId add();
  void mark_retiring(ReplicaId id);
  void reactivate(ReplicaId id);
  void retire(ReplicaId id);  // drops bindings to `id`

  const std::string& path() const { return path_; }
  ReplicaStatus status(ReplicaId id) const { return status_.at(id); }
  std::size_t id_count() const { return status_.size(); }
  std::vector<ReplicaId> live() const;      // status Live, ascending id
  std::vector<ReplicaId> retiring() const;  // status Retiring, ascending id
  std::size_t live_count() const;
  std::size_t size() const;  // live + retiring
  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }
  const std::map<ContextToken, ReplicaId>& bindings() const { return bindings_; }
  void bind(const ContextToken& t, ReplicaId id) { bindings_[t] = id; }

 private:
  std::string path_;
  std::vector<ReplicaStatus> status_;
  std::uint64_t counter_ = 0;
  std::map<ContextToken, ReplicaId> bindings_;
};

}  // namespace cloudadl
