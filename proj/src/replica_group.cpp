#include "cloudadl/replica_group.hpp"

#include <algorithm>

#include "cloudadl/errors.hpp"

namespace cloudadl {

ReplicaGroup::ReplicaGroup(std::string path, std::size_t initial) : path_(std::move(path)) {
  status_.assign(std::max<std::size_t>(initial, 1), ReplicaStatus::Live);
}

ReplicaGroup::Selection ReplicaGroup::select(const TokenSet& tokens, std::optional<ReplicaId> pinned) {
  Selection sel;
  if (pinned && *pinned < status_.size() && status_[*pinned] != ReplicaStatus::Retired) {
    sel.replica = *pinned;
  } else {
    std::optional<ReplicaId> bound;
    for (const auto& t : tokens) {  // ascending (context, serial): first hit is the lowest
      auto it = bindings_.find(t);
      if (it != bindings_.end()) {
        bound = it->second;
        break;
      }
    }
    if (bound) {
      sel.replica = *bound;
    } else {
      std::vector<ReplicaId> candidates = live();
      if (candidates.empty()) throw RuntimeError(RuntimeErrc::EmptyGroup, "no live replica in " + path_);
      sel.replica = candidates[counter_ % candidates.size()];
      ++counter_;
    }
  }

  for (const auto& t : tokens) {
    if (bindings_.emplace(t, sel.replica).second) sel.newlyBound.push_back(t);
  }
  return sel;
}

ReplicaId ReplicaGroup::add() {
  status_.push_back(ReplicaStatus::Live);
  return status_.size() - 1;
}

void ReplicaGroup::mark_retiring(ReplicaId id) {
  if (status_.at(id) == ReplicaStatus::Live) status_[id] = ReplicaStatus::Retiring;
}

void ReplicaGroup::reactivate(ReplicaId id) {
  if (status_.at(id) == ReplicaStatus::Retiring) status_[id] = ReplicaStatus::Live;
}

void ReplicaGroup::retire(ReplicaId id) {
  status_.at(id) = ReplicaStatus::Retired;
  std::erase_if(bindings_, [id](const auto& kv) { return kv.second == id; });
}

std::vector<ReplicaId> ReplicaGroup::live() const {
  std::vector<ReplicaId> out;
  for (ReplicaId i = 0; i < status_.size(); ++i)
    if (status_[i] == ReplicaStatus::Live) out.push_back(i);
  return out;
}

std::vector<ReplicaId> ReplicaGroup::retiring() const {
  std::vector<ReplicaId> out;
  for (ReplicaId i = 0; i < status_.size(); ++i)
    if (status_[i] == ReplicaStatus::Retiring) out.push_back(i);
  return out;
}

std::size_t ReplicaGroup::live_count() const {
  return static_cast<std::size_t>(std::count(status_.begin(), status_.end(), ReplicaStatus::Live));
}

std::size_t ReplicaGroup::size() const {
  return static_cast<std::size_t>(std::count_if(status_.begin(), status_.end(), [](ReplicaStatus s) {
    return s != ReplicaStatus::Retired;
  }));
}

}  // namespace cloudadl
