#pragma once

// Event log of a run. One trace line per event:
//   step<TAB>KIND<TAB>subject<TAB>seq<TAB>tokens<TAB>payload
// seq is "-" for events not tied to a message, tokens "-" when empty and
// payload "-" when there is none.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cloudadl/tokens.hpp"

namespace cloudadl {

enum class EventKind { Send, Deliver, Mint, Strip, Bind, Raise, Restart, Escalate, Scale, Fatal };

const char* to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct Event {
  std::int64_t step = 0;
  EventKind kind = EventKind::Send;
  std::string subject;
  std::uint64_t seq = 0;  // 0: none
  TokenSet tokens;
  std::string payload;

  // Structured detail for programmatic checks; not part of the trace text.
  std::optional<std::size_t> channel;
  std::optional<std::size_t> node;
  std::optional<std::size_t> replica;
  std::string port;
  bool external = false;  // DELIVER on a root out-port
};

using EventLog = std::vector<Event>;

std::string render(const Event& e);
std::string render_trace(const EventLog& log);

}  // namespace cloudadl
