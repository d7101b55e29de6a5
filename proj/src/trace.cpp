#include "cloudadl/trace.hpp"

#include <array>

namespace cloudadl {

namespace {
constexpr std::array<std::pair<EventKind, const char*>, 10> kNames{{
    {EventKind::Send, "SEND"},
    {EventKind::Deliver, "DELIVER"},
    {EventKind::Mint, "MINT"},
    {EventKind::Strip, "STRIP"},
    {EventKind::Bind, "BIND"},
    {EventKind::Raise, "RAISE"},
    {EventKind::Restart, "RESTART"},
    {EventKind::Escalate, "ESCALATE"},
    {EventKind::Scale, "SCALE"},
    {EventKind::Fatal, "FATAL"},
}};
}  // namespace

const char* to_string(EventKind k) {
  for (const auto& [kind, name] : kNames)
    if (kind == k) return name;
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (const auto& [kind, name] : kNames)
    if (text == name) return kind;
  return std::nullopt;
}

std::string render(const Event& e) {
  std::string line = std::to_string(e.step);
  line += '\t';
  line += to_string(e.kind);
  line += '\t';
  line += e.subject;
  line += '\t';
  line += e.seq ? std::to_string(e.seq) : "-";
  line += '\t';
  line += render(e.tokens);
  line += '\t';
  line += e.payload.empty() ? "-" : e.payload;
  return line;
}

std::string render_trace(const EventLog& log) {
  std::string out;
  for (const auto& e : log) {
    out += render(e);
    out += '\n';
  }
  return out;
}

}  // namespace cloudadl
