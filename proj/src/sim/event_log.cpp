#include "locauth/sim/event_log.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace locauth::sim {

Event& EventLog::append(std::int64_t t_us, std::string_view kind) {
  Event e = Event::object();
  e["t_us"] = t_us;
  e["kind"] = std::string(kind);
  events_.push_back(std::move(e));
  return events_.back();
}

std::size_t EventLog::count(std::string_view kind) const {
  std::size_t n = 0;
  for (const auto& e : events_) n += e["kind"].get_ref<const std::string&>() == kind;
  return n;
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    out += e.dump();
    out += '\n';
  }
  return out;
}

void EventLog::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_jsonl();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

EventLog EventLog::from_jsonl(std::string_view text) {
  EventLog log;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    Event e;
    try {
      e = Event::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw std::invalid_argument("event log line " + std::to_string(line_no) + ": malformed JSON");
    }
    if (!e.is_object() || !e.contains("t_us") || !e["t_us"].is_number_integer() ||
        !e.contains("kind") || !e["kind"].is_string()) {
      throw std::invalid_argument("event log line " + std::to_string(line_no) +
                                  ": missing t_us/kind");
    }
    log.events_.push_back(std::move(e));
  }
  return log;
}

EventLog EventLog::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

}  // namespace locauth::sim
