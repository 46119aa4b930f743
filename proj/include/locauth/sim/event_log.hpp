#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace locauth::sim {

using Event = nlohmann::ordered_json;

/// Append-only list of events. Every event starts with {t_us, kind}.
class EventLog {
 public:
  Event& append(std::int64_t t_us, std::string_view kind);
  void push(Event event) { events_.push_back(std::move(event)); }

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  std::size_t count(std::string_view kind) const;

  /// One compact JSON object per line, each terminated by '\n'.
  std::string to_jsonl() const;
  void write(const std::filesystem::path& path) const;

  /// Inverse of to_jsonl. Throws std::invalid_argument on malformed lines.
  static EventLog from_jsonl(std::string_view text);
  static EventLog read(const std::filesystem::path& path);

 private:
  std::vector<Event> events_;
};

}  // namespace locauth::sim
