#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "locauth/sim/event_log.hpp"

namespace locauth {

struct VerdictLine {
  std::string game;
  std::int64_t attack = -1;
  std::string verdict;
  std::string reason;
};

/// Counts taken from a finished event log.
struct RunSummary {
  std::size_t logins_sent = 0;       // by honest devices
  std::size_t logins_attempted = 0;  // reached a beacon's service
  std::size_t authenticated = 0;
  std::map<std::string, std::size_t> rejections;  // by reason
  std::size_t sessions_established = 0;
  std::size_t travels = 0;
  std::size_t travels_rejected = 0;
  std::size_t fallbacks = 0;
  std::size_t invariant_violations = 0;
  std::vector<VerdictLine> verdicts;
};

RunSummary summarize(const sim::EventLog& log);
std::string render_summary(const RunSummary& s);

}  // namespace locauth
