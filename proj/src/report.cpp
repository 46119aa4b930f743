#include "locauth/report.hpp"

#include <sstream>

namespace locauth {

RunSummary summarize(const sim::EventLog& log) {
  RunSummary s;
  for (const auto& e : log.events()) {
    const auto& kind = e["kind"].get_ref<const std::string&>();
    if (kind == "LoginSent") {
      ++s.logins_sent;
    } else if (kind == "Authenticated") {
      ++s.logins_attempted;
      ++s.authenticated;
    } else if (kind == "Rejected") {
      ++s.logins_attempted;
      ++s.rejections[e.value("reason", std::string("?"))];
    } else if (kind == "SessionEstablished") {
      ++s.sessions_established;
    } else if (kind == "SessionTraveled") {
      ++s.travels;
    } else if (kind == "TravelRejected") {
      ++s.travels_rejected;
    } else if (kind == "FallbackRequired") {
      ++s.fallbacks;
    } else if (kind == "InvariantViolation") {
      ++s.invariant_violations;
    } else if (kind == "GameVerdict") {
      s.verdicts.push_back({e.value("game", std::string()), e.value("attack", std::int64_t{-1}),
                            e.value("verdict", std::string()), e.value("reason", std::string())});
    }
  }
  return s;
}

std::string render_summary(const RunSummary& s) {
  std::ostringstream out;
  out << "logins sent:          " << s.logins_sent << '\n'
      << "logins attempted:     " << s.logins_attempted << '\n'
      << "logins succeeded:     " << s.authenticated << '\n'
      << "sessions established: " << s.sessions_established << '\n'
      << "travels:              " << s.travels << '\n'
      << "travels rejected:     " << s.travels_rejected << '\n'
      << "fallbacks required:   " << s.fallbacks << '\n';
  out << "rejections:";
  if (s.rejections.empty()) out << " none";
  out << '\n';
  for (const auto& [reason, n] : s.rejections) out << "  " << reason << ": " << n << '\n';
  out << "invariant violations: " << s.invariant_violations << '\n';
  for (const auto& v : s.verdicts) {
    out << "game " << v.game;
    if (v.attack >= 0) out << " (attack " << v.attack << ")";
    out << ": " << v.verdict;
    if (!v.reason.empty()) out << " - " << v.reason;
    out << '\n';
  }
  return out.str();
}

}  // namespace locauth
