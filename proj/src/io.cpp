#include "fairdyn/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fairdyn {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec) {
  out << kTrajectoryHeader << '\n';
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const PopulationState& s = rec.states[i];
    const Policy& p = rec.policies[i];
    const SelectionRates r = selection_rates(s, p);
    const double cols[] = {rec.times[i],          s.piA().p1(),          s.piB().p1(),      rec.delta[i],
                           p.tau(1, Group::A),    p.tau(0, Group::A),    p.tau(1, Group::B), p.tau(0, Group::B),
                           r.aggregate(Group::A), r.aggregate(Group::B), rec.perStepUtility[i],
                           rec.runningUtility[i]};
    for (double c : cols) out << format_number(c) << ',';
    out << to_string(rec.cases[i]) << ',' << event_flags_to_string(rec.flags[i]) << '\n';
  }
}

void write_field_csv(std::ostream& out, const FieldGrid& grid) {
  out << kFieldHeader << '\n';
  for (const auto& p : grid.points) {
    out << format_number(p.piB) << ',' << format_number(p.piA) << ',' << format_number(p.dA) << ','
        << format_number(p.dB) << ',' << format_number(p.diffA) << ',' << format_number(p.diffB) << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace fairdyn
