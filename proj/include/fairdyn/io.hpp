#pragma once

// Bit-stable text output: trajectory CSV and gradient-field CSV. Numbers are
// written with 17 significant digits.

#include <iosfwd>
#include <string>
#include <vector>

#include "fairdyn/dynamics.hpp"

namespace fairdyn {

std::string format_number(double v);

inline constexpr const char* kTrajectoryHeader =
    "t,piA,piB,delta,tau1A,tau0A,tau1B,tau0B,betaA,betaB,stepUtility,cumUtility,caseTag,eventFlags";
inline constexpr const char* kFieldHeader = "piB,piA,dA,dB,diffA,diffB";

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec);

struct FieldPoint {
  double piB = 0.0;
  double piA = 0.0;
  double dA = 0.0;
  double dB = 0.0;
  double diffA = 0.0;  // dA(mode) - dA(UN)
  double diffB = 0.0;
};

struct FieldGrid {
  int resolution = 0;          // points per axis
  PolicyMode mode = PolicyMode::UN;
  std::vector<FieldPoint> points;  // piB-major, piA-minor, both ascending
};

void write_field_csv(std::ostream& out, const FieldGrid& grid);

// Writes text to path, replacing any existing file; throws std::runtime_error.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace fairdyn
