#pragma once

// Domain types for a two-group selection process and the quantities an
// institution derives from a policy: selection rates and average utility.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fairdyn {

inline constexpr double kUtilityTol = 1e-9;
inline constexpr double kProbTol = 1e-12;

enum class Group { A = 0, B = 1 };

constexpr Group other(Group g) { return g == Group::A ? Group::B : Group::A; }
constexpr int idx(Group g) { return static_cast<int>(g); }
const char* to_string(Group g);

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fraction of a group evaluated as qualified (v = 1). p0 is always derived.
class QualificationProfile {
 public:
  QualificationProfile() = default;
  explicit QualificationProfile(double p1);

  double p1() const { return p1_; }
  double p0() const { return 1.0 - p1_; }
  double p(int v) const { return v == 1 ? p1_ : 1.0 - p1_; }

  friend bool operator==(const QualificationProfile&, const QualificationProfile&) = default;

 private:
  double p1_ = 0.0;
};

class PopulationState {
 public:
  PopulationState(QualificationProfile piA, QualificationProfile piB, double gA);
  PopulationState(double piA, double piB, double gA)
      : PopulationState(QualificationProfile(piA), QualificationProfile(piB), gA) {}

  const QualificationProfile& profile(Group g) const { return g == Group::A ? piA_ : piB_; }
  const QualificationProfile& piA() const { return piA_; }
  const QualificationProfile& piB() const { return piB_; }
  double gA() const { return gA_; }
  double gB() const { return 1.0 - gA_; }
  double share(Group g) const { return g == Group::A ? gA_ : 1.0 - gA_; }

  // pi(1|A) - pi(1|B)
  double delta() const { return piA_.p1() - piB_.p1(); }

  // Same shares, groups relabelled (A <-> B).
  PopulationState swapped() const { return {piB_, piA_, 1.0 - gA_}; }

  friend bool operator==(const PopulationState&, const PopulationState&) = default;

 private:
  QualificationProfile piA_;
  QualificationProfile piB_;
  double gA_;
};

// u(0) <= 0 <= u(1). Both may be zero.
class UtilitySpec {
 public:
  UtilitySpec(double u0, double u1);
  double u0() const { return u0_; }
  double u1() const { return u1_; }
  double u(int v) const { return v == 1 ? u1_ : u0_; }

 private:
  double u0_;
  double u1_;
};

// Selection probability tau(v; j) for evaluation v and group j.
class Policy {
 public:
  Policy() = default;
  // Entries are [v][group]. Values within kProbTol outside [0,1] are snapped.
  explicit Policy(const std::array<std::array<double, 2>, 2>& tau);
  static Policy make(double tau1A, double tau0A, double tau1B, double tau0B);
  static Policy all_zero() { return Policy{}; }

  double tau(int v, Group g) const { return tau_[v][idx(g)]; }
  const std::array<std::array<double, 2>, 2>& table() const { return tau_; }

  Policy swapped() const;

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::array<std::array<double, 2>, 2> tau_{};
};

struct SelectionRates {
  std::array<std::array<double, 2>, 2> betaV{};  // [v][group]
  std::array<double, 2> betaAgg{};               // [group]

  double per_evaluation(int v, Group g) const { return betaV[v][idx(g)]; }
  double aggregate(Group g) const { return betaAgg[idx(g)]; }
  double parity_residual() const { return std::abs(betaAgg[0] - betaAgg[1]); }
};

SelectionRates selection_rates(const PopulationState& state, const Policy& policy);

// Average institutional utility sum_j g_j sum_v u(v) tau(v;j) pi(v|j).
double utility(const PopulationState& state, const Policy& policy, const UtilitySpec& u);

}  // namespace fairdyn
