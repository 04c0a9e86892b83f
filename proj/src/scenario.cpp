#include "fairdyn/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "fairdyn/builtins.hpp"
#include "fairdyn/expression.hpp"

namespace fairdyn {

DynamicsSpec DynamicsSource::build() const {
  if (is_builtin()) {
    if (!f0Expr.empty() || !f1Expr.empty()) throw ValidationError("dynamics: give either builtin or f0/f1, not both");
    if (L0 || L1) throw ValidationError("dynamics: builtin dynamics carry their own Lipschitz constants");
    return make_builtin(builtin, params);
  }
  if (f0Expr.empty() || f1Expr.empty()) throw ValidationError("dynamics: f0 and f1 expressions are required");
  if (!params.empty()) throw ValidationError("dynamics: parameters need a builtin");
  if (L0.has_value() != L1.has_value()) throw ValidationError("dynamics: declare both L0 and L1 or neither");
  for (const auto& l : {L0, L1})
    if (l && !(*l >= 0.0 && std::isfinite(*l))) throw ValidationError("dynamics: Lipschitz constants must be >= 0");
  return parse_dynamics(f0Expr, f1Expr, L0, L1);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineError {
 public:
  explicit LineError(int line) : line_(line) {}
  [[noreturn]] void operator()(const std::string& msg) const {
    throw ValidationError("scenario line " + std::to_string(line_) + ": " + msg);
  }

 private:
  int line_;
};

double to_double(const std::string& v, const LineError& fail) {
  double out = 0.0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  if (!v.empty() && *b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e || !std::isfinite(out)) fail("expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& v, const LineError& fail) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) fail("expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, const LineError& fail) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const LineError& fail) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), fail));
  if (out.empty()) fail("empty list");
  return out;
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (s.name.empty()) throw ValidationError("scenario name must not be empty");
  for (char c : s.name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      throw ValidationError("scenario name may only contain letters, digits, '_', '-', '.'");
  (void)s.dynamics.build();
  (void)s.initial_state();
  (void)s.utility();
  if (s.timeMode == TimeMode::DT) {
    if (s.steps < 0) throw ValidationError("steps must be >= 0");
  } else {
    if (!(s.tEnd >= 0.0)) throw ValidationError("tEnd must be >= 0");
    if (!(s.h > 0.0)) throw ValidationError("h must be > 0");
    if (!(s.sampleEvery >= 0.0)) throw ValidationError("sampleEvery must be >= 0");
  }
  if (s.outputs.resolution < 2) throw ValidationError("field resolution must be >= 2");
  if (s.stereotype) validate_stereotype(s.initial_state(), s.stereotype->at(0.0));
}

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::vector<double> epsA, epsB;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineNo = 0;
  bool sawSteps = false, sawTEnd = false;

  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"name", "mode", "time"}},
      {"dynamics", {"builtin", "f0", "f1", "L0", "L1"}},
      {"state", {"piA", "piB", "gA"}},
      {"utility", {"u0", "u1"}},
      {"run", {"steps", "tEnd", "h", "sampleEvery"}},
      {"stereotype", {"epsA", "epsB"}},
      {"output", {"trajectory", "report", "field", "resolution"}},
  };

  while (std::getline(in, raw)) {
    ++lineNo;
    const LineError fail(lineNo);
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!keys.count(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!seen.insert(section + "." + key).second) fail("duplicate key '" + key + "'");

    const auto& allowed = keys.at(section);
    const bool builtinParam = section == "dynamics" && (key.rfind("f0.", 0) == 0 || key.rfind("f1.", 0) == 0);
    if (!allowed.count(key) && !builtinParam) fail("unknown key '" + key + "' in [" + section + "]");
    if (val.empty()) fail("missing value for '" + key + "'");

    try {
      if (section == "scenario") {
        if (key == "name") s.name = val;
        else if (key == "mode") s.mode = parse_policy_mode(val);
        else s.timeMode = parse_time_mode(val);
      } else if (section == "dynamics") {
        if (builtinParam) s.dynamics.params[key] = to_double(val, fail);
        else if (key == "builtin") s.dynamics.builtin = val;
        else if (key == "f0") s.dynamics.f0Expr = val;
        else if (key == "f1") s.dynamics.f1Expr = val;
        else if (key == "L0") s.dynamics.L0 = to_double(val, fail);
        else s.dynamics.L1 = to_double(val, fail);
      } else if (section == "state") {
        (key == "piA" ? s.piA : key == "piB" ? s.piB : s.gA) = to_double(val, fail);
      } else if (section == "utility") {
        (key == "u0" ? s.u0 : s.u1) = to_double(val, fail);
      } else if (section == "run") {
        if (key == "steps") {
          s.steps = to_long(val, fail);
          sawSteps = true;
        } else if (key == "tEnd") {
          s.tEnd = to_double(val, fail);
          sawTEnd = true;
        } else if (key == "h") s.h = to_double(val, fail);
        else s.sampleEvery = to_double(val, fail);
      } else if (section == "stereotype") {
        (key == "epsA" ? epsA : epsB) = to_list(val, fail);
      } else {
        if (key == "resolution") s.outputs.resolution = static_cast<int>(to_long(val, fail));
        else (key == "trajectory" ? s.outputs.trajectory : key == "report" ? s.outputs.report : s.outputs.field) =
            to_bool(val, fail);
      }
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      if (msg.rfind("scenario line", 0) == 0) throw;
      fail(msg);
    }
  }

  if (s.timeMode == TimeMode::DT && sawTEnd) throw ValidationError("scenario: tEnd is a CT setting; DT uses steps");
  if (s.timeMode == TimeMode::CT && sawSteps) throw ValidationError("scenario: steps is a DT setting; CT uses tEnd");

  if (!epsA.empty() || !epsB.empty()) {
    if (epsA.empty()) epsA = {0.0};
    if (epsB.empty()) epsB = {0.0};
    if (epsA.size() != epsB.size() && epsA.size() != 1 && epsB.size() != 1)
      throw ValidationError("stereotype: epsA and epsB lists must have equal length or length 1");
    const std::size_t n = std::max(epsA.size(), epsB.size());
    std::vector<StereotypeSpec> entries(n);
    for (std::size_t i = 0; i < n; ++i)
      entries[i] = {epsA[epsA.size() == 1 ? 0 : i], epsB[epsB.size() == 1 ? 0 : i]};
    s.stereotype = StereotypeSchedule(std::move(entries));
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream o;
  o << "[scenario]\n"
    << "name = " << s.name << "\n"
    << "mode = " << to_string(s.mode) << "\n"
    << "time = " << to_string(s.timeMode) << "\n\n";

  o << "[dynamics]\n";
  if (s.dynamics.is_builtin()) {
    o << "builtin = " << s.dynamics.builtin << "\n";
    for (const auto& [k, v] : s.dynamics.params) o << k << " = " << fmt(v) << "\n";
  } else {
    o << "f0 = " << s.dynamics.f0Expr << "\n"
      << "f1 = " << s.dynamics.f1Expr << "\n";
  }
  if (s.dynamics.L0) o << "L0 = " << fmt(*s.dynamics.L0) << "\n";
  if (s.dynamics.L1) o << "L1 = " << fmt(*s.dynamics.L1) << "\n";
  o << "\n";

  o << "[state]\n"
    << "piA = " << fmt(s.piA) << "\n"
    << "piB = " << fmt(s.piB) << "\n"
    << "gA = " << fmt(s.gA) << "\n\n";
  o << "[utility]\n"
    << "u0 = " << fmt(s.u0) << "\n"
    << "u1 = " << fmt(s.u1) << "\n\n";

  o << "[run]\n";
  if (s.timeMode == TimeMode::DT) {
    o << "steps = " << s.steps << "\n\n";
  } else {
    o << "tEnd = " << fmt(s.tEnd) << "\n"
      << "h = " << fmt(s.h) << "\n"
      << "sampleEvery = " << fmt(s.sampleEvery) << "\n\n";
  }

  if (s.stereotype) {
    auto join = [&](bool a) {
      std::string out;
      for (const auto& e : s.stereotype->entries()) {
        if (!out.empty()) out += ", ";
        out += fmt(a ? e.epsA : e.epsB);
      }
      return out;
    };
    o << "[stereotype]\n"
      << "epsA = " << join(true) << "\n"
      << "epsB = " << join(false) << "\n\n";
  }

  o << "[output]\n"
    << "trajectory = " << (s.outputs.trajectory ? "true" : "false") << "\n"
    << "report = " << (s.outputs.report ? "true" : "false") << "\n"
    << "field = " << (s.outputs.field ? "true" : "false") << "\n"
    << "resolution = " << s.outputs.resolution << "\n";
  return o.str();
}

}  // namespace fairdyn
