#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairdyn/runner.hpp"

using namespace fairdyn;

namespace {

struct Common {
  std::string out = ".";
  bool strict = false;
  int resolution = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_flag("--strict", c.strict, "Treat warnings as errors");
  cmd->add_option("--resolution", c.resolution, "Grid resolution override")->check(CLI::PositiveNumber);
}

template <class F>
int guarded(const std::string& label, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "fairdyn: " << label << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}

std::string out_path(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairdyn: selection policies under demographic parity and population response dynamics"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> files;
  std::string file;
  std::uint64_t seed = 1;
  int instances = 2000;

  auto* cmd_simulate = app.add_subcommand("simulate", "Run scenarios and write their requested outputs");
  cmd_simulate->add_option("scenario", files, "Scenario files")->required()->check(CLI::ExistingFile);
  add_common(cmd_simulate, common);

  auto* cmd_analyze = app.add_subcommand("analyze", "Contraction report, equilibrium atlas and verdicts");
  cmd_analyze->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  add_common(cmd_analyze, common);

  auto* cmd_compare = app.add_subcommand("compare", "Cumulative utility under UN, AA1 and AA2");
  cmd_compare->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  add_common(cmd_compare, common);

  auto* cmd_field = app.add_subcommand("field", "Export the CT gradient field on a grid");
  cmd_field->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  add_common(cmd_field, common);

  auto* cmd_verify = app.add_subcommand("verify", "Run the randomized oracle and property suites");
  cmd_verify->add_option("--seed", seed, "Seed for the randomized suites")->capture_default_str();
  cmd_verify->add_option("--instances", instances, "Instances per suite")->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*cmd_simulate) {
    RunOptions opts;
    opts.outDir = common.out;
    opts.strict = common.strict;
    opts.resolution = common.resolution;
    // One worker per scenario; the grid kernels inside stay serial.
    opts.exec = files.size() > 1 ? kernels::Exec::Serial : kernels::Exec::Parallel;
    std::vector<int> codes(files.size(), kExitOk);
    std::vector<std::string> logs(files.size());
#pragma omp parallel for schedule(dynamic) if (files.size() > 1)
    for (std::size_t i = 0; i < files.size(); ++i) {
      std::ostringstream log;
      try {
        const Scenario s = load_scenario(files[i]);
        const ArtifactSet a = run_scenario(s, opts);
        for (const auto& w : a.warnings) log << "warning: " << s.name << ": " << w << "\n";
        for (const auto& f : a.files) log << f << "\n";
      } catch (const std::exception& e) {
        log << "fairdyn: " << files[i] << ": " << e.what() << "\n";
        codes[i] = exit_code_for(e);
      }
      logs[i] = log.str();
    }
    for (std::size_t i = 0; i < files.size(); ++i) (codes[i] ? std::cerr : std::cout) << logs[i];
    return *std::max_element(codes.begin(), codes.end());
  }

  if (*cmd_analyze) {
    return guarded(file, [&] {
      const Scenario s = load_scenario(file);
      const auto rep = analyze(s, common.resolution > 0 ? common.resolution : 256);
      const std::string text = rep.dump(2) + "\n";
      write_text_file(out_path(common, s.name + ".report.json"), text);
      std::cout << text;
      return int(kExitOk);
    });
  }

  if (*cmd_compare) {
    return guarded(file, [&] {
      const Scenario s = load_scenario(file);
      const Comparison c = compare_policies(s, common.strict);
      const std::string text = to_json(c).dump(2) + "\n";
      write_text_file(out_path(common, s.name + ".compare.json"), text);
      std::cout << text;
      return int(kExitOk);
    });
  }

  if (*cmd_field) {
    return guarded(file, [&] {
      const Scenario s = load_scenario(file);
      const int res = common.resolution > 0 ? common.resolution : s.outputs.resolution;
      const FieldGrid g = export_field(s.dynamics.build(), s.mode, s.utility(), s.gA, res);
      std::ostringstream csv;
      write_field_csv(csv, g);
      const std::string path = out_path(common, s.name + ".field.csv");
      write_text_file(path, csv.str());
      std::cout << path << "\n";
      return int(kExitOk);
    });
  }

  return guarded("verify", [&] {
    const VerifyReport rep = run_verify(seed, instances);
    for (const auto& l : rep.lines) std::cout << (l.passed ? "PASS " : "FAIL ") << l.name << "  " << l.detail << "\n";
    return rep.all_passed() ? int(kExitOk) : int(kExitVerifyFailed);
  });
}
