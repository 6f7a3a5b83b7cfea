// Scenario engine: runs scripted store scenarios end to end, writes their
// input streams, and generates the synthetic pose dataset.

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "shoplift/classifier.hpp"
#include "shoplift/pose_templates.hpp"
#include "shoplift/simulator.hpp"

using namespace shoplift;

namespace {

void print_table(std::ostream& out, const std::vector<RunReport>& reports) {
  out << std::left << std::setw(24) << "scenario" << std::right << std::setw(8) << "frames" << std::setw(8)
      << "events" << std::setw(8) << "alerts" << std::setw(8) << "thefts" << std::setw(6) << "TP" << std::setw(6)
      << "FP" << std::setw(6) << "miss" << std::setw(11) << "precision" << std::setw(8) << "recall" << "  status\n";
  for (const RunReport& r : reports) {
    out << std::left << std::setw(24) << r.scenario << std::right << std::setw(8) << r.frames << std::setw(8)
        << r.events << std::setw(8) << r.alerts.size() << std::setw(8) << r.scripted_thefts << std::setw(6)
        << r.true_positives << std::setw(6) << r.false_positives << std::setw(6) << r.misses << std::setw(11)
        << std::fixed << std::setprecision(3) << r.precision << std::setw(8) << r.recall << "  "
        << (r.failed ? "FAILED" : (!r.audit_violations.empty() || !r.ground_truth_consistent) ? "AUDIT" : "ok")
        << '\n';
    out.unsetf(std::ios::fixed);
  }
}

bool healthy(const RunReport& r) { return !r.failed && r.audit_violations.empty() && r.ground_truth_consistent; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shoplift scenario simulator"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();

  std::string scenario_path;
  bool as_json = false;
  std::string work_dir;
  auto* run = app.add_subcommand("run", "run one scenario in-process and print its report");
  run->add_option("scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_flag("--json", as_json, "print the report as JSON");
  run->add_option("--work-dir", work_dir, "keep the decision and inventory logs here");

  std::vector<std::string> scenario_paths;
  std::string out;
  bool no_latency = false;
  auto* report = app.add_subcommand("report", "run scenarios; JSON reports plus a summary table");
  report->add_option("scenarios", scenario_paths, "scenario JSON files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", out, "write the JSON here instead of stdout");
  report->add_flag("--no-latency", no_latency, "omit wall-clock latency fields (byte-stable output)");

  std::size_t n = kBenchmarkSamples;
  double sigma = kBenchmarkSigmaPx;
  std::uint64_t seed = kBenchmarkSeed;
  auto* dataset = app.add_subcommand("generate-dataset", "synthetic labeled pose dataset (NDJSON)");
  dataset->add_option("--n", n, "sample count")->capture_default_str();
  dataset->add_option("--sigma", sigma, "landmark jitter in pixels on a 128 px face")->capture_default_str();
  dataset->add_option("--seed", seed, "seed")->capture_default_str();
  dataset->add_option("--out", out, "output file, stdout when omitted");

  std::string dir;
  auto* streams = app.add_subcommand("generate-streams", "write a scenario's frame, sale and observation streams");
  streams->add_option("scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  streams->add_option("--out", dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (run->parsed()) {
      RunOptions options;
      if (!work_dir.empty()) {
        options.work_dir = work_dir;
      }
      const RunReport r = run_scenario(load_scenario(scenario_path), options);
      if (as_json) {
        std::cout << to_json(r).dump(2) << '\n';
      } else {
        std::cout << format_report(r);
      }
      return healthy(r) ? 0 : 1;
    }
    if (report->parsed()) {
      std::vector<RunReport> reports;
      Json all = Json::array();
      for (const std::string& path : scenario_paths) {
        reports.push_back(run_scenario(load_scenario(path)));
        all.push_back(to_json(reports.back(), !no_latency));
      }
      if (out.empty()) {
        std::cout << all.dump(2) << '\n';
        print_table(std::cerr, reports);
      } else {
        std::ofstream(out) << all.dump(2) << '\n';
        print_table(std::cout, reports);
      }
      return std::all_of(reports.begin(), reports.end(), healthy) ? 0 : 1;
    }
    if (dataset->parsed()) {
      PoseDatasetParams params;
      params.sigma_px = sigma;
      const auto samples = generate_pose_dataset(params, n, seed);
      if (out.empty()) {
        write_dataset(std::cout, samples);
      } else {
        std::ofstream file(out);
        write_dataset(file, samples);
      }
      return 0;
    }
    const Scenario scenario = load_scenario(scenario_path);
    const Timeline timeline = build_timeline(scenario);
    write_timeline(scenario, timeline, dir);
    std::cerr << "wrote " << timeline.items.size() << " items for " << scenario.name << " to " << dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
