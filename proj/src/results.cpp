#include "dfrc/results.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include <json.hpp>

#ifndef DFRC_GIT_DESCRIBE
#define DFRC_GIT_DESCRIBE "unknown"
#endif

namespace dfrc {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string build_version() { return DFRC_GIT_DESCRIBE; }

std::string curve_csv(const Curve& curve) {
  std::string out = "param,iteration,mean,std\n";
  for (const auto& p : curve.points)
    out += fmt_double(p.param) + "," + std::to_string(p.iteration) + "," + fmt_double(p.mean) + "," +
           fmt_double(p.stddev) + "\n";
  return out;
}

std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const std::filesystem::path& dir,
                                                const ManifestInfo& info) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  using nlohmann::ordered_json;
  ordered_json manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["command"] = info.command;
  manifest["kind"] = result.kind;
  manifest["seed"] = info.config.run.seed;
  manifest["git_describe"] = build_version();
  manifest["wall_clock_seconds"] = info.wall_clock_seconds;
  ordered_json config = ordered_json::object();
  for (const auto& [key, value] : config_entries(info.config)) config[key] = value;
  manifest["config"] = std::move(config);

  std::vector<std::filesystem::path> written;
  ordered_json curves = ordered_json::array();
  for (const auto& curve : result.curves) {
    const std::string name = result.kind + "_" + curve.label + ".csv";
    const auto path = dir / name;
    write_file(path, curve_csv(curve));
    written.push_back(path);

    ordered_json entry;
    entry["label"] = curve.label;
    entry["file"] = name;
    entry["param_name"] = curve.param_name;
    entry["points"] = curve.points.size();
    if (!curve.traces.empty()) {
      // Gain of the final objective over iteration 0, averaged in dB.
      double gain_db = 0.0;
      int converged = 0;
      for (const auto& t : curve.traces) {
        gain_db += linear_to_db(t.final_objective() / t.initial_objective());
        converged += t.termination == Termination::Converged ? 1 : 0;
      }
      entry["realizations"] = curve.traces.size();
      entry["converged_runs"] = converged;
      entry["mean_gain_db"] = gain_db / static_cast<double>(curve.traces.size());
      ordered_json iterations = ordered_json::array();
      for (const auto& t : curve.traces) iterations.push_back(t.iterations());
      entry["iterations"] = std::move(iterations);
    } else if (!curve.samples.empty()) {
      entry["realizations"] = curve.samples.front().size();
    }
    curves.push_back(std::move(entry));
  }
  manifest["curves"] = std::move(curves);

  const auto manifest_path = dir / "manifest.json";
  write_file(manifest_path, manifest.dump(2) + "\n");
  written.push_back(manifest_path);
  return written;
}

}  // namespace dfrc
