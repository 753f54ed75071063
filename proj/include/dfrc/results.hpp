#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dfrc/config.hpp"
#include "dfrc/driver.hpp"

namespace dfrc {

inline constexpr int kManifestSchemaVersion = 1;

class IoError : public Error {
 public:
  using Error::Error;
};

struct ManifestInfo {
  std::string command;
  ExperimentConfig config;
  double wall_clock_seconds = 0.0;
};

/// `git describe` of the build, or "unknown".
std::string build_version();

/// CSV body for one curve: header `param,iteration,mean,std`, one row per point.
std::string curve_csv(const Curve& curve);

/// Writes `<kind>_<label>.csv` per curve plus `manifest.json` into `dir`
/// (created if needed). Returns the written paths, manifest last.
std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const std::filesystem::path& dir,
                                                const ManifestInfo& info);

}  // namespace dfrc
