#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "dfrc/config.hpp"

using namespace dfrc;

namespace {

ConfigError::Kind error_kind(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config_text(text, overrides);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigError::Kind::Io;
}

}  // namespace

TEST_CASE("table1 preset carries the published parameters") {
  const ExperimentConfig c = preset("table1");
  const RunConfig& r = c.run;
  CHECK(r.geometry.num_radar_antennas == 8);
  CHECK(r.geometry.irs_rows * r.geometry.irs_cols == 64);
  CHECK(r.channel.num_users == 5);
  CHECK(r.channel.rician_factor == doctest::Approx(1.0));  // 0 dB
  CHECK(r.weights.noise_radar == doctest::Approx(1.0));
  CHECK(r.weights.noise_comm == doctest::Approx(1.0));
  CHECK(r.beampattern_threshold == doctest::Approx(10.0));  // 10 dB
  CHECK(r.transmit_power == doctest::Approx(1000.0));       // 30 dB
  CHECK(r.epsilon == doctest::Approx(1e-3));
  CHECK(r.max_iterations == 500);
  CHECK(r.ascent.step == doctest::Approx(0.1));
  CHECK(c.alphas == std::vector<double>{0.1, 0.5, 0.9});
  CHECK(c.realizations == 20);
  CHECK_NOTHROW(r.validate());
  CHECK_THROWS_AS(preset("table9"), ConfigError);
}

TEST_CASE("preset line plus override") {
  const ExperimentConfig c = parse_config_text("preset = table1\n", {"alpha=0.9", "irs_rows=4"});
  CHECK(c.run.weights.alpha == 0.9);
  CHECK(c.run.geometry.irs_rows == 4);
  CHECK(c.run.geometry.irs_cols == 8);

  const ExperimentConfig d = parse_config_text("preset = table1\nalpha = 0.2 # comment\n", {"alpha=0.7"});
  CHECK(d.run.weights.alpha == 0.7);
}

TEST_CASE("dB and linear forms") {
  const ExperimentConfig a = parse_config_text("preset = table1\ntransmit_power_db = 20\n");
  CHECK(a.run.transmit_power == doctest::Approx(100.0));
  const ExperimentConfig b = parse_config_text("preset = table1\ntransmit_power = 100\ntransmit_power_db = 20\n");
  CHECK(b.run.transmit_power == doctest::Approx(100.0));
  CHECK(error_kind("preset = table1\ntransmit_power = 1000\ntransmit_power_db = 20\n") ==
        ConfigError::Kind::BadValue);
}

TEST_CASE("errors carry kind, key and line") {
  CHECK(error_kind("preset = table1\nalpha = 1.5\n") == ConfigError::Kind::BadValue);
  CHECK(error_kind("preset = table1\nalpha = banana\n") == ConfigError::Kind::BadValue);
  CHECK(error_kind("preset = table1\nnum_users = -2\n") == ConfigError::Kind::BadValue);
  CHECK(error_kind("preset = table1\nnot_a_key = 3\n") == ConfigError::Kind::UnknownKey);
  CHECK(error_kind("preset = table1\nthis line has no equals\n") == ConfigError::Kind::Syntax);
  CHECK(error_kind("preset = table1\nalpha = 0.1\nalpha = 0.2\n") == ConfigError::Kind::BadValue);
  CHECK(error_kind("alpha = 0.5\n") == ConfigError::Kind::MissingKey);
  CHECK(error_kind("preset = nope\n") == ConfigError::Kind::BadValue);
  CHECK(error_kind("preset = table1\n", {"alpha"}) == ConfigError::Kind::Syntax);

  try {
    parse_config_text("preset = table1\n\nalpha = 2\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "alpha");
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("BadValue") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config("/nonexistent/dfrc.cfg"), ConfigError);
}

TEST_CASE("print_config round-trips without a preset") {
  ExperimentConfig c = parse_config_text("preset = table1\n", {"alpha=0.3", "sweep_irs=2x3,4x4", "seed=99",
                                                               "theta_init=random_phases"});
  const std::string text = print_config(c);
  CHECK(text.find("preset") == std::string::npos);
  const ExperimentConfig back = parse_config_text(text);
  CHECK(back == c);
  CHECK(print_config(back) == text);
  CHECK(back.run.theta_init == ThetaInit::RandomPhases);
  CHECK(back.sweep_irs == std::vector<std::pair<int, int>>{{2, 3}, {4, 4}});

  // Dropping any key line from the full text is a MissingKey error.
  std::istringstream lines(text);
  std::string line;
  std::string first_key;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#') {
      first_key = line;
      break;
    }
  REQUIRE(first_key.find('=') != std::string::npos);
  std::string without = text;
  without.erase(without.find(first_key), first_key.size());
  CHECK(error_kind(without) == ConfigError::Kind::MissingKey);
}

TEST_CASE("explicit desired covariance round-trips") {
  const ExperimentConfig c = parse_config_text(
      "preset = table1\nnum_radar_antennas = 2\ntransmit_power = 2\nbeampattern_threshold = 0.5\n"
      "desired_covariance = (1.5,0) (0.25,-0.5) (0.25,0.5) (0.5,0)\n");
  REQUIRE(c.run.desired_covariance.has_value());
  CHECK(std::abs((*c.run.desired_covariance)(0, 1) - Complex(0.25, -0.5)) < 1e-15);
  CHECK(parse_config_text(print_config(c)) == c);

  CHECK(error_kind("preset = table1\nnum_radar_antennas = 2\ntransmit_power = 2\n"
                   "desired_covariance = (1,0) (0,0) (0,0)\n") == ConfigError::Kind::BadValue);
  CHECK(error_kind("preset = table1\nnum_radar_antennas = 2\ntransmit_power = 5\n"
                   "desired_covariance = (1,0) (0,0) (0,0) (1,0)\n") == ConfigError::Kind::BadValue);
}

TEST_CASE("parse_config reads a file") {
  const std::string path = "dfrc_test_config.cfg";
  {
    std::ofstream out(path);
    out << "# comment line\npreset = table1\nrealizations = 3\n";
  }
  const ExperimentConfig c = parse_config(path, {"realizations=4"});
  CHECK(c.realizations == 4);
  std::remove(path.c_str());
}
