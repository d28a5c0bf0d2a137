#pragma once

// Run configuration: a flat JSON document, overridden key by key by
// `--key value` flags. Unknown keys and out-of-range values are rejected with
// a message naming the key.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hom/experiments.hpp"
#include "hom/model.hpp"
#include "hom/trajectory.hpp"

namespace hom::cli {

enum class Command { kEntangleSweep, kRedistribute, kOracleCheck, kSpectrum };
enum class Format { kCsv, kJson };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyType { kDouble, kSize, kUInt64, kInt, kString, kBool, kGrid };

struct KeySpec {
  std::string_view name;
  KeyType type;
  std::string_view help;
};

/// Every accepted key, in documentation order.
const std::vector<KeySpec>& config_keys();

struct SpectrumConfig {
  double gamma = 1.0;
  double omega = 0.0;
  double t = 1000.0;
  double nu_min = -10.0;
  double nu_max = 10.0;
  std::size_t nu_points = 201;
};

struct RunConfig {
  Command command = Command::kEntangleSweep;
  SystemParams params;
  std::size_t n_traj = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::optional<std::string> out;
  Format format = Format::kCsv;
  SweptParam param = SweptParam::kEta;
  std::vector<double> grid;
  Sampler sampler = Sampler::kWaitingTime;
  SpectrumConfig spectrum;
  bool debug_corrupt_channels = false;
};

/// Default trajectory count per command.
std::size_t default_n_traj(Command command);

/// Reads and parses a JSON object. IoError if unreadable, ConfigError if malformed.
nlohmann::json load_config_file(const std::string& path);

/// Converts a flag's text to the JSON type its key expects.
nlohmann::json flag_value(std::string_view key, const std::string& text);

/// Merges `flags` over `file` and validates the result.
RunConfig parse_config(Command command, const nlohmann::json& file, const nlohmann::json& flags);

}  // namespace hom::cli
