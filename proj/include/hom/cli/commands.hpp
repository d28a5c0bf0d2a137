#pragma once

// Command dispatch and serialization. Every command is a pure function of
// (config, seed); the timestamp only appears in JSON metadata.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hom/cli/config.hpp"
#include "hom/experiments.hpp"
#include "hom/lindblad.hpp"

namespace hom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitOracle = 4;

/// 17 significant digits, '.' separator, locale independent.
std::string format_double(double v);

std::string sweep_csv(const SweepResult& result);
std::string redistribution_csv(const SweepResult& result);
nlohmann::json sweep_json(const SweepResult& result, bool redistribution);

std::string spectrum_csv(const SpectrumConfig& s);
nlohmann::json spectrum_json(const SpectrumConfig& s);

nlohmann::json params_json(const SystemParams& p);

struct OracleCheck {
  std::string name;
  bool passed = false;
  nlohmann::json details;
};

/// max |(H_eff - H) + (i/2) sum L^dag L| over entries, full-model generator.
double channel_consistency_defect(const SystemParams& p, const std::vector<JumpChannel>& channels);

/// Recorded click times of a single cavity photon decaying next to frozen ions
/// (g = Omega = gamma = 0, eta = 1), starting from |a a>|1 0>. Rate is 2 kappa.
std::vector<double> frozen_ion_click_times(const SystemParams& p, Sampler sampler, std::size_t n,
                                           std::uint64_t seed, int threads = 0, double dt = 1e-4);

/// Consistency, unitary limit (kappa = gamma = 0 only), Lindblad comparison and
/// the waiting-time KS tests.
std::vector<OracleCheck> run_oracle_suite(const RunConfig& cfg);

struct CommandOutput {
  std::string text;
  bool ok = true;  ///< false when an oracle check failed
};

CommandOutput execute(const RunConfig& cfg);

/// Writes to cfg.out, or stdout when unset. Throws IoError.
void write_output(const RunConfig& cfg, const std::string& text);

}  // namespace hom::cli
