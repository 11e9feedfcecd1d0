#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oltd/network.hpp"

namespace oltd {

enum class ScenarioId {
  QpskAwgn,
  QpskCauchy,
  QpskInterference,
  OokPoisson,
  BleAwgn,
  BleAwgnInterleaved,
  BleIsiInterleaved,
};

enum class Method { Model, Oltd };
enum class DetectorKind { Viterbi, Bcjr, Turbo };

/// What the sweep grid values mean.
///  - SnrDb: Es/N0 in dB (Cauchy: the scale that Gaussian noise would have at
///    this SNR; Poisson: on-level intensity 10^(x/10)).
///  - Lambda: Cauchy scale directly.
///  - Gamma: fixed channel decay instead of a random one per trial.
///  - Pilot: pilot length in samples.
enum class SweepVar { SnrDb, Lambda, Gamma, Pilot };

/// Thrown for scenario settings that cannot be run.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when more trials fail than the scenario tolerates.
class ExcessFailures : public std::runtime_error {
 public:
  explicit ExcessFailures(const std::string& what) : std::runtime_error(what) {}
};

struct Receiver {
  Method method = Method::Oltd;
  DetectorKind detector = DetectorKind::Bcjr;
  int turbo_iters = 2;

  /// CSV method label, e.g. "oltd-bcjr" or "model-turbo2".
  std::string label() const;
};

struct Scenario {
  ScenarioId id = ScenarioId::QpskAwgn;
  std::vector<Receiver> receivers{Receiver{}};
  int pilot_len = 0;  ///< samples; 0 picks 500 (QPSK, OOK) or 256 (GFSK)
  int payload_len = 1000;  ///< information bits per trial
  SweepVar sweep_var = SweepVar::SnrDb;
  std::vector<double> grid{10.0};
  double fixed_snr_db = 10.0;  ///< noise level when the grid is not SNR
  double sir_db = 0.0;         ///< 4-PAM interferer
  int trials = 500;
  std::uint64_t seed = 1;
  int workers = 0;  ///< 0 = hardware concurrency
  bool noiseless = false;
  double max_failed_fraction = 0.01;
  TrainConfig train{};

  int effective_pilot_len() const noexcept;
  /// Throws ConfigError on an unusable combination.
  void validate() const;
};

struct TrialOutcome {
  std::int64_t errors = 0;
  std::int64_t bits = 0;
  bool failed = false;
};

struct BerRecord {
  std::string scenario;
  std::string method;
  std::string sweep_var;
  double sweep_value = 0.0;
  std::int64_t errors = 0;
  std::int64_t bits = 0;
  double ber = 0.0;
  std::uint64_t seed = 0;
  int trials = 0;
  int failed_trials = 0;
  double ci95 = 0.0;  ///< half-width of the 95% interval from per-trial BERs
  double wall_seconds = 0.0;
};

std::string_view to_string(ScenarioId id) noexcept;
std::string_view to_string(Method m) noexcept;
std::string_view to_string(DetectorKind d) noexcept;
std::string_view to_string(SweepVar v) noexcept;
std::optional<ScenarioId> parse_scenario_id(std::string_view s) noexcept;
std::optional<Method> parse_method(std::string_view s) noexcept;
std::optional<DetectorKind> parse_detector(std::string_view s) noexcept;

/// True for scenarios with a convolutional code in the transmitter.
bool is_coded(ScenarioId id) noexcept;

/// Runs one Monte Carlo trial at one grid value, for every receiver of the
/// scenario. All receivers see the same channel, bits and noise; networks
/// are trained once per trial. Trials that hit NumericalDegeneracy come back
/// with `failed` set.
std::vector<TrialOutcome> run_trial(const Scenario& scenario, double sweep_value, std::uint64_t trial_index);

/// Runs every grid value; records come out in grid order, receivers in
/// scenario order within a grid value. Throws ExcessFailures when the
/// failed fraction at any grid value exceeds `max_failed_fraction`.
std::vector<BerRecord> run_sweep(const Scenario& scenario,
                                 const std::function<void(const BerRecord&)>& on_record = {});

/// Parses "lo:step:hi" (inclusive) or a single value. Throws ConfigError.
std::vector<double> parse_grid(std::string_view spec);

/// Applies a JSON configuration object to `scenario`. Keys mirror the CLI
/// flags: scenario, method, detector, snr, lambda, gamma, pilot_grid,
/// trials, pilot, payload, turbo_iters, seed, workers, sir_db, epochs,
/// noiseless. Throws ConfigError.
void apply_config_json(Scenario& scenario, const std::string& json_text);

inline constexpr std::string_view kCsvHeader = "scenario,method,sweep_var,sweep_value,errors,bits,ber,seed";

std::string to_csv(const std::vector<BerRecord>& records);
/// One block per method: "# <method>" then "sweep_value ber" lines; blocks
/// are separated by a blank line.
std::string to_plotdata(const std::vector<BerRecord>& records);
/// Parses CSV produced by to_csv(). Throws std::invalid_argument.
std::vector<BerRecord> parse_csv(std::string_view text);

enum class OutputFormat { Csv, PlotData };
/// Writes records to `path`. Throws std::runtime_error naming the path on
/// I/O failure.
void emit(const std::vector<BerRecord>& records, const std::string& path, OutputFormat format);

}  // namespace oltd
