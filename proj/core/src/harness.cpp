#include "oltd/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "oltd/channel.hpp"
#include "oltd/detector.hpp"
#include "oltd/fec.hpp"
#include "oltd/modem.hpp"
#include "oltd/rng.hpp"
#include "oltd/trellis.hpp"
#include "oltd/turbo.hpp"
#include "json.hpp"

namespace oltd {

namespace {

constexpr double kMinModelSigma = 1e-6;

enum class Waveform { Qpsk, Ook, Gfsk };

Waveform waveform_of(ScenarioId id) {
  switch (id) {
    case ScenarioId::QpskAwgn:
    case ScenarioId::QpskCauchy:
    case ScenarioId::QpskInterference:
      return Waveform::Qpsk;
    case ScenarioId::OokPoisson:
      return Waveform::Ook;
    default:
      return Waveform::Gfsk;
  }
}

NoiseKind noise_of(ScenarioId id) {
  switch (id) {
    case ScenarioId::QpskCauchy:
      return NoiseKind::Cauchy;
    case ScenarioId::QpskInterference:
      return NoiseKind::GaussianPam4;
    case ScenarioId::OokPoisson:
      return NoiseKind::Poisson;
    default:
      return NoiseKind::Gaussian;
  }
}

bool is_interleaved(ScenarioId id) {
  return id == ScenarioId::OokPoisson || id == ScenarioId::BleAwgnInterleaved ||
         id == ScenarioId::BleIsiInterleaved;
}

struct PointParams {
  double snr_db = 10.0;
  std::optional<double> lambda;
  std::optional<double> gamma;
  int pilot_len = 0;
};

PointParams resolve(const Scenario& sc, double value) {
  PointParams p;
  p.snr_db = sc.fixed_snr_db;
  p.pilot_len = sc.effective_pilot_len();
  switch (sc.sweep_var) {
    case SweepVar::SnrDb:
      p.snr_db = value;
      break;
    case SweepVar::Lambda:
      p.lambda = value;
      break;
    case SweepVar::Gamma:
      p.gamma = value;
      break;
    case SweepVar::Pilot:
      p.pilot_len = static_cast<int>(std::lround(value));
      if (p.pilot_len < 16 || p.pilot_len < sc.train.batch) throw ConfigError("pilot length must be >= 16 and >= batch");
      break;
  }
  return p;
}

Bits random_bits(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  Bits b(n);
  for (auto& v : b) v = static_cast<Bit>(coin(rng));
  return b;
}

std::int64_t count_errors(std::span<const Bit> a, std::span<const Bit> b) {
  std::int64_t e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += (a[i] != b[i]) ? 1 : 0;
  return e;
}

// One trial's transmission, as seen by any receiver.
struct Link {
  Trellis trellis;  // detection trellis with the true channel folded in
  SampleSeq y_pilot;
  SampleSeq y_payload;
  std::vector<int> pilot_branches;
  int payload_start = 0;
  Bits info;
  Interleaver interleaver = identity_interleaver(1);
  double model_sigma = 1.0;
  bool poisson = false;
};

Link transmit(const Scenario& sc, const PointParams& p, std::uint64_t seed) {
  Rng chan_rng(substream(seed, 11));
  Rng bit_rng(substream(seed, 12));
  Rng noise_rng(substream(seed, 13));

  const Waveform wf = waveform_of(sc.id);
  const bool coded = is_coded(sc.id);
  const int bps = wf == Waveform::Qpsk ? 2 : 1;

  std::uniform_real_distribution<double> gamma_dist(0.1, 1.0);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);

  ChannelRealization ch;
  ch.noise_kind = noise_of(sc.id);
  ch.sir_db = sc.noiseless ? std::numeric_limits<double>::infinity() : sc.sir_db;
  std::vector<Sample> history;
  std::optional<Trellis> trellis;

  double amplitude = 1.0;
  if (sc.id == ScenarioId::BleAwgn || sc.id == ScenarioId::BleAwgnInterleaved) {
    ch.taps = {std::polar(1.0, phase_dist(chan_rng))};
    trellis = build_gfsk_trellis().scaled(ch.taps[0]);
  } else {
    const double gamma = p.gamma ? *p.gamma : gamma_dist(chan_rng);
    const auto prof = exp_profile(gamma, 2);
    if (sc.id == ScenarioId::OokPoisson) amplitude = std::pow(10.0, p.snr_db / 10.0);
    ch.taps.clear();
    for (double h : prof) ch.taps.emplace_back(amplitude * h, 0.0);
    if (wf == Waveform::Qpsk) {
      const auto points = constellation(LinearScheme::QpskGray);
      trellis = build_isi_trellis(ch.taps, points);
      history = {points[0]};
    } else if (wf == Waveform::Ook) {
      trellis = build_isi_trellis(ch.taps, constellation(LinearScheme::Ook));
      history = {Sample{}};
    } else {
      trellis = build_gfsk_isi_trellis(ch.taps);
      history = {std::polar(1.0, std::numbers::pi / 4.0)};
    }
  }

  switch (ch.noise_kind) {
    case NoiseKind::Cauchy:
      ch.noise_param = sc.noiseless ? 0.0 : (p.lambda ? *p.lambda : snr_to_sigma(p.snr_db));
      break;
    case NoiseKind::Poisson:
      ch.noise_param = 0.0;
      break;
    default:
      ch.noise_param = sc.noiseless ? 0.0 : snr_to_sigma(p.snr_db);
      break;
  }

  Link link{*trellis, {}, {}, {}, 0, {}, identity_interleaver(1), std::max(ch.noise_param, kMinModelSigma),
            ch.noise_kind == NoiseKind::Poisson};

  const auto pilot_bits = random_bits(static_cast<std::size_t>(p.pilot_len) * static_cast<std::size_t>(bps), bit_rng);
  link.info = random_bits(static_cast<std::size_t>(sc.payload_len), bit_rng);

  Bits channel_bits;
  if (coded) {
    const Bits a = conv_encode(link.info);
    link.interleaver = is_interleaved(sc.id) ? make_interleaver(a.size(), substream(sc.seed, 0x1eaf))
                                             : identity_interleaver(a.size());
    channel_bits = link.interleaver.interleave<Bit>(a);
  } else {
    channel_bits = link.info;
  }

  Bits all_bits = pilot_bits;
  all_bits.insert(all_bits.end(), channel_bits.begin(), channel_bits.end());

  SampleSeq x;
  switch (wf) {
    case Waveform::Qpsk:
      x = map_linear(all_bits, LinearScheme::QpskGray);
      break;
    case Waveform::Ook:
      x = map_linear(all_bits, LinearScheme::Ook);
      break;
    case Waveform::Gfsk:
      x = gfsk_modulate(all_bits);
      break;
  }
  const SampleSeq y = apply_channel(x, ch, noise_rng, history);

  const auto labels = bits_to_labels(all_bits, bps);
  const auto branches = link.trellis.walk(labels, 0);
  const auto pilot = static_cast<std::size_t>(p.pilot_len);
  link.pilot_branches.assign(branches.begin(), branches.begin() + static_cast<std::ptrdiff_t>(pilot));
  link.payload_start = link.trellis.branch(branches[pilot - 1]).to;
  link.y_pilot.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(pilot));
  link.y_payload.assign(y.begin() + static_cast<std::ptrdiff_t>(pilot), y.end());
  return link;
}

LikelihoodMatrix likelihoods_for(Method method, const Scenario& sc, const Link& link, std::uint64_t seed) {
  if (method == Method::Model) {
    return link.poisson ? poisson_likelihoods(link.y_payload, link.trellis)
                        : gaussian_likelihoods(link.y_payload, link.trellis, link.model_sigma);
  }
  TrainConfig cfg = sc.train;
  cfg.seed = substream(seed, 14);
  cfg.input_dim = link.poisson ? 1 : 2;
  const auto trained = train_oltd(link.y_pilot, link.pilot_branches, link.trellis, cfg);
  return predict_likelihoods(trained.mlp, link.y_payload);
}

Bits detect(const Receiver& rx, const Scenario& sc, const Link& link, const LikelihoodMatrix& lik) {
  const Trellis& tr = link.trellis;
  const int bps = tr.bits_per_input();
  if (!is_coded(sc.id)) {
    if (rx.detector == DetectorKind::Viterbi) return labels_to_bits(viterbi_detect(lik, tr, link.payload_start), bps);
    return hard_decisions(bcjr_detect(lik, PriorTable::uniform(lik.rows(), tr), tr));
  }
  static const Trellis code = ble_code_trellis();
  switch (rx.detector) {
    case DetectorKind::Viterbi: {
      const Bits b = labels_to_bits(viterbi_detect(lik, tr, link.payload_start), bps);
      return viterbi_decode_cc_hard(link.interleaver.deinterleave<Bit>(b));
    }
    case DetectorKind::Bcjr: {
      const Bits b = hard_decisions(bcjr_detect(lik, PriorTable::uniform(lik.rows(), tr), tr));
      return viterbi_decode_cc_hard(link.interleaver.deinterleave<Bit>(b));
    }
    case DetectorKind::Turbo:
      return turbo_equalize(lik, tr, code, link.interleaver, rx.turbo_iters).bits;
  }
  return {};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string Receiver::label() const {
  std::string s{to_string(method)};
  s += '-';
  s += to_string(detector);
  if (detector == DetectorKind::Turbo) s += std::to_string(turbo_iters);
  return s;
}

int Scenario::effective_pilot_len() const noexcept {
  if (pilot_len > 0) return pilot_len;
  return waveform_of(id) == Waveform::Gfsk ? 256 : 500;
}

void Scenario::validate() const {
  if (receivers.empty()) throw ConfigError("at least one receiver is required");
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (payload_len < 1) throw ConfigError("payload must be >= 1 bit");
  if (sweep_var != SweepVar::Pilot && (effective_pilot_len() < 16 || effective_pilot_len() < train.batch)) {
    throw ConfigError("pilot length must be >= 16 and >= the training batch");
  }
  if (waveform_of(id) == Waveform::Qpsk && payload_len % 2 != 0) {
    throw ConfigError("QPSK payload must have an even number of bits");
  }
  if (train.epochs < 0 || train.batch < 1 || !(train.lr > 0.0) || train.hidden < 1) {
    throw ConfigError("invalid training settings");
  }
  if (sweep_var == SweepVar::Lambda && id != ScenarioId::QpskCauchy) {
    throw ConfigError("a lambda sweep needs the qpsk-cauchy scenario");
  }
  if (sweep_var == SweepVar::Gamma && (id == ScenarioId::BleAwgn || id == ScenarioId::BleAwgnInterleaved)) {
    throw ConfigError("ble-awgn has no ISI decay to sweep");
  }
  if (noiseless && id == ScenarioId::OokPoisson) throw ConfigError("the Poisson channel has no noiseless variant");
  if (!(max_failed_fraction >= 0.0)) throw ConfigError("max_failed_fraction must be >= 0");
  for (const auto& rx : receivers) {
    if (rx.detector == DetectorKind::Turbo && !is_coded(id)) {
      throw ConfigError("turbo detection needs a coded scenario");
    }
    if (rx.turbo_iters < 0) throw ConfigError("turbo iterations must be >= 0");
  }
}

std::vector<TrialOutcome> run_trial(const Scenario& scenario, double sweep_value, std::uint64_t trial_index) {
  const PointParams p = resolve(scenario, sweep_value);
  const std::uint64_t seed = child_seed(scenario.seed, to_string(scenario.id), trial_index);
  const Link link = transmit(scenario, p, seed);

  std::vector<TrialOutcome> out(scenario.receivers.size());
  std::optional<LikelihoodMatrix> lik[2];
  bool failed[2] = {false, false};
  for (std::size_t r = 0; r < scenario.receivers.size(); ++r) {
    const auto& rx = scenario.receivers[r];
    const auto m = static_cast<std::size_t>(rx.method);
    out[r].bits = static_cast<std::int64_t>(link.info.size());
    if (!lik[m] && !failed[m]) {
      try {
        lik[m] = likelihoods_for(rx.method, scenario, link, seed);
      } catch (const NumericalDegeneracy&) {
        failed[m] = true;
      }
    }
    if (failed[m]) {
      out[r].failed = true;
      continue;
    }
    try {
      out[r].errors = count_errors(detect(rx, scenario, link, *lik[m]), link.info);
    } catch (const NumericalDegeneracy&) {
      out[r].failed = true;
    }
  }
  return out;
}

std::vector<BerRecord> run_sweep(const Scenario& scenario, const std::function<void(const BerRecord&)>& on_record) {
  scenario.validate();
  const int workers = scenario.workers > 0 ? scenario.workers
                                           : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const auto trials = static_cast<std::size_t>(scenario.trials);
  const std::size_t nrx = scenario.receivers.size();

  std::vector<BerRecord> records;
  for (double value : scenario.grid) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<TrialOutcome>> outcomes(trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
      for (std::size_t i = next++; i < trials; i = next++) {
        try {
          outcomes[i] = run_trial(scenario, value, i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next = trials;
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (std::size_t r = 0; r < nrx; ++r) {
      BerRecord rec;
      rec.scenario = std::string(to_string(scenario.id));
      rec.method = scenario.receivers[r].label();
      rec.sweep_var = std::string(to_string(scenario.sweep_var));
      rec.sweep_value = value;
      rec.seed = scenario.seed;
      rec.wall_seconds = wall;
      double sum = 0.0;
      double sumsq = 0.0;
      int used = 0;
      for (const auto& per_trial : outcomes) {
        const auto& o = per_trial[r];
        if (o.failed) {
          ++rec.failed_trials;
          continue;
        }
        rec.errors += o.errors;
        rec.bits += o.bits;
        const double b = static_cast<double>(o.errors) / static_cast<double>(o.bits);
        sum += b;
        sumsq += b * b;
        ++used;
      }
      rec.trials = used;
      if (rec.failed_trials > 0) {
        std::cerr << "warning: " << rec.scenario << " " << rec.method << " at " << rec.sweep_var << "=" << value
                  << ": " << rec.failed_trials << " failed trial(s) excluded\n";
      }
      if (static_cast<double>(rec.failed_trials) > scenario.max_failed_fraction * static_cast<double>(trials)) {
        throw ExcessFailures(rec.scenario + " " + rec.method + ": " + std::to_string(rec.failed_trials) + " of " +
                             std::to_string(trials) + " trials failed at " + rec.sweep_var + "=" +
                             format_double(value));
      }
      rec.ber = rec.bits > 0 ? static_cast<double>(rec.errors) / static_cast<double>(rec.bits) : 0.0;
      if (used > 1) {
        const double mean = sum / used;
        const double var = std::max(0.0, (sumsq - used * mean * mean) / (used - 1));
        rec.ci95 = 1.96 * std::sqrt(var / used);
      }
      if (on_record) on_record(rec);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

namespace {

constexpr std::array<std::pair<ScenarioId, std::string_view>, 7> kScenarioNames{{
    {ScenarioId::QpskAwgn, "qpsk-awgn"},
    {ScenarioId::QpskCauchy, "qpsk-cauchy"},
    {ScenarioId::QpskInterference, "qpsk-interference"},
    {ScenarioId::OokPoisson, "ook-poisson"},
    {ScenarioId::BleAwgn, "ble-awgn"},
    {ScenarioId::BleAwgnInterleaved, "ble-awgn-interleaved"},
    {ScenarioId::BleIsiInterleaved, "ble-isi-interleaved"},
}};

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::string_view to_string(ScenarioId id) noexcept {
  for (const auto& [k, name] : kScenarioNames) {
    if (k == id) return name;
  }
  return "unknown";
}

std::string_view to_string(Method m) noexcept { return m == Method::Model ? "model" : "oltd"; }

std::string_view to_string(DetectorKind d) noexcept {
  switch (d) {
    case DetectorKind::Viterbi:
      return "viterbi";
    case DetectorKind::Bcjr:
      return "bcjr";
    case DetectorKind::Turbo:
      return "turbo";
  }
  return "unknown";
}

std::string_view to_string(SweepVar v) noexcept {
  switch (v) {
    case SweepVar::SnrDb:
      return "snr_db";
    case SweepVar::Lambda:
      return "lambda";
    case SweepVar::Gamma:
      return "gamma";
    case SweepVar::Pilot:
      return "pilot";
  }
  return "unknown";
}

std::optional<ScenarioId> parse_scenario_id(std::string_view s) noexcept {
  for (const auto& [k, name] : kScenarioNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) noexcept {
  if (s == "model") return Method::Model;
  if (s == "oltd") return Method::Oltd;
  return std::nullopt;
}

std::optional<DetectorKind> parse_detector(std::string_view s) noexcept {
  if (s == "viterbi") return DetectorKind::Viterbi;
  if (s == "bcjr") return DetectorKind::Bcjr;
  if (s == "turbo") return DetectorKind::Turbo;
  return std::nullopt;
}

bool is_coded(ScenarioId id) noexcept {
  return id == ScenarioId::OokPoisson || id == ScenarioId::BleAwgn || id == ScenarioId::BleAwgnInterleaved ||
         id == ScenarioId::BleIsiInterleaved;
}

std::vector<double> parse_grid(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return {parse_number(parts[0])};
  if (parts.size() != 3) throw ConfigError("grid must be 'lo:step:hi' or a single value");
  const double lo = parse_number(parts[0]);
  const double step = parse_number(parts[1]);
  const double hi = parse_number(parts[2]);
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  if (hi < lo) throw ConfigError("grid upper bound is below the lower bound");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (n > 100000) throw ConfigError("grid has too many points");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

void apply_config_json(Scenario& sc, const std::string& json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    std::vector<Method> methods;
    std::vector<DetectorKind> detectors;
    int turbo_iters = sc.receivers.empty() ? 2 : sc.receivers.front().turbo_iters;
    for (const auto& [key, val] : j.items()) {
      if (key == "scenario") {
        const auto id = parse_scenario_id(val.get<std::string>());
        if (!id) throw ConfigError("unknown scenario '" + val.get<std::string>() + "'");
        sc.id = *id;
      } else if (key == "method" || key == "detector") {
        std::vector<std::string> names;
        if (val.is_array()) {
          names = val.get<std::vector<std::string>>();
        } else {
          for (auto part : split(val.get<std::string>(), ',')) names.emplace_back(part);
        }
        for (const auto& n : names) {
          if (key == "method") {
            const auto m = parse_method(n);
            if (!m) throw ConfigError("unknown method '" + n + "'");
            methods.push_back(*m);
          } else {
            const auto d = parse_detector(n);
            if (!d) throw ConfigError("unknown detector '" + n + "'");
            detectors.push_back(*d);
          }
        }
      } else if (key == "snr" || key == "lambda" || key == "gamma" || key == "pilot_grid") {
        sc.grid = val.is_string() ? parse_grid(val.get<std::string>()) : val.is_array()
                                                                         ? val.get<std::vector<double>>()
                                                                         : std::vector<double>{val.get<double>()};
        sc.sweep_var = key == "snr"      ? SweepVar::SnrDb
                       : key == "lambda" ? SweepVar::Lambda
                       : key == "gamma"  ? SweepVar::Gamma
                                         : SweepVar::Pilot;
      } else if (key == "fixed_snr") {
        sc.fixed_snr_db = val.get<double>();
      } else if (key == "trials") {
        sc.trials = val.get<int>();
      } else if (key == "pilot") {
        sc.pilot_len = val.get<int>();
      } else if (key == "payload") {
        sc.payload_len = val.get<int>();
      } else if (key == "turbo_iters") {
        turbo_iters = val.get<int>();
      } else if (key == "seed") {
        sc.seed = val.get<std::uint64_t>();
      } else if (key == "workers") {
        sc.workers = val.get<int>();
      } else if (key == "sir_db") {
        sc.sir_db = val.get<double>();
      } else if (key == "epochs") {
        sc.train.epochs = val.get<int>();
      } else if (key == "noiseless") {
        sc.noiseless = val.get<bool>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
    if (methods.empty()) {
      for (const auto& rx : sc.receivers) {
        if (std::find(methods.begin(), methods.end(), rx.method) == methods.end()) methods.push_back(rx.method);
      }
    }
    if (detectors.empty()) {
      for (const auto& rx : sc.receivers) {
        if (std::find(detectors.begin(), detectors.end(), rx.detector) == detectors.end()) {
          detectors.push_back(rx.detector);
        }
      }
    }
    sc.receivers.clear();
    for (auto m : methods) {
      for (auto d : detectors) sc.receivers.push_back(Receiver{m, d, turbo_iters});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

}  // namespace oltd
