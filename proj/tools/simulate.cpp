// Monte Carlo BER sweeps from the command line.
//
//   simulate --scenario qpsk-awgn --method oltd,model --detector bcjr
//            --snr 0:2:12 --trials 500 --out ber.csv
//
// Exit codes: 0 success, 2 invalid configuration, 3 too many failed trials.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "oltd/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFailures = 3;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo BER sweeps for trellis detectors with learned likelihoods"};

  std::string config_path;
  std::string scenario_name;
  std::string methods = "oltd";
  std::string detectors = "bcjr";
  std::string snr;
  std::string lambda;
  std::string gamma;
  std::string pilot_grid;
  double fixed_snr = 10.0;
  int trials = 0;
  int pilot = 0;
  int payload = 0;
  int turbo_iters = 2;
  std::uint64_t seed = 1;
  int workers = 0;
  double sir_db = 0.0;
  int epochs = 0;
  bool noiseless = false;
  std::string out_path;
  std::string format = "csv";

  app.add_option("--config", config_path, "JSON file with scenario fields; flags override it")->check(CLI::ExistingFile);
  auto* o_scenario = app.add_option("--scenario", scenario_name, "scenario id");
  auto* o_method = app.add_option("--method", methods, "model|oltd (comma list allowed)");
  auto* o_detector = app.add_option("--detector", detectors, "viterbi|bcjr|turbo (comma list allowed)");
  auto* o_snr = app.add_option("--snr", snr, "SNR grid in dB, lo:step:hi");
  auto* o_lambda = app.add_option("--lambda", lambda, "Cauchy scale grid, lo:step:hi");
  auto* o_gamma = app.add_option("--gamma", gamma, "fixed channel decay grid, lo:step:hi");
  auto* o_pilot_grid = app.add_option("--pilot-grid", pilot_grid, "pilot length grid, lo:step:hi");
  auto* o_fixed_snr = app.add_option("--fixed-snr", fixed_snr, "SNR in dB when the grid is not SNR");
  auto* o_trials = app.add_option("--trials", trials, "trials per grid point");
  auto* o_pilot = app.add_option("--pilot", pilot, "pilot length in samples");
  auto* o_payload = app.add_option("--payload", payload, "information bits per trial");
  auto* o_turbo = app.add_option("--turbo-iters", turbo_iters, "turbo iterations");
  auto* o_seed = app.add_option("--seed", seed, "master seed");
  auto* o_workers = app.add_option("--workers", workers, "worker threads (0 = all cores)");
  auto* o_sir = app.add_option("--sir", sir_db, "4-PAM interference SIR in dB");
  auto* o_epochs = app.add_option("--epochs", epochs, "training epochs");
  auto* o_noiseless = app.add_flag("--noiseless", noiseless, "disable additive noise");
  app.add_option("--out", out_path, "output file")->required();
  app.add_option("--format", format, "csv|plotdata")->check(CLI::IsMember({"csv", "plotdata"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  oltd::Scenario sc;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      oltd::apply_config_json(sc, buf.str());
    }
    if (*o_scenario) {
      const auto id = oltd::parse_scenario_id(scenario_name);
      if (!id) throw oltd::ConfigError("unknown scenario '" + scenario_name + "'");
      sc.id = *id;
    } else if (config_path.empty()) {
      throw oltd::ConfigError("--scenario is required");
    }

    if (*o_method || *o_detector || *o_turbo) {
      std::vector<oltd::Method> ms;
      std::vector<oltd::DetectorKind> ds;
      for (const auto& rx : sc.receivers) {
        if (std::find(ms.begin(), ms.end(), rx.method) == ms.end()) ms.push_back(rx.method);
        if (std::find(ds.begin(), ds.end(), rx.detector) == ds.end()) ds.push_back(rx.detector);
      }
      if (*o_method) {
        ms.clear();
        for (const auto& m : split_list(methods)) {
          const auto v = oltd::parse_method(m);
          if (!v) throw oltd::ConfigError("unknown method '" + m + "'");
          ms.push_back(*v);
        }
      }
      if (*o_detector) {
        ds.clear();
        for (const auto& d : split_list(detectors)) {
          const auto v = oltd::parse_detector(d);
          if (!v) throw oltd::ConfigError("unknown detector '" + d + "'");
          ds.push_back(*v);
        }
      }
      const int iters = *o_turbo ? turbo_iters : sc.receivers.front().turbo_iters;
      sc.receivers.clear();
      for (auto m : ms) {
        for (auto d : ds) sc.receivers.push_back(oltd::Receiver{m, d, iters});
      }
    }

    const int grids = static_cast<int>(o_snr->count() + o_lambda->count() + o_gamma->count() + o_pilot_grid->count());
    if (grids > 1) throw oltd::ConfigError("give only one of --snr, --lambda, --gamma, --pilot-grid");
    if (*o_snr) {
      sc.grid = oltd::parse_grid(snr);
      sc.sweep_var = oltd::SweepVar::SnrDb;
    } else if (*o_lambda) {
      sc.grid = oltd::parse_grid(lambda);
      sc.sweep_var = oltd::SweepVar::Lambda;
    } else if (*o_gamma) {
      sc.grid = oltd::parse_grid(gamma);
      sc.sweep_var = oltd::SweepVar::Gamma;
    } else if (*o_pilot_grid) {
      sc.grid = oltd::parse_grid(pilot_grid);
      sc.sweep_var = oltd::SweepVar::Pilot;
    }
    if (*o_fixed_snr) sc.fixed_snr_db = fixed_snr;
    if (*o_trials) sc.trials = trials;
    if (*o_pilot) sc.pilot_len = pilot;
    if (*o_payload) sc.payload_len = payload;
    if (*o_seed) sc.seed = seed;
    if (*o_workers) sc.workers = workers;
    if (*o_sir) sc.sir_db = sir_db;
    if (*o_epochs) sc.train.epochs = epochs;
    if (*o_noiseless) sc.noiseless = noiseless;
    sc.validate();
  } catch (const oltd::ConfigError& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const auto records = oltd::run_sweep(sc, [](const oltd::BerRecord& r) {
      std::cerr << r.scenario << ' ' << r.method << ' ' << r.sweep_var << '=' << r.sweep_value << "  ber=" << r.ber
                << " +- " << r.ci95 << "  (" << r.errors << '/' << r.bits << ", " << r.wall_seconds << " s)\n";
    });
    oltd::emit(records, out_path, format == "csv" ? oltd::OutputFormat::Csv : oltd::OutputFormat::PlotData);
  } catch (const oltd::ExcessFailures& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return kExitFailures;
  } catch (const oltd::ConfigError& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
