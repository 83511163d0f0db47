// Copyright 2026 The Dissim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dissim/device.hpp"
#include "dissim/errors.hpp"
#include "dissim/serialize.hpp"
#include "scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dissim;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;

struct InputSpec {
  std::string kind;  // "coherent" | "fock"
  std::vector<Complex> amplitudes;
  std::vector<int> occupations;
};

Complex parse_complex(const std::string& text) {
  // forms: "1", "-0.5", "1+2i", "0.3-0.7i", "1i"
  std::string s = text;
  const bool has_i = !s.empty() && (s.back() == 'i' || s.back() == 'j');
  if (!has_i) return Complex(std::stod(s), 0.0);
  s.pop_back();
  // split at the last +/- that is not an exponent sign or leading sign
  size_t split = std::string::npos;
  for (size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) {
    return Complex(0.0, s.empty() || s == "+" ? 1.0 : s == "-" ? -1.0 : std::stod(s));
  }
  const std::string im = s.substr(split);
  return Complex(std::stod(s.substr(0, split)),
                 im == "+" ? 1.0 : im == "-" ? -1.0 : std::stod(im));
}

InputSpec parse_input(const std::string& text, int modes) {
  const size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw SchemaError("--input", "expected coherent:... or fock:...");
  }
  InputSpec spec;
  spec.kind = text.substr(0, colon);
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    try {
      if (spec.kind == "coherent") {
        spec.amplitudes.push_back(parse_complex(item));
      } else if (spec.kind == "fock") {
        spec.occupations.push_back(std::stoi(item));
      } else {
        throw SchemaError("--input", "unknown input kind '" + spec.kind + "'");
      }
    } catch (const SchemaError&) {
      throw;
    } catch (const std::exception&) {
      throw SchemaError("--input", "cannot parse value '" + item + "'");
    }
  }
  const size_t count =
      spec.kind == "coherent" ? spec.amplitudes.size() : spec.occupations.size();
  if (static_cast<int>(count) != modes) {
    throw SchemaError("--input", "expected one value per mode");
  }
  return spec;
}

DeviceState initial_state(const DeviceSpec& device, const InputSpec& input) {
  const StateKind kind = required_state_kind(device);
  const TruncatedSpace space = device.space();
  switch (kind) {
    case StateKind::Amplitudes: {
      if (input.kind != "coherent") {
        throw SchemaError("--input", "amplitude devices take coherent inputs");
      }
      Vector alpha(device.modes);
      for (int m = 0; m < device.modes; ++m) alpha[m] = input.amplitudes[m];
      return DeviceState(std::move(alpha));
    }
    case StateKind::Populations: {
      if (input.kind == "coherent") {
        const double mean = std::norm(input.amplitudes[0]);
        return DeviceState(poisson_populations(space, mean));
      }
      RealVector p = RealVector::Zero(space.dim());
      if (input.occupations[0] < 0 || input.occupations[0] > space.cutoff(0)) {
        throw SchemaError("--input", "occupation exceeds the cutoff");
      }
      p[input.occupations[0]] = 1.0;
      return DeviceState(PopulationVector(space, std::move(p)));
    }
    default: {
      if (input.kind == "coherent") {
        return DeviceState(coherent_state(space, input.amplitudes));
      }
      return DeviceState(fock_state(space, input.occupations));
    }
  }
}

void write_trajectory(const DeviceSpec& device, const DeviceState& input,
                      bool reversed, const fs::path& path) {
  std::vector<const PartSpec*> parts;
  for (const PartSpec& p : device.parts) parts.push_back(&p);
  if (reversed) std::reverse(parts.begin(), parts.end());

  const StateKind kind = required_state_kind(device);
  if (kind == StateKind::Amplitudes) {
    std::vector<std::string> header{"gamma_t"};
    for (int m = 0; m < device.modes; ++m) {
      header.push_back("re_" + std::to_string(m));
      header.push_back("im_" + std::to_string(m));
    }
    CsvWriter csv(std::move(header));
    auto emit = [&](double t, const Vector& alpha) {
      std::vector<double> row{t};
      for (int m = 0; m < device.modes; ++m) {
        row.push_back(alpha[m].real());
        row.push_back(alpha[m].imag());
      }
      csv.add_row(row);
    };
    Vector alpha = std::get<Vector>(input);
    double t_base = 0.0;
    emit(0.0, alpha);
    for (const PartSpec* part : parts) {
      const CouplingMatrix m = [&] {
        std::vector<LinearLindblad> ls;
        for (const TermSpec& ts : std::get<LindbladParams>(part->params).terms) {
          Vector c(device.modes);
          for (int i = 0; i < device.modes; ++i) c[i] = ts.coeffs[i];
          ls.emplace_back(ts.rate, std::move(c));
        }
        return coupling_matrix(ls, device.modes);
      }();
      if (part->asymptotic) {
        alpha = asymptotic_scatter(m).entries() * alpha;
        emit(t_base, alpha);
      } else {
        const int substeps = 50;
        for (int k = 1; k <= substeps; ++k) {
          emit(t_base + part->duration * k / substeps,
               propagate(alpha, m, part->duration * k / substeps));
        }
        alpha = propagate(alpha, m, part->duration);
        t_base += part->duration;
      }
    }
    csv.write_file(path.string());
    return;
  }

  if (kind == StateKind::Populations) {
    CsvWriter csv({"gamma_t", "mean_n", "sum"});
    PopulationVector p = std::get<PopulationVector>(input);
    double t_base = 0.0;
    csv.add_row({0.0, p.mean(), p.probs().sum()});
    for (const PartSpec* part : parts) {
      if (part->engine == EngineKind::Unitary) continue;  // identity
      DiagonalLossFamily family;
      for (const TermSpec& ts : std::get<LindbladParams>(part->params).terms) {
        if (ts.kind == "a") family.add_single_photon(ts.rate);
        else if (ts.kind == "a2") family.add_two_photon(ts.rate);
        else family.add_ncl(ts.rate, ts.m);
      }
      const int substeps = 40;
      const Eigen::MatrixXd step = population_propagator(
          family, p.cutoff(), part->duration / substeps);
      for (int k = 1; k <= substeps; ++k) {
        p = apply_population_propagator(step, p);
        csv.add_row({t_base + part->duration * k / substeps, p.mean(),
                     p.probs().sum()});
      }
      t_base += part->duration;
    }
    csv.write_file(path.string());
    return;
  }

  // density device: (t, <n> per mode, trace, min eigenvalue)
  std::vector<std::string> header{"gamma_t"};
  for (int m = 0; m < device.modes; ++m) header.push_back("n_" + std::to_string(m));
  header.push_back("trace");
  header.push_back("min_eigenvalue");
  CsvWriter csv(std::move(header));
  auto emit = [&](double t, const DensityMatrix& rho) {
    std::vector<double> row{t};
    for (int m = 0; m < device.modes; ++m) row.push_back(mean_photon_number(rho, m));
    row.push_back(rho.trace_real());
    row.push_back(rho.min_eigenvalue());
    csv.add_row(row);
  };
  DensityMatrix rho = std::get<DensityMatrix>(input);
  double t_base = 0.0;
  emit(0.0, rho);
  for (const PartSpec* part : parts) {
    if (part->engine == EngineKind::MasterFull && part->duration > 0.0) {
      const TruncatedSpace space = rho.space();
      std::vector<LindbladTerm> terms;
      for (const TermSpec& ts : std::get<LindbladParams>(part->params).terms) {
        if (!ts.coeffs.empty()) {
          Matrix l = Matrix::Zero(space.dim(), space.dim());
          for (int m = 0; m < device.modes; ++m) {
            l += ts.coeffs[m] * annihilation(space, m).entries();
          }
          terms.emplace_back(ts.rate, OperatorMatrix(space, std::move(l)));
        } else if (ts.kind == "a") {
          terms.emplace_back(ts.rate, annihilation(space, 0));
        } else if (ts.kind == "a2") {
          terms.emplace_back(ts.rate, two_photon_loss_op(space, 0));
        } else {
          terms.emplace_back(ts.rate, nonlinear_coherent_loss_op(space, 0, ts.m));
        }
      }
      EvolveOptions options;
      options.sample_interval = part->duration / 25.0;
      options.observer = [&](double t, const DensityMatrix& at) {
        if (t > 0.0) emit(t_base + t, at);
      };
      rho = evolve(rho, terms, part->duration, options);
      t_base += part->duration;
    } else {
      DeviceSpec one_part = device;
      one_part.parts = {*part};
      rho = std::get<DensityMatrix>(forward(one_part, DeviceState(rho)));
      emit(t_base, rho);
    }
  }
  csv.write_file(path.string());
}

int cmd_simulate(const std::string& device_path, const std::string& direction,
                 const std::string& input_text, const std::string& out_dir,
                 double tol) {
  if (!fs::exists(device_path)) {
    std::cerr << "error: device file not found: " << device_path << "\n";
    return kExitSchema;
  }
  const DeviceSpec device = parse_device(read_text_file(device_path));
  const InputSpec input = parse_input(input_text, device.modes);

  const bool reversed = direction == "backward";
  if (!reversed && direction != "forward") {
    throw SchemaError("--direction", "expected 'forward' or 'backward'");
  }

  // state construction failures (amplitude too large for the cutoff, bad
  // occupation) are input validation, not numerical failures
  const DeviceState state0 = [&] {
    try {
      return initial_state(device, input);
    } catch (const SchemaError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw SchemaError("--input", e.what());
    }
  }();

  const DeviceState out_state =
      reversed ? backward(device, state0) : forward(device, state0);

  fs::create_directories(out_dir);
  const fs::path base(out_dir);

  write_trajectory(device, state0, reversed, base / "trajectory.csv");

  json final_json{{"direction", direction},
                  {"state", state_to_json(out_state)}};
  write_text_file((base / "final_state.json").string(), final_json.dump(2) + "\n");

  json report;
  if (required_state_kind(device) == StateKind::Density ||
      required_state_kind(device) == StateKind::Any) {
    const DensityMatrix& probe = std::get<DensityMatrix>(state0);
    const TruncatedSpace space = device.space();
    std::vector<std::pair<std::string, OperatorMatrix>> observables;
    for (int m = 0; m < device.modes; ++m) {
      observables.emplace_back("n_" + std::to_string(m), number_operator(space, m));
    }
    if (device.modes == 2) {
      observables.emplace_back("P(i)", correlation_observable(space, Complex(0, 1)));
    }
    report = report_to_json(reciprocity_report(device, probe, observables, tol));
    // informational, excluded from the verdict: per-mode amplitudes
    const DensityMatrix fwd = std::get<DensityMatrix>(forward(device, state0));
    const DensityMatrix bwd = std::get<DensityMatrix>(backward(device, state0));
    json amps = json::array();
    for (int m = 0; m < device.modes; ++m) {
      const Complex af = expectation(fwd, annihilation(space, m));
      const Complex ab = expectation(bwd, annihilation(space, m));
      amps.push_back({{"mode", m},
                      {"forward", {af.real(), af.imag()}},
                      {"backward", {ab.real(), ab.imag()}}});
    }
    report["amplitudes_info"] = std::move(amps);
  } else {
    const DeviceState fwd = forward(device, state0);
    const DeviceState bwd = backward(device, state0);
    if (required_state_kind(device) == StateKind::Amplitudes) {
      const Vector& f = std::get<Vector>(fwd);
      const Vector& b = std::get<Vector>(bwd);
      double max_gap = 0.0;
      json entries = json::array();
      for (int m = 0; m < device.modes; ++m) {
        const double ef = std::norm(f[m]), eb = std::norm(b[m]);
        entries.push_back({{"mode", m}, {"energy_forward", ef},
                           {"energy_backward", eb}});
        max_gap = std::max(max_gap, std::abs(ef - eb));
      }
      // input-independent certificate: is the composed map symmetric up
      // to per-port phases?
      const ScatteringMatrix composed = amplitude_device_map(device, reversed);
      const GaugeCheckResult gauge = reciprocal_mod_gauge(composed, tol);
      json gauge_json{{"reciprocal_mod_gauge", gauge.reciprocal}};
      if (gauge.witness) {
        gauge_json["witness"] = {gauge.witness->first, gauge.witness->second};
      }
      report = json{{"entries", std::move(entries)},
                    {"max_discrepancy", max_gap},
                    {"tolerance", tol},
                    {"scattering", scattering_to_json(composed)},
                    {"gauge_check", std::move(gauge_json)},
                    {"verdict", max_gap > tol ? "non-reciprocal" : "reciprocal"}};
    } else {
      const double nf = std::get<PopulationVector>(fwd).mean();
      const double nb = std::get<PopulationVector>(bwd).mean();
      const double gap = std::abs(nf - nb);
      report = json{{"n_forward", nf},
                    {"n_backward", nb},
                    {"max_discrepancy", gap},
                    {"tolerance", tol},
                    {"verdict", gap > tol ? "non-reciprocal" : "reciprocal"}};
    }
  }
  write_text_file((base / "report.json").string(), report.dump(2) + "\n");

  std::cout << "simulate: direction=" << direction << " out=" << out_dir << "\n";
  return 0;
}

int cmd_scenario(const std::string& names_arg, const std::string& out_dir) {
  std::vector<std::string> names;
  if (names_arg == "all") {
    names = scenarios::scenario_names();
  } else {
    std::stringstream ss(names_arg);
    std::string item;
    while (std::getline(ss, item, ',')) names.push_back(item);
  }
  const auto& known = scenarios::scenario_names();
  for (const std::string& name : names) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      std::cerr << "error: unknown scenario '" << name << "'; valid names:";
      for (const std::string& k : known) std::cerr << " " << k;
      std::cerr << " all\n";
      return kExitSchema;
    }
  }

  unsigned max_threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DISSIM_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) max_threads = static_cast<unsigned>(parsed);
  }
  max_threads = std::min<unsigned>(max_threads, names.size());

  std::mutex io_mutex;
  std::vector<std::exception_ptr> failures(names.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      const size_t k = next.fetch_add(1);
      if (k >= names.size()) break;
      try {
        const scenarios::ScenarioResult result =
            scenarios::run_scenario(names[k], out_dir);
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << "scenario " << result.name << ":";
        for (const auto& [key, value] : result.metrics.items()) {
          if (value.is_number() || value.is_boolean() || value.is_string()) {
            std::cout << " " << key << "=" << value.dump();
          }
        }
        std::cout << "\n";
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < max_threads; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (size_t k = 0; k < names.size(); ++k) {
    if (failures[k]) std::rethrow_exception(failures[k]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissim: bipartite designed-loss device simulator"};
  app.require_subcommand(1);

  std::string device_path, direction = "forward", input_text, out_dir = "out";
  std::string scenario_names;
  double tol = 1e-9;
  int seed = 0;  // reserved; no stochastic paths yet

  CLI::App* simulate = app.add_subcommand("simulate", "propagate a state through a device file");
  simulate->add_option("--device", device_path, "device JSON path")->required();
  simulate->add_option("--direction", direction, "forward | backward");
  simulate->add_option("--input", input_text, "coherent:a,b,... | fock:n,m,...")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--tol", tol, "reciprocity verdict tolerance");
  simulate->add_option("--seed", seed, "reserved");

  CLI::App* scenario = app.add_subcommand("scenario", "reproduce a named result set");
  scenario->add_option("--scenario", scenario_names, "name, comma list, or 'all'")->required();
  scenario->add_option("--out", out_dir, "output directory");
  scenario->add_option("--tol", tol, "unused for scenarios");
  scenario->add_option("--seed", seed, "reserved");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(device_path, direction, input_text, out_dir, tol);
    }
    return cmd_scenario(scenario_names, out_dir);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
