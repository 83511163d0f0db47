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

#include "dissim/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dissim/errors.hpp"

namespace dissim {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

json scattering_to_json(const ScatteringMatrix& s) {
  json entries = json::array();
  for (Index i = 0; i < s.modes(); ++i) {
    for (Index j = 0; j < s.modes(); ++j) {
      entries.push_back({s.entries()(i, j).real(), s.entries()(i, j).imag()});
    }
  }
  return json{{"modes", s.modes()}, {"entries", std::move(entries)}};
}

ScatteringMatrix scattering_from_json(const json& j) {
  if (!j.contains("modes") || !j.contains("entries")) {
    throw SchemaError("$", "scattering matrix needs 'modes' and 'entries'");
  }
  const Index n = j["modes"].get<Index>();
  const json& entries = j["entries"];
  if (!entries.is_array() || static_cast<Index>(entries.size()) != n * n) {
    throw SchemaError("$.entries", "expected modes^2 [re, im] pairs");
  }
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) {
      const json& e = entries[i * n + k];
      if (!e.is_array() || e.size() != 2) {
        throw SchemaError("$.entries", "expected [re, im] pairs");
      }
      m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return ScatteringMatrix(std::move(m));
}

json report_to_json(const ReciprocityReport& report) {
  json entries = json::array();
  for (const ReciprocityReport::Entry& e : report.entries) {
    entries.push_back({{"observable", e.observable},
                       {"p_in", e.p_in},
                       {"p_forward", e.p_forward},
                       {"p_backward", e.p_backward},
                       {"discrepancy", e.discrepancy}});
  }
  return json{{"entries", std::move(entries)},
              {"max_discrepancy", report.max_discrepancy},
              {"tolerance", report.tolerance},
              {"verdict", report.non_reciprocal ? "non-reciprocal" : "reciprocal"}};
}

json state_to_json(const DeviceState& state) {
  if (const Vector* alpha = std::get_if<Vector>(&state)) {
    json amps = json::array();
    for (Index i = 0; i < alpha->size(); ++i) {
      amps.push_back({(*alpha)[i].real(), (*alpha)[i].imag()});
    }
    return json{{"kind", "amplitudes"}, {"amplitudes", std::move(amps)}};
  }
  if (const DensityMatrix* rho = std::get_if<DensityMatrix>(&state)) {
    json diag = json::array();
    for (Index i = 0; i < rho->space().dim(); ++i) {
      diag.push_back(rho->entries()(i, i).real());
    }
    json means = json::array();
    for (int m = 0; m < rho->space().num_modes(); ++m) {
      means.push_back(mean_photon_number(*rho, m));
    }
    return json{{"kind", "density"},
                {"diagonal", std::move(diag)},
                {"mean_photons", std::move(means)},
                {"trace", rho->trace_real()},
                {"min_eigenvalue", rho->min_eigenvalue()}};
  }
  const PopulationVector& p = std::get<PopulationVector>(state);
  json probs = json::array();
  for (Index n = 0; n < p.probs().size(); ++n) probs.push_back(p.probs()[n]);
  return json{{"kind", "populations"},
              {"probs", std::move(probs)},
              {"mean", p.mean()}};
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) {
    throw std::invalid_argument("CsvWriter: empty header");
  }
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_) {
    throw std::invalid_argument("CsvWriter: row width does not match header");
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
}

void CsvWriter::write_file(const std::string& path) const {
  write_text_file(path, text_);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open: " + path);
  }
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace dissim
