// Copyright 2026 The mwfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "mwfisher/state.hpp"

namespace mwfisher {

using AnyState = std::variant<PureState, DensityState>;

namespace detail {

inline Complex parse_complex(const nlohmann::json &j, const std::string &where) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError(where + ": expected a number or a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline PartyDims parse_dims(const nlohmann::json &doc) {
    if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty()) {
        throw ParseError("state file: 'dims' must be a nonempty array of integers");
    }
    std::vector<std::size_t> dims;
    for (const auto &d : doc["dims"]) {
        if (!d.is_number_integer() || d.get<long long>() < 0) {
            throw ParseError("state file: 'dims' entries must be nonnegative integers");
        }
        dims.push_back(d.get<std::size_t>());
    }
    return PartyDims(std::move(dims));
}

inline nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace detail

/// Accepted documents:
///   {"dims": [2,2,2], "amplitudes": [[re, im], ...]}        pure, party-major
///   {"named": "ghz"|"w"|"product", "n": 3, "mu1": 0.5}      pure, named family
///   {"dims": [...], "matrix": [[[re, im], ...], ...]}       density, row-major
/// Plain numbers are accepted where a [re, im] pair is expected.
inline AnyState parse_state_json(const nlohmann::json &doc) {
    if (!doc.is_object()) {
        throw ParseError("state file: top level must be a JSON object");
    }
    if (doc.contains("named")) {
        if (!doc["named"].is_string() || !doc.contains("n") || !doc["n"].is_number_integer()) {
            throw ParseError("state file: named states need string 'named' and integer 'n'");
        }
        double mu1 = 0.5;
        if (doc.contains("mu1")) {
            if (!doc["mu1"].is_number()) {
                throw ParseError("state file: 'mu1' must be a number");
            }
            mu1 = doc["mu1"].get<double>();
        }
        long long n = doc["n"].get<long long>();
        if (n < 0) {
            throw ParseError("state file: 'n' must be nonnegative");
        }
        return named_state(parse_named_state(doc["named"].get<std::string>()), static_cast<std::size_t>(n), mu1);
    }
    PartyDims dims = detail::parse_dims(doc);
    const std::size_t total = dims.total();
    if (doc.contains("amplitudes")) {
        const auto &amps = doc["amplitudes"];
        if (!amps.is_array() || amps.size() != total) {
            throw ParseError("state file: 'amplitudes' must be an array of length " + std::to_string(total));
        }
        Vector v(static_cast<Eigen::Index>(total));
        for (std::size_t i = 0; i < total; ++i) {
            v(static_cast<Eigen::Index>(i)) = detail::parse_complex(amps[i], "amplitudes[" + std::to_string(i) + "]");
        }
        return PureState(std::move(dims), std::move(v));
    }
    if (doc.contains("matrix")) {
        const auto &rows = doc["matrix"];
        if (!rows.is_array() || rows.size() != total) {
            throw ParseError("state file: 'matrix' must have " + std::to_string(total) + " rows");
        }
        auto d = static_cast<Eigen::Index>(total);
        Matrix m(d, d);
        for (std::size_t i = 0; i < total; ++i) {
            if (!rows[i].is_array() || rows[i].size() != total) {
                throw ParseError("state file: matrix row " + std::to_string(i) + " must have " +
                                 std::to_string(total) + " entries");
            }
            for (std::size_t j = 0; j < total; ++j) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = detail::parse_complex(
                    rows[i][j], "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]");
            }
        }
        return DensityState(std::move(dims), m);
    }
    throw ParseError("state file: expected one of 'named', 'amplitudes' or 'matrix'");
}

inline AnyState parse_state_string(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(std::string("state file: malformed JSON: ") + e.what());
    }
    return parse_state_json(doc);
}

inline AnyState parse_state_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open state file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_state_string(buffer.str());
}

inline nlohmann::json to_json(const PureState &psi) {
    nlohmann::json amps = nlohmann::json::array();
    for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) {
        amps.push_back(detail::complex_json(psi.amplitudes()(i)));
    }
    return {{"dims", psi.dims().values()}, {"amplitudes", amps}};
}

inline nlohmann::json to_json(const DensityState &rho) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < rho.matrix().cols(); ++j) {
            row.push_back(detail::complex_json(rho.matrix()(i, j)));
        }
        rows.push_back(row);
    }
    return {{"dims", rho.dims().values()}, {"matrix", rows}};
}

}  // namespace mwfisher
