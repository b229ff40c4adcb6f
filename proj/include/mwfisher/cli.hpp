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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "mwfisher/channels.hpp"
#include "mwfisher/convex_roof.hpp"
#include "mwfisher/estimator.hpp"
#include "mwfisher/measures.hpp"
#include "mwfisher/qfi.hpp"
#include "mwfisher/state_io.hpp"

namespace mwfisher::cli {

enum class ExitCode : int {
    ok = 0,
    usage = 1,
    parse = 2,
    normalization = 3,
    hermiticity = 4,
    trace = 5,
    positivity = 6,
    range = 7,
    nonconvergence = 8,
    dimension = 9,
    io = 10,
};

/// Roof optimization is refused above this joint dimension.
inline constexpr std::size_t kRoofDimensionCap = 16;

class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class SubsetFamily { singles, all_proper, explicit_list };

struct RunConfig {
    std::string subcommand;
    std::string state_path;
    std::string family;  // named family for curve sweeps; empty when --state is used
    std::size_t n_parties = 3;
    std::vector<double> mu1_values;
    double eps_min = 0.0025;  // with the defaults below the grid is 0.0025 k
    double eps_max = 0.6;
    std::size_t steps = 240;
    bool log_grid = false;
    double epsilon = 0.01;
    std::size_t local_dim = 2;
    SubsetFamily subsets = SubsetFamily::singles;
    std::vector<PartySubset> explicit_subsets;
    std::uint64_t shots = 100000;
    std::size_t runs = 200;
    std::uint64_t seed = 0;
    std::size_t restarts = 20;
    std::size_t max_iters = 2000;
    std::string out_path;
};

inline ExitCode exit_code_for(const std::exception &e) {
    if (const auto *inv = dynamic_cast<const InvariantError *>(&e)) {
        switch (inv->which()) {
            case Invariant::normalization: return ExitCode::normalization;
            case Invariant::hermiticity: return ExitCode::hermiticity;
            case Invariant::trace: return ExitCode::trace;
            case Invariant::positivity: return ExitCode::positivity;
            case Invariant::dimension: return ExitCode::dimension;
            case Invariant::subset:
            case Invariant::isometry:
            case Invariant::support: return ExitCode::range;
        }
    }
    if (dynamic_cast<const ParseError *>(&e)) return ExitCode::parse;
    if (dynamic_cast<const RangeError *>(&e)) return ExitCode::range;
    if (dynamic_cast<const IoError *>(&e)) return ExitCode::io;
    if (dynamic_cast<const UsageError *>(&e)) return ExitCode::usage;
    return ExitCode::usage;
}

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) {
        throw IoError("number formatting failed");
    }
    return std::string(buf, end);
}

/// Writes to `path` through a temporary sibling and a rename; empty path
/// means stdout.
inline void write_output(const std::string &path, const std::string &content, std::ostream &stdout_stream) {
    if (path.empty()) {
        stdout_stream << content;
        return;
    }
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << content;
        if (!out) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        throw IoError("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
    }
}

/// Parses "0,1;2" into {{0,1},{2}} (zero-based party indices).
inline std::vector<PartySubset> parse_subset_list(const std::string &text) {
    std::vector<PartySubset> out;
    std::stringstream groups(text);
    std::string group;
    while (std::getline(groups, group, ';')) {
        std::vector<std::size_t> parties;
        std::stringstream items(group);
        std::string item;
        while (std::getline(items, item, ',')) {
            std::size_t value = 0;
            auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
            if (ec != std::errc() || ptr != item.data() + item.size()) {
                throw UsageError("bad party index '" + item + "' in --subsets");
            }
            parties.push_back(value);
        }
        if (parties.empty()) {
            throw UsageError("empty group in --subsets");
        }
        out.emplace_back(std::move(parties));
    }
    if (out.empty()) {
        throw UsageError("--subsets list is empty");
    }
    return out;
}

inline std::vector<PartySubset> resolve_subsets(const RunConfig &config, std::size_t n_parties) {
    switch (config.subsets) {
        case SubsetFamily::singles: return single_party_subsets(n_parties);
        case SubsetFamily::all_proper: return all_proper_subsets(n_parties);
        case SubsetFamily::explicit_list: return config.explicit_subsets;
    }
    return {};
}

inline AnyState load_state(const RunConfig &config) {
    if (config.state_path.empty()) {
        throw UsageError(config.subcommand + " needs --state");
    }
    return parse_state_file(config.state_path);
}

inline const PureState &require_pure(const AnyState &state, const std::string &what) {
    if (const auto *psi = std::get_if<PureState>(&state)) {
        return *psi;
    }
    throw UsageError(what + " needs a pure state (amplitudes or named state)");
}

/// Ascending epsilon grid: linear by default, geometric with log_grid.
inline std::vector<double> epsilon_grid(const RunConfig &config) {
    if (config.steps < 2) {
        throw RangeError("--steps must be at least 2");
    }
    if (!(config.eps_min > 0.0) || !(config.eps_max > config.eps_min)) {
        throw RangeError("need 0 < eps-min < eps-max");
    }
    std::vector<double> grid(config.steps);
    const double last = static_cast<double>(config.steps - 1);
    for (std::size_t i = 0; i < config.steps; ++i) {
        double f = static_cast<double>(i) / last;
        grid[i] = config.log_grid ? config.eps_min * std::pow(config.eps_max / config.eps_min, f)
                                  : config.eps_min + (config.eps_max - config.eps_min) * f;
    }
    grid.back() = config.eps_max;
    return grid;
}

inline std::string curve_csv(const std::vector<QfiPoint> &points) {
    std::string out = "epsilon,qfi,regularized_qfi\n";
    for (const auto &p : points) {
        out += format_double(p.epsilon) + "," + format_double(p.qfi) + "," + format_double(p.regularized) + "\n";
    }
    return out;
}

/// "curve.csv" + 0.75 -> "curve_mu1-0.75.csv"
inline std::string suffixed_path(const std::string &path, double mu1) {
    std::filesystem::path p(path);
    std::filesystem::path stem = p.stem();
    stem += "_mu1-" + format_double(mu1);
    return (p.parent_path() / stem).string() + p.extension().string();
}

/// Writes one CSV per curve. With --family and several --mu1 values each
/// curve goes to a suffixed copy of --out. Returns the paths written
/// (empty string for stdout).
inline std::vector<std::string> cmd_curve(const RunConfig &config, std::ostream &stdout_stream = std::cout) {
    std::vector<double> grid = epsilon_grid(config);
    std::vector<std::pair<std::string, PureState>> jobs;
    if (!config.family.empty()) {
        NamedState family = parse_named_state(config.family);
        std::vector<double> values = config.mu1_values.empty() ? std::vector<double>{0.5} : config.mu1_values;
        if (values.size() > 1 && config.out_path.empty()) {
            throw UsageError("a multi-valued --mu1 sweep needs --out");
        }
        for (double mu1 : values) {
            std::string path = values.size() > 1 ? suffixed_path(config.out_path, mu1) : config.out_path;
            jobs.emplace_back(path, named_state(family, config.n_parties, mu1));
        }
    } else {
        AnyState state = load_state(config);
        jobs.emplace_back(config.out_path, require_pure(state, "curve"));
    }
    std::vector<std::string> written;
    for (const auto &[path, psi] : jobs) {
        write_output(path, curve_csv(regularized_qfi_curve(psi, grid)), stdout_stream);
        written.push_back(path);
    }
    return written;
}

inline nlohmann::json measure_json(const MeasureResult &result) {
    nlohmann::json terms = nlohmann::json::array();
    for (std::size_t i = 0; i < result.terms.size(); ++i) {
        terms.push_back({{"subset", result.subsets[i].indices()}, {"value", result.terms[i]}});
    }
    return {{"value", result.value}, {"constant_K", result.constant_K}, {"terms", terms}};
}

inline nlohmann::json roof_json(const DensityState &rho, const std::vector<PartySubset> &subsets,
                                const RunConfig &config, bool &converged) {
    if (rho.dim() > kRoofDimensionCap) {
        throw InvariantError(Invariant::dimension, "roof optimization is limited to joint dimension " +
                                                       std::to_string(kRoofDimensionCap) + ", got " +
                                                       std::to_string(rho.dim()));
    }
    RoofConfig roof;
    roof.restarts = config.restarts;
    roof.max_iters = config.max_iters;
    roof.seed = config.seed;
    RoofResult result = convex_roof_minimize(rho, LinearEntropySum(subsets), roof);
    converged = result.converged;
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t j = 0; j < result.ensemble.members.size(); ++j) {
        members.push_back({{"weight", result.ensemble.weights[j]},
                           {"state", to_json(result.ensemble.members[j])["amplitudes"]}});
    }
    nlohmann::json out = {{"roof_upper_bound", result.value},
                          {"converged", result.converged},
                          {"rank", result.rank},
                          {"ensemble_size", result.ensemble_size},
                          {"ensemble_size_truncated", true},
                          {"eigen_objective", result.eigen_objective},
                          {"restarts", config.restarts},
                          {"max_iters", config.max_iters},
                          {"seed", config.seed},
                          {"ensemble", members}};
    if (rho.dims() == PartyDims{2, 2} && subsets == single_party_subsets(2)) {
        double c = wootters_concurrence(rho);
        out["wootters_tangle"] = c * c;
    }
    return out;
}

/// Pure input: value, per-subset terms and K. Density input: convex-roof
/// upper bound. Returns nonconvergence when the roof optimizer did not settle.
inline ExitCode cmd_measure(const RunConfig &config, std::ostream &stdout_stream = std::cout) {
    AnyState state = load_state(config);
    nlohmann::json report;
    ExitCode code = ExitCode::ok;
    if (const auto *psi = std::get_if<PureState>(&state)) {
        auto subsets = resolve_subsets(config, psi->dims().size());
        report = measure_json(partition_measure(*psi, subsets));
        report["kind"] = "pure";
        report["qfi_limit"] = qfi_limit_pure(*psi, subsets);
    } else {
        const auto &rho = std::get<DensityState>(state);
        bool converged = false;
        report = roof_json(rho, resolve_subsets(config, rho.dims().size()), config, converged);
        report["kind"] = "density";
        if (!converged) {
            code = ExitCode::nonconvergence;
        }
    }
    write_output(config.out_path, report.dump(2) + "\n", stdout_stream);
    return code;
}

inline ExitCode cmd_roof(const RunConfig &config, std::ostream &stdout_stream = std::cout) {
    AnyState state = load_state(config);
    DensityState rho = std::holds_alternative<PureState>(state)
                           ? DensityState::from_pure(std::get<PureState>(state))
                           : std::get<DensityState>(state);
    bool converged = false;
    nlohmann::json report = roof_json(rho, resolve_subsets(config, rho.dims().size()), config, converged);
    write_output(config.out_path, report.dump(2) + "\n", stdout_stream);
    return converged ? ExitCode::ok : ExitCode::nonconvergence;
}

/// Per-run CSV "run,count_one,epsilon_hat" to --out; summary JSON to stdout.
inline ExitCode cmd_estimate(const RunConfig &config, std::ostream &stdout_stream = std::cout) {
    AnyState state = load_state(config);
    const PureState &psi = require_pure(state, "estimate");
    QcrbStudy study = qcrb_study(psi, config.epsilon, config.shots, config.runs, config.seed);
    const double t = qfi_limit_pure(psi);
    if (!config.out_path.empty()) {
        std::string csv = "run,count_one,epsilon_hat\n";
        for (std::size_t r = 0; r < study.estimates.size(); ++r) {
            csv += std::to_string(r) + "," + std::to_string(study.counts[r]) + "," + format_double(study.estimates[r]) + "\n";
        }
        write_output(config.out_path, csv, stdout_stream);
    }
    nlohmann::json summary = {{"epsilon", config.epsilon},
                              {"shots", config.shots},
                              {"runs", config.runs},
                              {"seed", config.seed},
                              {"trace_rho_rhoprime", t},
                              {"mean_epsilon_hat", study.mean},
                              {"standard_error", study.standard_error},
                              {"variance", study.variance},
                              {"leading_order_variance", study.leading_order_variance},
                              {"qfi", study.qfi},
                              {"variance_nu_qfi", study.product}};
    stdout_stream << summary.dump(2) << "\n";
    return ExitCode::ok;
}

inline ExitCode cmd_channel_cp(const RunConfig &config, std::ostream &stdout_stream = std::cout) {
    ChoiCheck check = choi_cp_check(config.local_dim, config.epsilon);
    const auto d = static_cast<double>(config.local_dim);
    double closed = std::min((1.0 - d * config.epsilon) + config.epsilon / d, config.epsilon / d);
    nlohmann::json report = {{"d", config.local_dim},
                             {"epsilon", config.epsilon},
                             {"cp_bound", cp_bound(config.local_dim)},
                             {"min_eigenvalue", check.min_eigenvalue},
                             {"closed_form_min_eigenvalue", closed},
                             {"is_cp", check.is_cp}};
    write_output(config.out_path, report.dump(2) + "\n", stdout_stream);
    return ExitCode::ok;
}

inline ExitCode cmd_two_copy(const RunConfig &config, std::ostream &stdout_stream = std::cout) {
    AnyState state = load_state(config);
    const PureState &psi = require_pure(state, "two-copy");
    MeasureResult two = two_copy_expectation(psi);
    nlohmann::json per_party = nlohmann::json::array();
    for (double term : two.terms) {
        per_party.push_back(term / 2.0);
    }
    nlohmann::json report = {{"value", two.value},
                             {"antisymmetric_expectations", per_party},
                             {"meyer_wallach", meyer_wallach(psi).value}};
    write_output(config.out_path, report.dump(2) + "\n", stdout_stream);
    return ExitCode::ok;
}

/// Dispatches a parsed configuration; exceptions become exit codes with the
/// message on `err`.
inline int run(const RunConfig &config, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    try {
        ExitCode code = ExitCode::ok;
        if (config.subcommand == "curve") {
            cmd_curve(config, out);
        } else if (config.subcommand == "measure") {
            code = cmd_measure(config, out);
        } else if (config.subcommand == "estimate") {
            code = cmd_estimate(config, out);
        } else if (config.subcommand == "roof") {
            code = cmd_roof(config, out);
        } else if (config.subcommand == "channel-cp") {
            code = cmd_channel_cp(config, out);
        } else if (config.subcommand == "two-copy") {
            code = cmd_two_copy(config, out);
        } else {
            throw UsageError("unknown subcommand '" + config.subcommand + "'");
        }
        if (code == ExitCode::nonconvergence) {
            err << "warning: roof optimization did not converge; reported value is the best found\n";
        }
        return static_cast<int>(code);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(exit_code_for(e));
    }
}

}  // namespace mwfisher::cli
