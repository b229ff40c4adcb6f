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

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "mwfisher/cli.hpp"

namespace {

using mwfisher::cli::RunConfig;
using mwfisher::cli::SubsetFamily;

void add_state_option(CLI::App *cmd, RunConfig &config) {
    cmd->add_option("--state", config.state_path, "State JSON file");
}

void add_subset_option(CLI::App *cmd, std::string &subsets) {
    cmd->add_option("--subsets", subsets, "singles | all-proper | explicit zero-based list such as \"0,1;2\"")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Entanglement measures from the quantum Fisher information of local depolarizing channels"};
    app.require_subcommand(1);

    RunConfig config;
    std::string subsets = "singles";

    auto *curve = app.add_subcommand("curve", "Regularized QFI curve eps*J(rho_eps) as CSV");
    add_state_option(curve, config);
    curve->add_option("--family", config.family, "Named family (ghz, w, product) instead of --state");
    curve->add_option("--n", config.n_parties, "Number of parties for --family")->capture_default_str();
    curve->add_option("--mu1", config.mu1_values, "Family parameter(s); several values give one CSV each")
        ->delimiter(',');
    curve->add_option("--eps-min", config.eps_min, "Smallest epsilon")->capture_default_str();
    curve->add_option("--eps-max", config.eps_max, "Largest epsilon")->capture_default_str();
    curve->add_option("--steps", config.steps, "Number of grid points")->capture_default_str();
    curve->add_flag("--log-grid", config.log_grid, "Geometric instead of linear spacing");
    curve->add_option("--out", config.out_path, "Output CSV (stdout if omitted)");

    auto *measure = app.add_subcommand("measure", "Linear-entropy measure (pure) or its convex roof (density)");
    add_state_option(measure, config);
    add_subset_option(measure, subsets);
    measure->add_option("--restarts", config.restarts, "Roof optimizer restarts")->capture_default_str();
    measure->add_option("--max-iters", config.max_iters, "Roof optimizer iteration cap")->capture_default_str();
    measure->add_option("--seed", config.seed, "Roof optimizer seed")->capture_default_str();
    measure->add_option("--out", config.out_path, "Output JSON (stdout if omitted)");

    auto *estimate = app.add_subcommand("estimate", "Monte-Carlo estimation of epsilon with the {rho, 1-rho} POVM");
    add_state_option(estimate, config);
    estimate->add_option("--eps", config.epsilon, "True channel strength")->capture_default_str();
    estimate->add_option("--shots", config.shots, "Samples per run (nu)")->capture_default_str();
    estimate->add_option("--runs", config.runs, "Independent runs")->capture_default_str();
    estimate->add_option("--seed", config.seed, "Base seed")->capture_default_str();
    estimate->add_option("--out", config.out_path, "Per-run CSV");

    auto *roof = app.add_subcommand("roof", "Convex-roof minimization over ensemble decompositions");
    add_state_option(roof, config);
    add_subset_option(roof, subsets);
    roof->add_option("--restarts", config.restarts, "Optimizer restarts")->capture_default_str();
    roof->add_option("--max-iters", config.max_iters, "Optimizer iteration cap")->capture_default_str();
    roof->add_option("--seed", config.seed, "Optimizer seed")->capture_default_str();
    roof->add_option("--out", config.out_path, "Output JSON (stdout if omitted)");

    auto *cp = app.add_subcommand("channel-cp", "Choi-matrix complete-positivity check of the depolarizer");
    cp->add_option("--d", config.local_dim, "Local dimension")->capture_default_str();
    cp->add_option("--eps", config.epsilon, "Channel strength")->capture_default_str();
    cp->add_option("--out", config.out_path, "Output JSON (stdout if omitted)");

    auto *two_copy = app.add_subcommand("two-copy", "Sum of antisymmetric-projector expectations on two copies");
    add_state_option(two_copy, config);
    two_copy->add_option("--out", config.out_path, "Output JSON (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(mwfisher::cli::ExitCode::usage);
    }

    config.subcommand = app.get_subcommands().front()->get_name();
    try {
        if (subsets == "singles") {
            config.subsets = SubsetFamily::singles;
        } else if (subsets == "all-proper") {
            config.subsets = SubsetFamily::all_proper;
        } else {
            config.subsets = SubsetFamily::explicit_list;
            config.explicit_subsets = mwfisher::cli::parse_subset_list(subsets);
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(mwfisher::cli::ExitCode::usage);
    }
    return mwfisher::cli::run(config);
}
