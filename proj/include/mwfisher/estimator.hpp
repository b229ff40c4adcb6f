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

#include <cstdint>
#include <span>
#include <vector>

#include "mwfisher/qfi.hpp"

namespace mwfisher {

/// Outcome counts of the two-outcome measurement {rho, 1 - rho} on nu copies of
/// the channel output. Outcome x = 1 ("the state decayed") has count `count_one`.
struct MeasurementRecord {
    std::uint64_t shots = 0;
    std::uint64_t count_one = 0;
    double epsilon_true = 0.0;
    double trace_rho_rhoprime = 0.0;
};

struct EstimationReport {
    double epsilon_hat = 0.0;
    double sample_variance = 0.0;
    double qcrb_bound = 0.0;
    double ratio = 0.0;  // sample_variance / qcrb_bound; zero when count_one == 0
};

namespace detail {

inline void require_open_range(const PureState &state, double epsilon, const char *what) {
    double bound = DepolarizingSpec::all_local(epsilon).bound(state.dims());
    if (!(epsilon > 0.0) || !(epsilon < bound)) {
        throw RangeError(std::string(what) + ": epsilon = " + std::to_string(epsilon) + " outside (0, " +
                         std::to_string(bound) + ")");
    }
}

}  // namespace detail

/// p_1 = 1 - <psi|E_eps^{(x)n}(psi)|psi> under the exact channel.
inline double decay_probability(const PureState &state, double epsilon) {
    DensityState out = local_product_channel(DensityState::from_pure(state), epsilon);
    const Vector &psi = state.amplitudes();
    return std::clamp(1.0 - psi.dot(out.matrix() * psi).real(), 0.0, 1.0);
}

/// d p_1 / d eps = -<psi| d rho_eps |psi>.
inline double decay_probability_derivative(const PureState &state, double epsilon) {
    Matrix derivative = channel_derivative(DensityState::from_pure(state), epsilon);
    const Vector &psi = state.amplitudes();
    return -psi.dot(derivative * psi).real();
}

/// Binomial(n, p) by counting n Bernoulli trials u < p on the Rng stream.
inline std::uint64_t sample_binomial(Rng &rng, std::uint64_t n, double p) {
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        count += rng.uniform() < p ? 1 : 0;
    }
    return count;
}

inline MeasurementRecord simulate_povm(const PureState &state, double epsilon, std::uint64_t shots,
                                       std::uint64_t seed) {
    detail::require_open_range(state, epsilon, "simulate_povm");
    if (shots < 1) {
        throw RangeError("simulate_povm: shots must be at least 1");
    }
    Rng rng(seed);
    MeasurementRecord record;
    record.shots = shots;
    record.epsilon_true = epsilon;
    record.trace_rho_rhoprime = qfi_limit_pure(state);
    record.count_one = sample_binomial(rng, shots, decay_probability(state, epsilon));
    return record;
}

/// eps_hat = x / (nu tr[rho rho']) with the leading-order bound
/// Var = eps / (tr[rho rho'] nu).
inline EstimationReport estimate_epsilon(const MeasurementRecord &record) {
    if (!(record.trace_rho_rhoprime > 0.0)) {
        throw RangeError("estimate_epsilon: tr[rho rho'] must be positive; the estimator is undefined");
    }
    if (record.shots == 0 || record.count_one > record.shots) {
        throw RangeError("estimate_epsilon: need 0 <= count_one <= shots and shots >= 1");
    }
    const auto nu = static_cast<double>(record.shots);
    const double t = record.trace_rho_rhoprime;
    const double p_hat = static_cast<double>(record.count_one) / nu;
    EstimationReport out;
    out.epsilon_hat = p_hat / t;
    out.sample_variance = p_hat * (1.0 - p_hat) / (nu * t * t);
    out.qcrb_bound = record.epsilon_true / (t * nu);
    out.ratio = out.qcrb_bound > 0.0 ? out.sample_variance / out.qcrb_bound : 0.0;
    return out;
}

/// sum_x dprobs_x^2 / probs_x over the support of probs.
inline double classical_fisher(std::span<const double> probs, std::span<const double> dprobs) {
    if (probs.size() != dprobs.size() || probs.empty()) {
        throw RangeError("classical_fisher: probs and dprobs must be nonempty and of equal length");
    }
    double total = 0.0;
    double dtotal = 0.0;
    double info = 0.0;
    for (std::size_t x = 0; x < probs.size(); ++x) {
        if (probs[x] < 0.0) {
            throw RangeError("classical_fisher: negative probability at outcome " + std::to_string(x));
        }
        total += probs[x];
        dtotal += dprobs[x];
        if (probs[x] == 0.0) {
            if (dprobs[x] != 0.0) {
                throw RangeError("classical_fisher: nonzero derivative outside the support at outcome " +
                                 std::to_string(x));
            }
            continue;
        }
        info += dprobs[x] * dprobs[x] / probs[x];
    }
    if (std::abs(total - 1.0) > 1e-10 || std::abs(dtotal) > 1e-10) {
        throw RangeError("classical_fisher: probs must sum to 1 and dprobs to 0");
    }
    return info;
}

/// Fisher information of the {rho, 1 - rho} measurement on rho_eps.
inline double povm_classical_fisher(const PureState &state, double epsilon) {
    detail::require_open_range(state, epsilon, "povm_classical_fisher");
    double p1 = decay_probability(state, epsilon);
    double dp1 = decay_probability_derivative(state, epsilon);
    std::vector<double> probs{1.0 - p1, p1};
    std::vector<double> dprobs{-dp1, dp1};
    return classical_fisher(probs, dprobs);
}

struct QcrbStudy {
    std::vector<std::uint64_t> counts;
    std::vector<double> estimates;
    double mean = 0.0;
    double variance = 0.0;        // unbiased, over runs
    double standard_error = 0.0;  // of the mean
    double qfi = 0.0;             // J(rho_eps)
    double product = 0.0;         // variance * nu * J
    double leading_order_variance = 0.0;
};

/// `runs` independent estimates, run r seeded with derive_seed(seed, r);
/// statistics are accumulated in run order.
inline QcrbStudy qcrb_study(const PureState &state, double epsilon, std::uint64_t shots, std::size_t runs,
                            std::uint64_t seed) {
    if (runs < 2) {
        throw RangeError("qcrb_study: need at least 2 runs");
    }
    detail::require_open_range(state, epsilon, "qcrb_study");
    if (shots < 1) {
        throw RangeError("qcrb_study: shots must be at least 1");
    }
    const double t = qfi_limit_pure(state);
    const double p1 = decay_probability(state, epsilon);
    QcrbStudy out;
    out.estimates.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        Rng rng(derive_seed(seed, r));
        MeasurementRecord record{shots, sample_binomial(rng, shots, p1), epsilon, t};
        out.counts.push_back(record.count_one);
        out.estimates.push_back(estimate_epsilon(record).epsilon_hat);
    }
    double sum = 0.0;
    for (double e : out.estimates) {
        sum += e;
    }
    out.mean = sum / static_cast<double>(runs);
    double ss = 0.0;
    for (double e : out.estimates) {
        ss += (e - out.mean) * (e - out.mean);
    }
    out.variance = ss / static_cast<double>(runs - 1);
    out.standard_error = std::sqrt(out.variance / static_cast<double>(runs));
    out.qfi = qfi_at(state, DepolarizingSpec::all_local(epsilon)).qfi;
    out.product = out.variance * static_cast<double>(shots) * out.qfi;
    out.leading_order_variance = epsilon / (t * static_cast<double>(shots));
    return out;
}

/// Empirical Var[eps_hat] * nu * J(rho_eps); the QCRB says this is >= 1.
inline double qcrb_gap(const PureState &state, double epsilon, std::uint64_t shots, std::size_t runs,
                       std::uint64_t seed) {
    return qcrb_study(state, epsilon, shots, runs, seed).product;
}

}  // namespace mwfisher
