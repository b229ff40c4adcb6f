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

#include "mwfisher/channels.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"

using namespace mwfisher;

namespace {

DensityState ghz3() { return DensityState::from_pure(named_state(NamedState::ghz, 3, 0.5)); }

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return num / den;
}

}  // namespace

TEST(depolarize_subset, zero_strength_is_identity) {
    DensityState rho = random_density_state({2, 2}, 3, 1);
    EXPECT_LT((depolarize_subset(rho, {0}, 0.0).matrix() - rho.matrix()).norm(), 1e-15);
}

TEST(depolarize_subset, half_is_totally_depolarizing_on_a_qubit) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        DensityState rho = random_density_state({2}, 2, seed);
        EXPECT_LT((depolarize_subset(rho, {0}, 0.5).matrix() - Matrix::Identity(2, 2) / 2.0).norm(), 1e-15);
    }
}

TEST(depolarize_subset, bell_direct_substitution) {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    DensityState bell = DensityState::from_pure(PureState({2, 2}, v));
    // 0.8 rho + 0.1 * 1_1 (x) (1/2): the party-2 marginal of a Bell state is 1/2.
    Matrix expected = 0.8 * bell.matrix() + 0.1 * Matrix::Identity(4, 4) / 2.0;
    EXPECT_LT((depolarize_subset(bell, {0}, 0.1).matrix() - expected).norm(), 1e-15);
}

TEST(depolarize_subset, rejects_strength_outside_cp_range) {
    DensityState rho = ghz3();
    EXPECT_THROW(depolarize_subset(rho, {0}, -0.01), RangeError);
    EXPECT_THROW(depolarize_subset(rho, {0}, 0.7), RangeError);
    EXPECT_NO_THROW(depolarize_subset(rho, {0}, 2.0 / 3.0));
    // d_alpha = 4 for two qubits: bound 4/15.
    EXPECT_THROW(depolarize_subset(rho, {0, 1}, 0.3), RangeError);
    try {
        depolarize_subset(rho, {0}, 0.9);
    } catch (const RangeError &e) {
        EXPECT_NE(std::string(e.what()).find("0.666667"), std::string::npos) << e.what();
    }
    EXPECT_THROW(depolarize_subset(rho, {}, 0.1), InvariantError);
}

TEST(depolarize_subset, full_subset_maps_to_identity_over_total_dim) {
    DensityState rho = random_density_state({2, 2}, 2, 3);
    // d_alpha = 4, bound 4/15; at eps = 1/4 the output is 1/4.
    EXPECT_LT((depolarize_subset(rho, {0, 1}, 0.25).matrix() - Matrix::Identity(4, 4) / 4.0).norm(), 1e-15);
}

TEST(local_product_channel, examples) {
    DensityState rho = random_density_state(PartyDims::qubits(3), 4, 2);
    EXPECT_LT((local_product_channel(rho, 0.0).matrix() - rho.matrix()).norm(), 1e-15);
    EXPECT_LT((local_product_channel(rho, 0.5).matrix() - Matrix::Identity(8, 8) / 8.0).norm(), 1e-14);
    EXPECT_THROW(local_product_channel(rho, 0.67), RangeError);
    // Qutrit bound is 3/8, so a mixed 2x3 system is limited by the qutrit.
    DensityState mixed = random_density_state({2, 3}, 2, 2);
    EXPECT_THROW(local_product_channel(mixed, 0.4), RangeError);
    EXPECT_NO_THROW(local_product_channel(mixed, 0.375));
}

TEST(local_product_channel, first_order_expansion_is_second_order_accurate) {
    // Oracle: the explicit first-order formula, built independently.
    const std::vector<std::size_t> dims{2, 2, 2};
    DensityState rho = random_density_state(PartyDims(dims), 8, 31);
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::vector<double> err;
    for (double e : eps) {
        Matrix exact = local_product_channel(rho, e).matrix();
        err.push_back((exact - oracle::first_order_channel(rho.matrix(), dims, e)).norm());
        // Same check through rho': rho_eps = rho - eps rho' + O(eps^2).
        double err_prime = (exact - (rho.matrix() - e * rho_prime(rho))).norm();
        EXPECT_NEAR(err_prime, err.back(), 1e-12);
    }
    EXPECT_GE(loglog_slope(eps, err), 1.9);
    double c = err.front() / (eps.front() * eps.front());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        EXPECT_LE(err[i], 1.1 * c * eps[i] * eps[i]);
    }
}

TEST(rho_prime, single_qubit) {
    Matrix zero = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    expected(1, 1) = -1.0;
    EXPECT_LT((rho_prime(DensityState({2}, zero)) - expected).norm(), 1e-15);
}

TEST(rho_prime, overlap_examples) {
    DensityState ghz = ghz3();
    EXPECT_NEAR((ghz.matrix() * rho_prime(ghz)).trace().real(), 4.5, 1e-14);
    DensityState prod = DensityState::from_pure(named_state(NamedState::product, 3, 0.0));
    EXPECT_NEAR((prod.matrix() * rho_prime(prod)).trace().real(), 3.0, 1e-14);
}

TEST(rho_prime, hermitian_and_traceless) {
    DensityState rho = random_density_state({2, 3, 2}, 5, 4);
    Matrix rp = rho_prime(rho);
    EXPECT_LT(hermitian_deviation(rp), 1e-15);
    EXPECT_NEAR(std::abs(rp.trace()), 0.0, 1e-13);
}

TEST(channel_derivative, equals_minus_rho_prime_at_origin) {
    DensityState rho = random_density_state({2, 2, 2}, 3, 5);
    EXPECT_LT((channel_derivative(rho, 0.0) + rho_prime(rho)).norm(), 1e-14);
}

TEST(channel_derivative, matches_central_difference) {
    const double delta = 1e-6;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DensityState rho = random_density_state({2, 2}, 1 + seed % 4, seed);
        for (double eps : {0.05, 0.2, 0.4}) {
            Matrix fd = (local_product_channel(rho, eps + delta).matrix() -
                         local_product_channel(rho, eps - delta).matrix()) /
                        (2 * delta);
            Matrix analytic = channel_derivative(rho, eps);
            EXPECT_LT((fd - analytic).norm(), 1e-6) << seed << " " << eps;
            EXPECT_NEAR(std::abs(analytic.trace()), 0.0, 1e-13);
        }
    }
}

TEST(channel_derivative, ghz_is_flat_at_total_depolarization) {
    EXPECT_LT(channel_derivative(ghz3(), 0.5).norm(), 1e-10);
}

TEST(channel_derivative, subset_spec) {
    DensityState rho = random_density_state({2, 2, 2}, 3, 6);
    auto noise = DepolarizingSpec::subset({0, 2}, 0.1);
    const double delta = 1e-6;
    Matrix fd = (apply_channel(rho, {noise.target, 0.1 + delta}).matrix() -
                 apply_channel(rho, {noise.target, 0.1 - delta}).matrix()) /
                (2 * delta);
    EXPECT_LT((fd - channel_derivative(rho, noise)).norm(), 1e-8);
}

TEST(depolarize_sequence, overlapping_subsets_commute) {
    // E^a E^b rho = (1 - e d_a)(1 - e d_b) rho + e(1 - e d_b) 1_a tr_a rho
    //   + e(1 - e d_a) 1_b tr_b rho + e^2 d_{a&b} 1_{a|b} tr_{a|b} rho, symmetric in a, b.
    DensityState rho = random_density_state({2, 2, 2}, 8, 40);
    std::vector<PartySubset> forward{{0, 1}, {1, 2}};
    std::vector<PartySubset> backward{{1, 2}, {0, 1}};
    for (double eps : {1e-2, 1e-3, 0.2}) {
        Matrix a = depolarize_sequence(rho, forward, eps).matrix();
        Matrix b = depolarize_sequence(rho, backward, eps).matrix();
        EXPECT_LT((a - b).norm(), 1e-14);
    }
    for (double eps : {1e-2, 1e-3}) {
        Matrix a = depolarize_sequence(rho, forward, eps).matrix();
        EXPECT_LT((a - (rho.matrix() - eps * rho_prime(rho, forward))).norm(), 50 * eps * eps);
    }
}

TEST(choi_cp_check, identity_channel) {
    ChoiCheck check = choi_cp_check(2, 0.0);
    EXPECT_NEAR(check.min_eigenvalue, 0.0, 1e-12);
    EXPECT_TRUE(check.is_cp);
    EXPECT_NEAR(check.choi.trace().real(), 1.0, 1e-14);  // normalized |Omega>
}

TEST(choi_cp_check, boundary_and_beyond) {
    ChoiCheck at = choi_cp_check(2, 2.0 / 3.0);
    EXPECT_NEAR(at.min_eigenvalue, 0.0, 1e-12);
    EXPECT_TRUE(at.is_cp);
    ChoiCheck past = choi_cp_check(2, 2.0 / 3.0 + 1e-3);
    EXPECT_LT(past.min_eigenvalue, 0.0);
    EXPECT_FALSE(past.is_cp);
    EXPECT_THROW(choi_cp_check(1, 0.1), InvariantError);
}

TEST(choi_cp_check, matches_closed_form_spectrum) {
    for (std::size_t d : {2, 3, 4}) {
        const double dd = static_cast<double>(d);
        for (double eps : {0.0, 0.1, cp_bound(d), cp_bound(d) + 1e-3, 0.9}) {
            double closed = std::min((1.0 - dd * eps) + eps / dd, eps / dd);
            EXPECT_NEAR(choi_cp_check(d, eps).min_eigenvalue, closed, 1e-12) << d << " " << eps;
        }
    }
}

TEST(channel_properties, local_unitary_covariance) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PartyDims dims{2, 3};
        DensityState rho = random_density_state(dims, 3, seed);
        Matrix u = random_local_unitary(dims, 100 + seed);
        DensityState rotated = DensityState::unchecked(dims, u * rho.matrix() * u.adjoint());
        for (const PartySubset &alpha : {PartySubset{0}, PartySubset{1}, PartySubset{0, 1}}) {
            double eps = 0.5 * cp_bound(dims.subset_dim(alpha));
            Matrix lhs = depolarize_subset(rotated, alpha, eps).matrix();
            Matrix rhs = u * depolarize_subset(rho, alpha, eps).matrix() * u.adjoint();
            EXPECT_LT((lhs - rhs).norm(), 1e-10);
        }
    }
}

TEST(channel_properties, trace_preservation_and_party_order) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PartyDims dims{2, 2, 3};
        DensityState rho = random_density_state(dims, 4, seed);
        double eps = 0.3 * (seed % 5 + 1) / 5.0;
        DensityState out = local_product_channel(rho, eps);
        EXPECT_LE(std::abs(out.matrix().trace().real() - 1.0), 1e-12);
        std::vector<std::size_t> order{0, 1, 2};
        Matrix reference = out.matrix();
        do {
            Matrix m = rho.matrix();
            for (std::size_t j : order) m = apply_depolarizer(m, dims, PartySubset::single(j), eps);
            EXPECT_LT((m - reference).cwiseAbs().maxCoeff(), 1e-12);
        } while (std::next_permutation(order.begin(), order.end()));
    }
}
