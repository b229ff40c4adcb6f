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

#include "mwfisher/measures.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "mwfisher/channels.hpp"

using namespace mwfisher;

namespace {

PureState ghz(double mu1 = 0.5) { return named_state(NamedState::ghz, 3, mu1); }

}  // namespace

TEST(linear_entropy, examples) {
    PureState prod = tensor_product(random_pure_state({2}, 1), random_pure_state({3}, 2));
    EXPECT_NEAR(linear_entropy(prod, {0}), 0.0, 1e-14);
    EXPECT_NEAR(linear_entropy(prod, {1}), 0.0, 1e-14);
    EXPECT_NEAR(linear_entropy(ghz(), {0}), 0.5, 1e-14);
    EXPECT_NEAR(linear_entropy(ghz(), {0, 1}), 0.5, 1e-14);
    EXPECT_NEAR(linear_entropy(DensityState::from_pure(ghz()), {0, 1}), 0.5, 1e-14);
    EXPECT_THROW(linear_entropy(ghz(), {3}), InvariantError);
}

TEST(meyer_wallach, ghz_family) {
    for (double mu1 : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        MeasureResult r = meyer_wallach(ghz(mu1));
        EXPECT_NEAR(r.value, 6.0 * mu1 * (1.0 - mu1), 1e-12) << mu1;
        EXPECT_EQ(r.terms.size(), 3u);
        EXPECT_DOUBLE_EQ(r.constant_K, -3.0);
    }
    EXPECT_NEAR(meyer_wallach(ghz()).value, 1.5, 1e-14);
}

TEST(meyer_wallach, w_state) {
    MeasureResult r = meyer_wallach(named_state(NamedState::w, 3, 1.0 / std::sqrt(3.0)));
    EXPECT_NEAR(r.value, 4.0 / 3.0, 1e-14);
    for (double t : r.terms) EXPECT_NEAR(t, 4.0 / 9.0, 1e-14);
}

TEST(meyer_wallach, separable_states_vanish) {
    PureState prod = tensor_product(tensor_product(random_pure_state({2}, 3), random_pure_state({3}, 4)),
                                    random_pure_state({2}, 5));
    EXPECT_NEAR(meyer_wallach(prod).value, 0.0, 1e-13);
}

TEST(meyer_wallach, equals_K_plus_overlap_with_rho_prime) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        PartyDims dims{2, 3, 2};
        PureState psi = random_pure_state(dims, seed);
        DensityState rho = DensityState::from_pure(psi);
        MeasureResult r = meyer_wallach(psi);
        EXPECT_NEAR(r.value, r.constant_K + (rho.matrix() * rho_prime(rho)).trace().real(), 1e-10);
    }
}

TEST(partition_measure, ghz_all_proper_subsets) {
    MeasureResult r = partition_measure(ghz());
    EXPECT_EQ(r.subsets.size(), 6u);
    EXPECT_NEAR(r.value, 3.0, 1e-13);
}

TEST(partition_measure, singles_reproduce_meyer_wallach) {
    PureState psi = random_pure_state(PartyDims::qubits(4), 8);
    EXPECT_DOUBLE_EQ(partition_measure(psi, single_party_subsets(4)).value, meyer_wallach(psi).value);
}

TEST(partition_measure, product_state_is_zero_and_K_cancels_overlap) {
    PureState prod = named_state(NamedState::product, 3, 0.0);
    MeasureResult r = partition_measure(prod);
    EXPECT_NEAR(r.value, 0.0, 1e-14);
    PureState psi = random_pure_state(PartyDims::qubits(3), 4);
    DensityState rho = DensityState::from_pure(psi);
    MeasureResult p = partition_measure(psi);
    EXPECT_NEAR(p.value, p.constant_K + (rho.matrix() * rho_prime(rho, p.subsets)).trace().real(), 1e-10);
}

TEST(partition_measure, rejects_improper_subsets) {
    EXPECT_THROW(partition_measure(ghz(), {PartySubset{}}), InvariantError);
    EXPECT_THROW(partition_measure(ghz(), {PartySubset{0, 1, 2}}), InvariantError);
    EXPECT_THROW(partition_measure(ghz(), {PartySubset{5}}), InvariantError);
}

TEST(all_proper_subsets, enumeration) {
    auto subsets = all_proper_subsets(3);
    ASSERT_EQ(subsets.size(), 6u);
    EXPECT_EQ(subsets[0], PartySubset{0});
    EXPECT_EQ(subsets[2], (PartySubset{0, 1}));
    EXPECT_EQ(subsets[5], (PartySubset{1, 2}));
}

TEST(two_copy_expectation, ghz) {
    MeasureResult r = two_copy_expectation(ghz());
    for (double t : r.terms) EXPECT_NEAR(t / 2.0, 0.25, 1e-14);
    EXPECT_NEAR(r.value, 1.5, 1e-14);
}

TEST(two_copy_expectation, product_vanishes) {
    EXPECT_NEAR(two_copy_expectation(named_state(NamedState::product, 4, 0.0)).value, 0.0, 1e-15);
}

TEST(two_copy_expectation, matches_meyer_wallach_on_mixed_dimensions) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        PureState psi = random_pure_state({2, 3, 2}, 60 + seed);
        EXPECT_NEAR(two_copy_expectation(psi).value, meyer_wallach(psi).value, 1e-10);
    }
}

TEST(two_copy_vector, layout_is_interleaved) {
    // |psi> = |01>: two copies -> |0 0 1 1> in (A0 B0 A1 B1) order = index 3.
    PureState psi({2, 2}, Vector::Unit(4, 1));
    Vector doubled = two_copy_vector(psi);
    EXPECT_EQ(doubled(3), Complex(1.0));
    EXPECT_NEAR(doubled.norm(), 1.0, 1e-15);
}

TEST(linear_entropy_sum, gradient_matches_finite_differences) {
    PartyDims dims{2, 2, 2};
    LinearEntropySum measure = LinearEntropySum::all_proper(3);
    Rng rng(17);
    Vector w(8);
    for (Eigen::Index i = 0; i < 8; ++i) w(i) = 0.4 * rng.complex_normal();
    Vector grad;
    double value = measure.weighted_value_and_gradient(w, dims, grad);
    EXPECT_NEAR(value, w.squaredNorm() * measure(PureState::normalized(dims, w)), 1e-12);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < 8; ++i) {
        Vector wp = w, wm = w;
        wp(i) += h;
        wm(i) -= h;
        double dx = (measure.weighted_value_and_gradient(wp, dims, grad) -
                     measure.weighted_value_and_gradient(wm, dims, grad)) / (2 * h);
        wp = w;
        wm = w;
        wp(i) += Complex(0, h);
        wm(i) -= Complex(0, h);
        double dy = (measure.weighted_value_and_gradient(wp, dims, grad) -
                     measure.weighted_value_and_gradient(wm, dims, grad)) / (2 * h);
        measure.weighted_value_and_gradient(w, dims, grad);
        // d/d conj(w) = (d/dx + i d/dy) / 2
        EXPECT_NEAR(std::abs(grad(i) - 0.5 * Complex(dx, dy)), 0.0, 1e-7) << i;
    }
}

TEST(meyer_wallach_normalization, qubit_scale) {
    // Q = (2/n) sum_j (1 - tr rho_j^2) is 1 for GHZ.
    EXPECT_NEAR(meyer_wallach_normalization(3) * meyer_wallach(ghz()).value, 1.0, 1e-14);
}
