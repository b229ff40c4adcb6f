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

#include <optional>
#include <string>
#include <vector>

#include "mwfisher/state.hpp"

namespace mwfisher {

/// Largest strength for which the d-dimensional depolarizer
/// E(X) = (1 - d eps) X + eps 1 tr X is completely positive.
inline double cp_bound(std::size_t d) {
    auto dd = static_cast<double>(d);
    return dd / (dd * dd - 1.0);
}

namespace detail {

inline void require_cp_strength(double epsilon, std::size_t d, const std::string &what) {
    double bound = cp_bound(d);
    if (!(epsilon >= 0.0) || epsilon > bound * (1.0 + 1e-14)) {
        throw RangeError(what + ": epsilon = " + std::to_string(epsilon) + " outside the CP range [0, " +
                         std::to_string(bound) + "] for dimension " + std::to_string(d));
    }
}

inline std::size_t min_local_dim(const PartyDims &dims) {
    std::size_t d = 0;
    for (std::size_t v : dims.values()) {
        d = d == 0 ? v : std::min(d, v);
    }
    return d;
}

}  // namespace detail

// Operator-level maps. These accept any square operator (not only states)
// and do not range-check epsilon, so they also serve derivative and Choi
// constructions.

/// (1 - eps d_alpha) X + eps 1_alpha (x) tr_alpha X
inline Matrix apply_depolarizer(const Matrix &x, const PartyDims &dims, const PartySubset &alpha, double epsilon) {
    const auto d_alpha = static_cast<double>(dims.subset_dim(alpha));
    Matrix reduced = partial_trace(x, dims, alpha);
    return (1.0 - epsilon * d_alpha) * x + epsilon * embed_identity(reduced, dims, alpha);
}

/// Derivative in epsilon of `apply_depolarizer`: X -> -d_alpha X + 1_alpha (x) tr_alpha X.
inline Matrix apply_depolarizer_generator(const Matrix &x, const PartyDims &dims, const PartySubset &alpha) {
    const auto d_alpha = static_cast<double>(dims.subset_dim(alpha));
    return -d_alpha * x + embed_identity(partial_trace(x, dims, alpha), dims, alpha);
}

inline Matrix apply_local_product(const Matrix &x, const PartyDims &dims, double epsilon) {
    Matrix out = x;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        out = apply_depolarizer(out, dims, PartySubset::single(j), epsilon);
    }
    return out;
}

// State-level channels ------------------------------------------------------

inline DensityState depolarize_subset(const DensityState &rho, const PartySubset &alpha, double epsilon) {
    alpha.validate(rho.dims().size());
    if (alpha.empty()) {
        throw InvariantError(Invariant::subset, "depolarizing channel needs a nonempty party subset");
    }
    detail::require_cp_strength(epsilon, rho.dims().subset_dim(alpha), "depolarize_subset " + alpha.to_string());
    return DensityState::unchecked(rho.dims(), apply_depolarizer(rho.matrix(), rho.dims(), alpha, epsilon));
}

/// Exact E_eps applied independently to every party. The single-party maps act
/// on distinct tensor factors and commute, so party order is irrelevant.
inline DensityState local_product_channel(const DensityState &rho, double epsilon) {
    for (std::size_t d : rho.dims().values()) {
        detail::require_cp_strength(epsilon, d, "local_product_channel");
    }
    return DensityState::unchecked(rho.dims(), apply_local_product(rho.matrix(), rho.dims(), epsilon));
}

/// Sequential composition of subset depolarizers, applied in list order.
/// Subset depolarizers commute exactly, overlapping or not, so the order only
/// affects rounding.
inline DensityState depolarize_sequence(const DensityState &rho, const std::vector<PartySubset> &subsets,
                                        double epsilon) {
    DensityState out = rho;
    for (const auto &alpha : subsets) {
        out = depolarize_subset(out, alpha, epsilon);
    }
    return out;
}

/// rho' = -d/d eps E_eps^{(x)n}(rho) at eps = 0, i.e. sum_j (d_j rho - 1_j (x) tr_j rho).
inline Matrix rho_prime(const DensityState &rho) {
    Matrix out = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (std::size_t j = 0; j < rho.dims().size(); ++j) {
        out -= apply_depolarizer_generator(rho.matrix(), rho.dims(), PartySubset::single(j));
    }
    return hermitize(out);
}

/// Generator for a family of subset channels composed at first order:
/// sum_alpha (d_alpha rho - 1_alpha (x) tr_alpha rho).
inline Matrix rho_prime(const DensityState &rho, const std::vector<PartySubset> &subsets) {
    Matrix out = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (const auto &alpha : subsets) {
        out -= apply_depolarizer_generator(rho.matrix(), rho.dims(), alpha);
    }
    return hermitize(out);
}

/// d/d eps of the exact local product channel output at finite epsilon.
inline Matrix channel_derivative(const DensityState &rho, double epsilon) {
    const PartyDims &dims = rho.dims();
    for (std::size_t d : dims.values()) {
        detail::require_cp_strength(epsilon, d, "channel_derivative");
    }
    Matrix out = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (std::size_t j = 0; j < dims.size(); ++j) {
        Matrix term = apply_depolarizer_generator(rho.matrix(), dims, PartySubset::single(j));
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (k != j) {
                term = apply_depolarizer(term, dims, PartySubset::single(k), epsilon);
            }
        }
        out += term;
    }
    return hermitize(out);
}

/// Which depolarizing channel a QFI evaluation uses: a single subset channel
/// E^alpha_eps, or (no target) the local product over all parties.
struct DepolarizingSpec {
    std::optional<PartySubset> target;
    double epsilon = 0.0;

    static DepolarizingSpec all_local(double epsilon) { return {std::nullopt, epsilon}; }
    static DepolarizingSpec subset(PartySubset alpha, double epsilon) { return {std::move(alpha), epsilon}; }

    /// Upper end of the CP range for this channel on `dims`.
    double bound(const PartyDims &dims) const {
        return target ? cp_bound(dims.subset_dim(*target)) : cp_bound(detail::min_local_dim(dims));
    }
};

inline DensityState apply_channel(const DensityState &rho, const DepolarizingSpec &noise) {
    if (noise.target) {
        return depolarize_subset(rho, *noise.target, noise.epsilon);
    }
    return local_product_channel(rho, noise.epsilon);
}

inline Matrix channel_derivative(const DensityState &rho, const DepolarizingSpec &noise) {
    if (noise.target) {
        noise.target->validate(rho.dims().size());
        detail::require_cp_strength(noise.epsilon, rho.dims().subset_dim(*noise.target), "channel_derivative");
        return hermitize(apply_depolarizer_generator(rho.matrix(), rho.dims(), *noise.target));
    }
    return channel_derivative(rho, noise.epsilon);
}

// Complete positivity -------------------------------------------------------

struct ChoiCheck {
    Matrix choi;
    double min_eigenvalue = 0.0;
    bool is_cp = false;
};

/// Choi matrix (E (x) I)(|Omega><Omega|) with |Omega> = sum_i |ii>/sqrt(d),
/// built by running the depolarizer on the first factor, so for
/// E(X) = (1 - d eps) X + eps 1 tr X it equals
/// (1 - d eps)|Omega><Omega| + (eps/d) 1 (x) 1.
inline ChoiCheck choi_cp_check(std::size_t d, double epsilon) {
    if (d < 2) {
        throw InvariantError(Invariant::dimension, "choi_cp_check needs d >= 2");
    }
    auto n = static_cast<Eigen::Index>(d);
    Vector omega = Vector::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        omega(i * n + i) = 1.0 / std::sqrt(static_cast<double>(d));
    }
    PartyDims dims({d, d});
    ChoiCheck out;
    out.choi = hermitize(apply_depolarizer(omega * omega.adjoint(), dims, PartySubset::single(0), epsilon));
    Eigen::SelfAdjointEigenSolver<Matrix> solver(out.choi, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = solver.eigenvalues().minCoeff();
    out.is_cp = out.min_eigenvalue >= -1e-12;
    return out;
}

}  // namespace mwfisher
