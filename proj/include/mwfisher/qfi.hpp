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

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mwfisher/channels.hpp"

namespace mwfisher {

/// Eigen-decomposition of a density operator, eigenvalues ascending.
struct SpectralDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;
    std::vector<bool> support_mask;
    double support_tol = 0.0;
};

/// Support tolerance used when none is given: 1e-10 times the largest
/// eigenvalue.
inline double default_support_tol(const RealVector &eigenvalues) {
    return 1e-10 * std::max(eigenvalues.maxCoeff(), 0.0);
}

/// Tolerance at the level of eigensolver round-off. Used for the exact channel
/// outputs, whose small eigenvalues (powers of epsilon) are genuine.
inline double machine_support_tol(const RealVector &eigenvalues) {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(eigenvalues.maxCoeff(), 0.0);
}

inline SpectralDecomposition spectral_decomposition(const Matrix &rho, std::optional<double> support_tol = {}) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(rho));
    SpectralDecomposition out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    out.support_tol = support_tol.value_or(default_support_tol(out.eigenvalues));
    out.support_mask.resize(static_cast<std::size_t>(out.eigenvalues.size()));
    for (Eigen::Index k = 0; k < out.eigenvalues.size(); ++k) {
        out.support_mask[static_cast<std::size_t>(k)] = out.eigenvalues(k) > out.support_tol;
    }
    return out;
}

namespace detail {

inline constexpr double kOffSupportWeight = 1e-8;

/// drho in the eigenbasis, after checking that it lives on the support.
/// Pairs (k, l) with lambda_k + lambda_l <= tol are "off support".
inline Matrix derivative_in_eigenbasis(const SpectralDecomposition &eig, const Matrix &drho) {
    if (drho.rows() != eig.eigenvectors.rows() || drho.cols() != drho.rows()) {
        throw InvariantError(Invariant::dimension, "derivative operator does not match the state dimension");
    }
    double scale = std::max(1.0, drho.cwiseAbs().maxCoeff());
    if (hermitian_deviation(drho) > 1e-10 * scale) {
        throw InvariantError(Invariant::hermiticity, "derivative operator is not Hermitian");
    }
    Matrix d = eig.eigenvectors.adjoint() * hermitize(drho) * eig.eigenvectors;
    double off_support = 0.0;
    for (Eigen::Index k = 0; k < d.rows(); ++k) {
        for (Eigen::Index l = 0; l < d.cols(); ++l) {
            if (eig.eigenvalues(k) + eig.eigenvalues(l) <= eig.support_tol) {
                off_support += std::norm(d(k, l));
            }
        }
    }
    if (std::sqrt(off_support) >= kOffSupportWeight) {
        throw InvariantError(Invariant::support,
                             "derivative has weight " + std::to_string(std::sqrt(off_support)) +
                                 " outside the support of the state; the QFI diverges (regularize epsilon > 0)");
    }
    return d;
}

}  // namespace detail

/// Symmetric logarithmic derivative: the Hermitian L with L rho + rho L = 2 drho
/// on the support of rho, and zero on the kernel block. Degenerate eigenvalues
/// need no special handling in the (lambda_k + lambda_l) formula.
inline Matrix sld(const Matrix &rho, const Matrix &drho, std::optional<double> support_tol = {}) {
    SpectralDecomposition eig = spectral_decomposition(rho, support_tol);
    Matrix d = detail::derivative_in_eigenbasis(eig, drho);
    Matrix lambda = Matrix::Zero(d.rows(), d.cols());
    for (Eigen::Index k = 0; k < d.rows(); ++k) {
        for (Eigen::Index l = 0; l < d.cols(); ++l) {
            double denom = eig.eigenvalues(k) + eig.eigenvalues(l);
            if (denom > eig.support_tol) {
                lambda(k, l) = 2.0 * d(k, l) / denom;
            }
        }
    }
    return hermitize(eig.eigenvectors * lambda * eig.eigenvectors.adjoint());
}

inline Matrix sld(const DensityState &rho, const Matrix &drho, std::optional<double> support_tol = {}) {
    return sld(rho.matrix(), drho, support_tol);
}

/// sum over support pairs of 2 |drho_kl|^2 / (lambda_k + lambda_l), in the
/// eigenbasis of rho.
inline double quantum_fisher(const Matrix &rho, const Matrix &drho, std::optional<double> support_tol = {}) {
    SpectralDecomposition eig = spectral_decomposition(rho, support_tol);
    Matrix d = detail::derivative_in_eigenbasis(eig, drho);
    double j = 0.0;
    for (Eigen::Index k = 0; k < d.rows(); ++k) {
        for (Eigen::Index l = 0; l < d.cols(); ++l) {
            double denom = eig.eigenvalues(k) + eig.eigenvalues(l);
            if (denom > eig.support_tol) {
                j += 2.0 * std::norm(d(k, l)) / denom;
            }
        }
    }
    return j;
}

/// The two trace forms tr[rho L^2] and tr[drho L] of the QFI. They agree for
/// any valid SLD; used as an internal consistency check.
struct QfiForms {
    double rho_sld_squared = 0.0;
    double drho_sld = 0.0;
};

inline QfiForms qfi_forms(const Matrix &rho, const Matrix &drho, std::optional<double> support_tol = {}) {
    Matrix l = sld(rho, drho, support_tol);
    return {(rho * l * l).trace().real(), (drho * l).trace().real()};
}

/// A point on a QFI curve. `regularized` is epsilon * qfi, finite as
/// epsilon -> 0 for pure inputs.
struct QfiPoint {
    double epsilon = 0.0;
    double qfi = 0.0;
    double regularized = 0.0;
};

inline QfiPoint qfi_at(const DensityState &rho, const DepolarizingSpec &channel) {
    double bound = channel.bound(rho.dims());
    if (!(channel.epsilon > 0.0) || !(channel.epsilon < bound)) {
        throw RangeError("qfi_at: epsilon = " + std::to_string(channel.epsilon) + " must lie strictly inside (0, " +
                         std::to_string(bound) + ")");
    }
    DensityState out = apply_channel(rho, channel);
    Matrix derivative = channel_derivative(rho, channel);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(out.matrix(), Eigen::EigenvaluesOnly);
    double j = quantum_fisher(out.matrix(), derivative, machine_support_tol(solver.eigenvalues()));
    return {channel.epsilon, j, channel.epsilon * j};
}

inline QfiPoint qfi_at(const PureState &state, const DepolarizingSpec &channel) {
    return qfi_at(DensityState::from_pure(state), channel);
}

/// lim_{eps->0} eps J(rho_eps) for a pure input under the local product
/// channel: tr[rho rho'] = sum_j d_j - sum_j tr[rho_j^2].
inline double qfi_limit_pure(const PureState &state) {
    DensityState rho = DensityState::from_pure(state);
    return (rho.matrix() * rho_prime(rho)).trace().real();
}

/// Same limit for the channel built from `subsets` composed at first order.
inline double qfi_limit_pure(const PureState &state, const std::vector<PartySubset> &subsets) {
    DensityState rho = DensityState::from_pure(state);
    return (rho.matrix() * rho_prime(rho, subsets)).trace().real();
}

/// Evaluates `qfi_at` over a grid in the given order. An invalid grid point
/// aborts with a RangeError naming its index.
inline std::vector<QfiPoint> regularized_qfi_curve(const PureState &state, std::span<const double> eps_grid,
                                                   const std::optional<PartySubset> &target = std::nullopt) {
    DensityState rho = DensityState::from_pure(state);
    const double bound = DepolarizingSpec{target, 0.0}.bound(state.dims());
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0) || !(eps_grid[i] < bound)) {
            throw RangeError("grid point " + std::to_string(i) + " (epsilon = " + std::to_string(eps_grid[i]) +
                             ") outside (0, " + std::to_string(bound) + ")");
        }
    }
    std::vector<QfiPoint> out;
    out.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        out.push_back(qfi_at(rho, DepolarizingSpec{target, eps}));
    }
    return out;
}

/// Forward-difference rate -(F(rho, rho_eps)^2 - 1)/eps for a pure input,
/// using F^2 = <psi|rho_eps|psi>. Tends to tr[rho rho'] with O(eps) error.
inline double fidelity_rate_check(const PureState &state, double eps_small) {
    if (!(eps_small > 0.0) || eps_small > 1e-3) {
        throw RangeError("fidelity_rate_check: eps_small must lie in (0, 1e-3], got " + std::to_string(eps_small));
    }
    DensityState out = local_product_channel(DensityState::from_pure(state), eps_small);
    const Vector &psi = state.amplitudes();
    double f2 = psi.dot(out.matrix() * psi).real();
    return (1.0 - f2) / eps_small;
}

/// 8 (1 - F(rho_eps, rho_{eps+delta})) / delta^2, which tends to J(rho_eps).
inline double fidelity_hessian_estimate(const DensityState &rho, const DepolarizingSpec &channel, double delta) {
    DensityState a = apply_channel(rho, channel);
    DensityState b = apply_channel(rho, DepolarizingSpec{channel.target, channel.epsilon + delta});
    return 8.0 * (1.0 - fidelity(a, b)) / (delta * delta);
}

}  // namespace mwfisher
