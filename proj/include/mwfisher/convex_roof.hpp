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

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "mwfisher/measures.hpp"

namespace mwfisher {

/// Probability-weighted pure-state decomposition of a mixed state.
struct Ensemble {
    std::vector<double> weights;
    std::vector<PureState> members;

    Matrix reconstruct() const {
        if (members.empty()) {
            return {};
        }
        auto d = static_cast<Eigen::Index>(members.front().dim());
        Matrix out = Matrix::Zero(d, d);
        for (std::size_t j = 0; j < members.size(); ++j) {
            out += weights[j] * members[j].projector();
        }
        return out;
    }
};

template <class M>
concept PureStateMeasure = requires(const M &m, const PureState &psi) {
    { m(psi) } -> std::convertible_to<double>;
};

/// Measures that can hand the roof optimizer an analytic gradient of the
/// unnormalized ensemble term; see LinearEntropySum.
template <class M>
concept DifferentiableMeasure = PureStateMeasure<M> && requires(const M &m, const Vector &w, const PartyDims &dims,
                                                                Vector &grad) {
    { m.weighted_value_and_gradient(w, dims, grad) } -> std::convertible_to<double>;
};

inline constexpr double kRankTolerance = 1e-10;

namespace detail {

struct SupportBasis {
    Matrix scaled;  // columns sqrt(lambda_k) e_k over the support
    std::size_t rank = 0;
};

inline SupportBasis support_basis(const DensityState &rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = solver.eigenvalues().size(); k-- > 0;) {
        if (solver.eigenvalues()(k) > kRankTolerance) {
            keep.push_back(k);
        }
    }
    SupportBasis out;
    out.rank = keep.size();
    out.scaled = Matrix(rho.matrix().rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        out.scaled.col(static_cast<Eigen::Index>(c)) =
            std::sqrt(solver.eigenvalues()(keep[c])) * solver.eigenvectors().col(keep[c]);
    }
    return out;
}

inline void require_isometry(const Matrix &mixing, std::size_t rank) {
    if (mixing.cols() != static_cast<Eigen::Index>(rank) || mixing.rows() < mixing.cols()) {
        throw InvariantError(Invariant::isometry, "mixing matrix must be N x rank with N >= rank (rank " +
                                                      std::to_string(rank) + ", got " +
                                                      std::to_string(mixing.rows()) + "x" +
                                                      std::to_string(mixing.cols()) + ")");
    }
    Matrix gram = mixing.adjoint() * mixing;
    double dev = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (dev > 1e-10) {
        throw InvariantError(Invariant::isometry, "mixing columns are not orthonormal (deviation " +
                                                      std::to_string(dev) + ")");
    }
}

inline Ensemble ensemble_from_basis(const PartyDims &dims, const Matrix &scaled, const Matrix &mixing) {
    Matrix unnormalized = scaled * mixing.transpose();
    Ensemble out;
    for (Eigen::Index j = 0; j < unnormalized.cols(); ++j) {
        double p = unnormalized.col(j).squaredNorm();
        if (p > 1e-15) {
            out.weights.push_back(p);
            out.members.push_back(PureState::normalized(dims, unnormalized.col(j)));
        }
    }
    return out;
}

/// phi(w) = |w|^2 E(w/|w|) and d phi / d conj(w).
template <PureStateMeasure Measure>
double weighted_term(const Measure &measure, const Vector &w, const PartyDims &dims, Vector &grad) {
    if constexpr (DifferentiableMeasure<Measure>) {
        return measure.weighted_value_and_gradient(w, dims, grad);
    } else {
        auto phi = [&](const Vector &v) {
            double s = v.squaredNorm();
            return s > 0.0 ? s * static_cast<double>(measure(PureState::normalized(dims, v))) : 0.0;
        };
        double value = phi(w);
        grad = Vector::Zero(w.size());
        const double h = 1e-6 * std::max(1.0, w.norm());
        Vector probe = w;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const Complex orig = w(i);
            probe(i) = orig + h;
            double fx_plus = phi(probe);
            probe(i) = orig - h;
            double fx_minus = phi(probe);
            probe(i) = orig + Complex(0.0, h);
            double fy_plus = phi(probe);
            probe(i) = orig - Complex(0.0, h);
            double fy_minus = phi(probe);
            probe(i) = orig;
            grad(i) = 0.5 * Complex((fx_plus - fx_minus) / (2 * h), (fy_plus - fy_minus) / (2 * h));
        }
        return value;
    }
}

template <PureStateMeasure Measure>
double roof_value(const Measure &measure, const PartyDims &dims, const Matrix &scaled, const Matrix &mixing,
                  Matrix *gradient) {
    Matrix unnormalized = scaled * mixing.transpose();
    Matrix term_grads(unnormalized.rows(), unnormalized.cols());
    double value = 0.0;
    Vector g;
    for (Eigen::Index j = 0; j < unnormalized.cols(); ++j) {
        value += weighted_term(measure, unnormalized.col(j), dims, g);
        term_grads.col(j) = g;
    }
    if (gradient) {
        *gradient = (scaled.adjoint() * term_grads).transpose();
    }
    return value;
}

inline double real_inner(const Matrix &a, const Matrix &b) { return (a.adjoint() * b).trace().real(); }

/// Projection onto the tangent space of the Stiefel manifold at u.
inline Matrix project_tangent(const Matrix &u, const Matrix &z) {
    Matrix uz = u.adjoint() * z;
    return z - u * ((uz + uz.adjoint()) * 0.5);
}

/// Polar retraction back to orthonormal columns.
inline Matrix retract(const Matrix &a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline Matrix random_isometry(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            g(i, j) = rng.complex_normal();
        }
    }
    return retract(g);
}

struct DescentResult {
    Matrix mixing;
    double value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Polak-Ribiere+ conjugate gradient on the isometry manifold with Armijo
/// backtracking. Converged means the Riemannian gradient norm fell below
/// `tol` or the objective stalled at `tol * 1e-3` relative decrease.
template <PureStateMeasure Measure>
DescentResult descend(const Measure &measure, const PartyDims &dims, const Matrix &scaled, Matrix mixing,
                      std::size_t max_iters, double tol) {
    Matrix grad;
    double value = roof_value(measure, dims, scaled, mixing, &grad);
    Matrix xi = project_tangent(mixing, grad);
    Matrix direction = -xi;
    double step = 1.0;
    DescentResult out;
    for (std::size_t it = 0; it < max_iters; ++it) {
        out.iterations = it + 1;
        double gnorm2 = real_inner(xi, xi);
        if (std::sqrt(gnorm2) <= tol) {
            out.converged = true;
            break;
        }
        double slope = 2.0 * real_inner(xi, direction);
        if (slope >= 0.0) {
            direction = -xi;
            slope = -2.0 * gnorm2;
        }
        Matrix candidate;
        Matrix cand_grad;
        double cand_value = value;
        bool accepted = false;
        double t = std::min(step * 2.0, 1e3);
        for (int trial = 0; trial < 60; ++trial) {
            candidate = retract(mixing + t * direction);
            cand_value = roof_value(measure, dims, scaled, candidate, &cand_grad);
            if (cand_value <= value + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // No decrease representable along the steepest direction either.
            if (real_inner(direction + xi, direction + xi) == 0.0) {
                out.converged = true;
                break;
            }
            direction = -xi;
            continue;
        }
        step = t;
        const double decrease = value - cand_value;
        Matrix xi_new = project_tangent(candidate, cand_grad);
        Matrix xi_old = project_tangent(candidate, xi);
        double beta = std::max(0.0, real_inner(xi_new, xi_new - xi_old) / gnorm2);
        direction = -xi_new + beta * project_tangent(candidate, direction);
        mixing = std::move(candidate);
        xi = std::move(xi_new);
        value = cand_value;
        if (decrease <= 1e-3 * tol * std::max(1.0, std::abs(value))) {
            out.converged = true;
            break;
        }
    }
    out.mixing = std::move(mixing);
    out.value = value;
    return out;
}

}  // namespace detail

/// HJW parametrization: members sqrt(p_j)|Psi_j> = sum_k mixing_{jk} sqrt(lambda_k)|e_k>
/// over the eigenvectors of rho with lambda_k > 1e-10 (descending). Members
/// with zero weight are dropped.
inline Ensemble ensemble_from_isometry(const DensityState &rho, const Matrix &mixing) {
    detail::SupportBasis basis = detail::support_basis(rho);
    detail::require_isometry(mixing, basis.rank);
    return detail::ensemble_from_basis(rho.dims(), basis.scaled, mixing);
}

template <PureStateMeasure Measure>
double roof_objective(const Ensemble &ensemble, const Measure &measure) {
    double value = 0.0;
    for (std::size_t j = 0; j < ensemble.members.size(); ++j) {
        value += ensemble.weights[j] * static_cast<double>(measure(ensemble.members[j]));
    }
    return value;
}

struct RoofConfig {
    std::optional<std::size_t> ensemble_size;  // default rank^2
    std::size_t restarts = 20;
    std::size_t max_iters = 2000;
    double tol = 1e-7;
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0: hardware concurrency
};

/// Best decomposition found. Outside the two-qubit case this is an upper
/// bound on the roof. `ensemble_size` is the truncation actually used.
struct RoofResult {
    double value = 0.0;
    Ensemble ensemble;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t rank = 0;
    std::size_t ensemble_size = 0;
    double eigen_objective = 0.0;
};

/// Multi-start minimization of sum_j p_j E(Psi_j) over all ensembles of
/// `ensemble_size` members realizing rho. Restart 0 starts at the
/// eigen-decomposition, the others at Haar-random isometries seeded by
/// derive_seed(seed, restart). Restarts run on worker threads; the fold over
/// them is in restart order, so results do not depend on scheduling.
template <PureStateMeasure Measure>
RoofResult convex_roof_minimize(const DensityState &rho, const Measure &measure, const RoofConfig &config = {}) {
    detail::SupportBasis basis = detail::support_basis(rho);
    const std::size_t rank = basis.rank;
    const std::size_t size = config.ensemble_size.value_or(rank * rank);
    if (size < rank) {
        throw InvariantError(Invariant::isometry, "ensemble_size " + std::to_string(size) + " below rank " +
                                                      std::to_string(rank));
    }

    RoofResult out;
    out.rank = rank;
    out.ensemble_size = size;
    Matrix canonical = Matrix::Identity(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(rank));
    out.eigen_objective = detail::roof_value(measure, rho.dims(), basis.scaled, canonical, nullptr);

    if (rank == 1) {
        out.ensemble = detail::ensemble_from_basis(rho.dims(), basis.scaled, Matrix::Identity(1, 1));
        out.value = static_cast<double>(measure(out.ensemble.members.front()));
        out.converged = true;
        out.ensemble_size = 1;
        return out;
    }

    const std::size_t restarts = std::max<std::size_t>(config.restarts, 1);
    std::vector<detail::DescentResult> results(restarts);
    auto run = [&](std::size_t r) {
        Matrix start = r == 0 ? canonical : detail::random_isometry(size, rank, derive_seed(config.seed, r));
        results[r] = detail::descend(measure, rho.dims(), basis.scaled, std::move(start), config.max_iters, config.tol);
    };
    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, restarts);
    if (workers <= 1) {
        for (std::size_t r = 0; r < restarts; ++r) {
            run(r);
        }
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < restarts; r += workers) {
                    run(r);
                }
            });
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        if (results[r].value < results[best].value) {
            best = r;
        }
    }
    out.value = results[best].value;
    out.converged = results[best].converged;
    for (const auto &r : results) {
        out.iterations += r.iterations;
    }
    out.ensemble = detail::ensemble_from_basis(rho.dims(), basis.scaled, results[best].mixing);
    return out;
}

/// Two-qubit concurrence max(0, l1 - l2 - l3 - l4), l_i the decreasing square
/// roots of the eigenvalues of rho (sy(x)sy) conj(rho) (sy(x)sy). With
/// rho = A A^dagger over its support, these are the singular values of the
/// symmetric matrix A^T (sy(x)sy) A, which avoids square roots of eigenvalues
/// that are zero up to round-off.
inline double wootters_concurrence(const DensityState &rho) {
    if (!(rho.dims() == PartyDims{2, 2})) {
        throw InvariantError(Invariant::dimension, "concurrence is defined here for two qubits only");
    }
    Matrix sy(2, 2);
    sy << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    const Matrix yy = kron(sy, sy);
    const Matrix a = detail::support_basis(rho).scaled;
    Eigen::JacobiSVD<Matrix> svd(a.transpose() * yy * a);
    RealVector l = RealVector::Zero(4);
    l.head(svd.singularValues().size()) = svd.singularValues();
    std::sort(l.data(), l.data() + l.size(), std::greater<>());
    return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

}  // namespace mwfisher
