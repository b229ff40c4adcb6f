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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mwfisher/errors.hpp"
#include "mwfisher/random.hpp"

namespace mwfisher {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;

inline Matrix hermitize(const Matrix &m) { return (m + m.adjoint()) * 0.5; }

inline double hermitian_deviation(const Matrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Sorted set of zero-based party indices.
class PartySubset {
   public:
    PartySubset() = default;

    explicit PartySubset(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
        std::sort(indices_.begin(), indices_.end());
        if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
            throw InvariantError(Invariant::subset, "duplicate party index");
        }
    }

    PartySubset(std::initializer_list<std::size_t> indices) : PartySubset(std::vector<std::size_t>(indices)) {}

    static PartySubset single(std::size_t party) { return PartySubset({party}); }

    static PartySubset all(std::size_t n_parties) {
        std::vector<std::size_t> v(n_parties);
        std::iota(v.begin(), v.end(), std::size_t{0});
        return PartySubset(std::move(v));
    }

    const std::vector<std::size_t> &indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }

    bool contains(std::size_t party) const { return std::binary_search(indices_.begin(), indices_.end(), party); }

    PartySubset complement(std::size_t n_parties) const {
        validate(n_parties);
        std::vector<std::size_t> out;
        for (std::size_t p = 0; p < n_parties; ++p) {
            if (!contains(p)) {
                out.push_back(p);
            }
        }
        return PartySubset(std::move(out));
    }

    void validate(std::size_t n_parties) const {
        if (!indices_.empty() && indices_.back() >= n_parties) {
            throw InvariantError(Invariant::subset, "party index " + std::to_string(indices_.back()) +
                                                        " out of range for " + std::to_string(n_parties) + " parties");
        }
    }

    bool is_proper(std::size_t n_parties) const { return !indices_.empty() && indices_.size() < n_parties; }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            s += (i ? "," : "") + std::to_string(indices_[i]);
        }
        return s + "}";
    }

    friend bool operator==(const PartySubset &, const PartySubset &) = default;

   private:
    std::vector<std::size_t> indices_;
};

/// Ordered local dimensions. Party 0 is the slowest-varying index of the
/// joint basis (party-major ordering). An empty list is the trivial
/// one-dimensional system left after tracing out every party.
class PartyDims {
   public:
    PartyDims() = default;

    explicit PartyDims(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        for (std::size_t d : dims_) {
            if (d < 2) {
                throw InvariantError(Invariant::dimension, "every local dimension must be at least 2");
            }
        }
    }

    PartyDims(std::initializer_list<std::size_t> dims) : PartyDims(std::vector<std::size_t>(dims)) {}

    static PartyDims qubits(std::size_t n) { return PartyDims(std::vector<std::size_t>(n, 2)); }

    std::size_t size() const { return dims_.size(); }
    bool empty() const { return dims_.empty(); }
    std::size_t operator[](std::size_t party) const { return dims_.at(party); }
    const std::vector<std::size_t> &values() const { return dims_; }

    std::size_t total() const {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
    }

    /// Product of the selected local dimensions (d_alpha).
    std::size_t subset_dim(const PartySubset &subset) const {
        subset.validate(size());
        std::size_t d = 1;
        for (std::size_t p : subset.indices()) {
            d *= dims_[p];
        }
        return d;
    }

    PartyDims select(const PartySubset &subset) const {
        subset.validate(size());
        std::vector<std::size_t> out;
        for (std::size_t p : subset.indices()) {
            out.push_back(dims_[p]);
        }
        return PartyDims(std::move(out));
    }

    PartyDims concat(const PartyDims &other) const {
        std::vector<std::size_t> out = dims_;
        out.insert(out.end(), other.dims_.begin(), other.dims_.end());
        return PartyDims(std::move(out));
    }

    friend bool operator==(const PartyDims &, const PartyDims &) = default;

   private:
    std::vector<std::size_t> dims_;
};

namespace detail {

/// Splits every joint basis index into (kept, traced) sub-indices, each in
/// party-major order over its own parties, and groups joint indices by their
/// traced sub-index.
struct IndexSplit {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> traced;
    std::vector<std::vector<std::size_t>> by_traced;
    std::size_t kept_dim = 1;
    std::size_t traced_dim = 1;
};

inline IndexSplit split_index(const PartyDims &dims, const PartySubset &traced) {
    traced.validate(dims.size());
    const std::size_t n = dims.size();
    std::vector<std::size_t> kept_stride(n, 0);
    std::vector<std::size_t> traced_stride(n, 0);
    IndexSplit split;
    for (std::size_t q = n; q-- > 0;) {
        if (traced.contains(q)) {
            traced_stride[q] = split.traced_dim;
            split.traced_dim *= dims[q];
        } else {
            kept_stride[q] = split.kept_dim;
            split.kept_dim *= dims[q];
        }
    }
    const std::size_t total = dims.total();
    split.kept.resize(total);
    split.traced.resize(total);
    split.by_traced.resize(split.traced_dim);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        std::size_t k = 0;
        std::size_t t = 0;
        for (std::size_t q = n; q-- > 0;) {
            std::size_t digit = rem % dims[q];
            rem /= dims[q];
            k += digit * kept_stride[q];
            t += digit * traced_stride[q];
        }
        split.kept[i] = k;
        split.traced[i] = t;
        split.by_traced[t].push_back(i);
    }
    return split;
}

inline void require_square(const Matrix &m, const PartyDims &dims) {
    auto d = static_cast<Eigen::Index>(dims.total());
    if (m.rows() != d || m.cols() != d) {
        throw InvariantError(Invariant::dimension, "matrix is " + std::to_string(m.rows()) + "x" +
                                                       std::to_string(m.cols()) + ", expected " +
                                                       std::to_string(d) + "x" + std::to_string(d));
    }
}

}  // namespace detail

/// Partial trace of an arbitrary operator over the `traced` parties. The
/// result acts on the remaining parties in their original relative order.
inline Matrix partial_trace(const Matrix &m, const PartyDims &dims, const PartySubset &traced) {
    detail::require_square(m, dims);
    auto split = detail::split_index(dims, traced);
    Matrix out = Matrix::Zero(split.kept_dim, split.kept_dim);
    for (const auto &group : split.by_traced) {
        for (std::size_t a : group) {
            for (std::size_t b : group) {
                out(split.kept[a], split.kept[b]) += m(a, b);
            }
        }
    }
    return out;
}

/// Inverse placement of `partial_trace`: returns 1_alpha (x) reduced with the
/// identity on the `identity_slots` parties and `reduced` on the rest.
inline Matrix embed_identity(const Matrix &reduced, const PartyDims &dims, const PartySubset &identity_slots) {
    auto split = detail::split_index(dims, identity_slots);
    if (reduced.rows() != static_cast<Eigen::Index>(split.kept_dim) || reduced.cols() != reduced.rows()) {
        throw InvariantError(Invariant::dimension, "reduced operator does not match the complement dimension");
    }
    const auto total = static_cast<Eigen::Index>(dims.total());
    Matrix out = Matrix::Zero(total, total);
    for (const auto &group : split.by_traced) {
        for (std::size_t a : group) {
            for (std::size_t b : group) {
                out(a, b) = reduced(split.kept[a], split.kept[b]);
            }
        }
    }
    return out;
}

class PureState {
   public:
    PureState(PartyDims dims, Vector amplitudes) : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amplitudes_.size()) != dims_.total()) {
            throw InvariantError(Invariant::dimension, "amplitude vector has length " +
                                                           std::to_string(amplitudes_.size()) + ", expected " +
                                                           std::to_string(dims_.total()));
        }
        double norm = amplitudes_.norm();
        if (std::abs(norm - 1.0) > kNormTolerance) {
            throw InvariantError(Invariant::normalization, "amplitude norm is " + std::to_string(norm));
        }
    }

    /// Rescales `amplitudes` to unit norm before validating.
    static PureState normalized(PartyDims dims, Vector amplitudes) {
        double norm = amplitudes.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw InvariantError(Invariant::normalization, "cannot normalize a zero or non-finite vector");
        }
        return PureState(std::move(dims), amplitudes / norm);
    }

    const PartyDims &dims() const { return dims_; }
    const Vector &amplitudes() const { return amplitudes_; }
    std::size_t dim() const { return dims_.total(); }

    Matrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

   private:
    PartyDims dims_;
    Vector amplitudes_;
};

class DensityState {
   public:
    /// Validates Hermiticity, unit trace and the eigenvalue floor; the stored
    /// matrix is the Hermitian part of `matrix`.
    DensityState(PartyDims dims, const Matrix &matrix) : dims_(std::move(dims)) {
        detail::require_square(matrix, dims_);
        double dev = hermitian_deviation(matrix);
        if (dev > kHermitianTolerance) {
            throw InvariantError(Invariant::hermiticity, "max |M - M^dagger| = " + std::to_string(dev));
        }
        matrix_ = hermitize(matrix);
        double tr = matrix_.trace().real();
        if (std::abs(tr - 1.0) > kTraceTolerance) {
            throw InvariantError(Invariant::trace, "trace is " + std::to_string(tr));
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
        double min_eig = solver.eigenvalues().minCoeff();
        if (min_eig < kEigenvalueFloor) {
            throw InvariantError(Invariant::positivity, "minimum eigenvalue is " + std::to_string(min_eig));
        }
    }

    /// For results of trusted arithmetic (channel outputs, partial traces):
    /// symmetrized but not re-validated.
    static DensityState unchecked(PartyDims dims, const Matrix &matrix) {
        detail::require_square(matrix, dims);
        return DensityState(UncheckedTag{}, std::move(dims), hermitize(matrix));
    }

    static DensityState from_pure(const PureState &psi) { return unchecked(psi.dims(), psi.projector()); }

    static DensityState maximally_mixed(PartyDims dims) {
        auto d = static_cast<Eigen::Index>(dims.total());
        return unchecked(std::move(dims), Matrix::Identity(d, d) / static_cast<double>(d));
    }

    const PartyDims &dims() const { return dims_; }
    const Matrix &matrix() const { return matrix_; }
    std::size_t dim() const { return dims_.total(); }

   private:
    struct UncheckedTag {};
    DensityState(UncheckedTag, PartyDims dims, Matrix matrix) : dims_(std::move(dims)), matrix_(std::move(matrix)) {}

    PartyDims dims_;
    Matrix matrix_;
};

inline DensityState partial_trace(const DensityState &rho, const PartySubset &traced) {
    traced.validate(rho.dims().size());
    PartySubset kept = traced.complement(rho.dims().size());
    return DensityState::unchecked(rho.dims().select(kept), partial_trace(rho.matrix(), rho.dims(), traced));
}

/// Reduced state on the `kept` parties.
inline DensityState marginal(const DensityState &rho, const PartySubset &kept) {
    return partial_trace(rho, kept.complement(rho.dims().size()));
}

/// Reduced density matrix of a pure state on the `kept` parties, computed as
/// Psi Psi^dagger of the reshaped amplitude matrix.
inline Matrix marginal_matrix(const PureState &psi, const PartySubset &kept) {
    const std::size_t n = psi.dims().size();
    auto split = detail::split_index(psi.dims(), kept.complement(n));
    Matrix reshaped = Matrix::Zero(split.kept_dim, split.traced_dim);
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        reshaped(split.kept[i], split.traced[i]) = psi.amplitudes()(i);
    }
    return reshaped * reshaped.adjoint();
}

inline double purity(const Matrix &m) { return m.squaredNorm(); }

/// tr[rho^2]; for a Hermitian matrix this is the squared Frobenius norm.
inline double purity(const DensityState &rho) { return purity(rho.matrix()); }

namespace detail {

/// Columns sqrt(lambda_k) v_k over eigenvalues above 64 ulp of the largest,
/// so that m = F F^dagger up to round-off.
inline Matrix psd_factor(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
    const RealVector &lambda = solver.eigenvalues();
    const double cut = 64.0 * std::numeric_limits<double>::epsilon() * std::max(lambda.maxCoeff(), 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        if (lambda(k) > cut) keep.push_back(k);
    }
    Matrix out(m.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        out.col(static_cast<Eigen::Index>(c)) = std::sqrt(lambda(keep[c])) * solver.eigenvectors().col(keep[c]);
    }
    return out;
}

}  // namespace detail

/// Uhlmann fidelity tr sqrt(sqrt(sigma) rho sqrt(sigma)), computed as the
/// trace norm of A^dagger B for rho = A A^dagger, sigma = B B^dagger; clamped
/// to [0, 1].
inline double fidelity(const DensityState &rho, const DensityState &sigma) {
    if (!(rho.dims() == sigma.dims())) {
        throw InvariantError(Invariant::dimension, "fidelity arguments have different party dimensions");
    }
    Matrix overlap = detail::psd_factor(rho.matrix()).adjoint() * detail::psd_factor(sigma.matrix());
    if (overlap.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(overlap);
    return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

/// Kronecker product in party-major order.
inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline DensityState tensor_product(const DensityState &a, const DensityState &b) {
    return DensityState::unchecked(a.dims().concat(b.dims()), kron(a.matrix(), b.matrix()));
}

inline PureState tensor_product(const PureState &a, const PureState &b) {
    Vector out(a.amplitudes().size() * b.amplitudes().size());
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        out.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
    }
    return PureState::normalized(a.dims().concat(b.dims()), out);
}

inline PureState apply_unitary(const Matrix &u, const PureState &psi) {
    return PureState::normalized(psi.dims(), u * psi.amplitudes());
}

// Named states -------------------------------------------------------------

enum class NamedState { ghz, w, product };

inline NamedState parse_named_state(std::string_view name) {
    if (name == "ghz") return NamedState::ghz;
    if (name == "w") return NamedState::w;
    if (name == "product") return NamedState::product;
    throw ParseError("unknown named state '" + std::string(name) + "' (expected ghz, w or product)");
}

/// Qubit family states:
///   ghz:     sqrt(mu1)|0...0> + sqrt(1-mu1)|1...1>
///   w:       mu1|10...0> + mu2 (|010...0> + ... + |0...01>),  mu2 = sqrt((1-mu1^2)/(n-1))
///   product: |0...0> (mu1 ignored)
inline PureState named_state(NamedState name, std::size_t n_parties, double mu1) {
    if (!(mu1 >= 0.0 && mu1 <= 1.0)) {
        throw RangeError("mu1 must lie in [0, 1], got " + std::to_string(mu1));
    }
    if (n_parties < 2) {
        throw RangeError("named states need at least 2 parties, got " + std::to_string(n_parties));
    }
    PartyDims dims = PartyDims::qubits(n_parties);
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
    const Eigen::Index last = amps.size() - 1;
    switch (name) {
        case NamedState::ghz:
            amps(0) = std::sqrt(mu1);
            amps(last) = std::sqrt(1.0 - mu1);
            break;
        case NamedState::w: {
            double mu2 = std::sqrt((1.0 - mu1 * mu1) / static_cast<double>(n_parties - 1));
            for (std::size_t p = 0; p < n_parties; ++p) {
                // Excitation on party p sits at bit (n-1-p) in party-major order.
                Eigen::Index index = Eigen::Index{1} << (n_parties - 1 - p);
                amps(index) = p == 0 ? mu1 : mu2;
            }
            break;
        }
        case NamedState::product:
            amps(0) = 1.0;
            break;
    }
    return PureState::normalized(std::move(dims), amps);
}

// Random states ------------------------------------------------------------

/// Haar-distributed pure state: normalized complex Gaussian vector.
inline PureState random_pure_state(const PartyDims &dims, std::uint64_t seed) {
    Rng rng(seed);
    Vector v(static_cast<Eigen::Index>(dims.total()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = rng.complex_normal();
    }
    return PureState::normalized(dims, v);
}

/// Ginibre-induced mixed state G G^dagger / tr of the given rank.
inline DensityState random_density_state(const PartyDims &dims, std::size_t rank, std::uint64_t seed) {
    Rng rng(seed);
    auto d = static_cast<Eigen::Index>(dims.total());
    Matrix g(d, static_cast<Eigen::Index>(rank));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            g(i, j) = rng.complex_normal();
        }
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityState::unchecked(dims, rho);
}

/// Haar unitary from the QR decomposition of a Ginibre matrix with the
/// phases of R's diagonal divided out.
inline Matrix random_unitary(std::size_t d, Rng &rng) {
    auto n = static_cast<Eigen::Index>(d);
    Matrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            g(i, j) = rng.complex_normal();
        }
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex diag = r(j, j);
        double mag = std::abs(diag);
        q.col(j) *= mag > 0.0 ? diag / mag : Complex(1.0);
    }
    return q;
}

/// U_1 (x) ... (x) U_n with independent Haar factors.
inline Matrix random_local_unitary(const PartyDims &dims, std::uint64_t seed) {
    Rng rng(seed);
    Matrix u = Matrix::Identity(1, 1);
    for (std::size_t d : dims.values()) {
        u = kron(u, random_unitary(d, rng));
    }
    return u;
}

}  // namespace mwfisher
