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

#include <vector>

#include "mwfisher/state.hpp"

namespace mwfisher {

/// Result of a linear-entropy-sum measure. `value` is unnormalized; it equals
/// constant_K + lim eps J for the matching depolarizing channel.
struct MeasureResult {
    double value = 0.0;
    std::vector<double> terms;
    double constant_K = 0.0;
    std::vector<PartySubset> subsets;
};

/// Scale that maps the qubit sum of single-party linear entropies onto the
/// conventional Meyer-Wallach Q in [0, 1].
inline double meyer_wallach_normalization(std::size_t n_parties) { return 2.0 / static_cast<double>(n_parties); }

inline std::vector<PartySubset> single_party_subsets(std::size_t n_parties) {
    std::vector<PartySubset> out;
    for (std::size_t j = 0; j < n_parties; ++j) {
        out.push_back(PartySubset::single(j));
    }
    return out;
}

/// Every nonempty proper subset, in increasing bitmask order (bit j = party j).
inline std::vector<PartySubset> all_proper_subsets(std::size_t n_parties) {
    if (n_parties >= 8 * sizeof(unsigned long long) - 1) {
        throw InvariantError(Invariant::dimension, "too many parties to enumerate subsets");
    }
    std::vector<PartySubset> out;
    const unsigned long long full = (1ULL << n_parties) - 1;
    for (unsigned long long mask = 1; mask < full; ++mask) {
        std::vector<std::size_t> parties;
        for (std::size_t j = 0; j < n_parties; ++j) {
            if (mask & (1ULL << j)) {
                parties.push_back(j);
            }
        }
        out.emplace_back(std::move(parties));
    }
    return out;
}

/// 1 - tr[rho_alpha^2] for the reduced state on alpha.
inline double linear_entropy(const DensityState &rho, const PartySubset &alpha) {
    alpha.validate(rho.dims().size());
    return 1.0 - purity(marginal(rho, alpha));
}

inline double linear_entropy(const PureState &psi, const PartySubset &alpha) {
    alpha.validate(psi.dims().size());
    return 1.0 - purity(marginal_matrix(psi, alpha));
}

/// Sum of linear entropies over `subsets`. The additive constant is
/// K = sum_alpha (1 - d_alpha), which cancels tr[rho rho'] for product states.
inline MeasureResult partition_measure(const PureState &psi, const std::vector<PartySubset> &subsets) {
    const std::size_t n = psi.dims().size();
    MeasureResult out;
    for (const auto &alpha : subsets) {
        alpha.validate(n);
        if (!alpha.is_proper(n)) {
            throw InvariantError(Invariant::subset, "partition measure needs nonempty proper subsets, got " +
                                                        alpha.to_string());
        }
    }
    out.subsets = subsets;
    for (const auto &alpha : subsets) {
        double term = linear_entropy(psi, alpha);
        out.terms.push_back(term);
        out.value += term;
        out.constant_K += 1.0 - static_cast<double>(psi.dims().subset_dim(alpha));
    }
    return out;
}

inline MeasureResult partition_measure(const PureState &psi) {
    return partition_measure(psi, all_proper_subsets(psi.dims().size()));
}

/// Sum of single-party linear entropies (unnormalized Meyer-Wallach).
inline MeasureResult meyer_wallach(const PureState &psi) {
    return partition_measure(psi, single_party_subsets(psi.dims().size()));
}

/// Two copies of a state laid out with the copies interleaved per party:
/// party dims [d_0, d_0, d_1, d_1, ...], copy A before copy B for each party.
inline Vector two_copy_vector(const PureState &psi) {
    const std::vector<std::size_t> &dims = psi.dims().values();
    const std::size_t n = dims.size();
    const std::size_t d = psi.dim();
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d * d));
    std::vector<std::size_t> a_digits(n);
    std::vector<std::size_t> b_digits(n);
    for (std::size_t a = 0; a < d; ++a) {
        std::size_t rem = a;
        for (std::size_t q = n; q-- > 0;) {
            a_digits[q] = rem % dims[q];
            rem /= dims[q];
        }
        for (std::size_t b = 0; b < d; ++b) {
            rem = b;
            for (std::size_t q = n; q-- > 0;) {
                b_digits[q] = rem % dims[q];
                rem /= dims[q];
            }
            std::size_t index = 0;
            for (std::size_t q = 0; q < n; ++q) {
                index = (index * dims[q] + a_digits[q]) * dims[q] + b_digits[q];
            }
            out(static_cast<Eigen::Index>(index)) = psi.amplitudes()(a) * psi.amplitudes()(b);
        }
    }
    return out;
}

/// SWAP of the two copies of `party` applied to a two-copy vector in the
/// interleaved layout.
inline Vector apply_copy_swap(const Vector &two_copy, const PartyDims &dims, std::size_t party) {
    const std::size_t n = dims.size();
    std::vector<std::size_t> doubled;
    for (std::size_t q = 0; q < n; ++q) {
        doubled.push_back(dims[q]);
        doubled.push_back(dims[q]);
    }
    // Stride of the copy-A and copy-B digit of `party`.
    std::size_t stride_b = 1;
    for (std::size_t q = doubled.size(); q-- > 2 * party + 2;) {
        stride_b *= doubled[q];
    }
    const std::size_t local = dims[party];
    const std::size_t stride_a = stride_b * local;
    Vector out(two_copy.size());
    for (Eigen::Index i = 0; i < two_copy.size(); ++i) {
        auto idx = static_cast<std::size_t>(i);
        std::size_t a = (idx / stride_a) % local;
        std::size_t b = (idx / stride_b) % local;
        std::size_t swapped = idx - a * stride_a - b * stride_b + b * stride_a + a * stride_b;
        out(static_cast<Eigen::Index>(swapped)) = two_copy(i);
    }
    return out;
}

/// Sum over parties of 2 <Psi|<Psi| P^-_j |Psi>|Psi>, with P^-_j = (1 - SWAP_j)/2
/// the antisymmetric projector on the two copies of party j. `terms` holds
/// 2 <P^-_j> per party.
inline MeasureResult two_copy_expectation(const PureState &psi) {
    Vector doubled = two_copy_vector(psi);
    MeasureResult out;
    out.subsets = single_party_subsets(psi.dims().size());
    for (std::size_t j = 0; j < psi.dims().size(); ++j) {
        Vector antisym = (doubled - apply_copy_swap(doubled, psi.dims(), j)) * 0.5;
        double expectation = doubled.dot(antisym).real();
        out.terms.push_back(2.0 * expectation);
        out.value += 2.0 * expectation;
        out.constant_K += 1.0 - static_cast<double>(psi.dims()[j]);
    }
    return out;
}

/// Pure-state measure functor over a fixed subset family, usable as the
/// argument of the convex-roof routines. Besides the value on normalized
/// states it supplies the ensemble term phi(w) = |w|^2 E(w/|w|) and its
/// gradient with respect to conj(w) for unnormalized w.
class LinearEntropySum {
   public:
    explicit LinearEntropySum(std::vector<PartySubset> subsets) : subsets_(std::move(subsets)) {}

    static LinearEntropySum singles(std::size_t n_parties) {
        return LinearEntropySum(single_party_subsets(n_parties));
    }
    static LinearEntropySum all_proper(std::size_t n_parties) {
        return LinearEntropySum(all_proper_subsets(n_parties));
    }

    const std::vector<PartySubset> &subsets() const { return subsets_; }

    double operator()(const PureState &psi) const { return partition_measure(psi, subsets_).value; }

    /// phi(w) = sum_alpha (s - P_alpha / s), s = |w|^2, P_alpha = tr[M_alpha^2],
    /// M_alpha = tr_{not alpha} w w^dagger. Gradient:
    /// sum_alpha [w (1 + P_alpha/s^2) - 2 (M_alpha (x) 1) w / s].
    double weighted_value_and_gradient(const Vector &w, const PartyDims &dims, Vector &gradient) const {
        const double s = w.squaredNorm();
        gradient = Vector::Zero(w.size());
        if (s <= 0.0) {
            return 0.0;
        }
        const std::size_t n = dims.size();
        Matrix outer = w * w.adjoint();
        double value = 0.0;
        for (const auto &alpha : subsets_) {
            PartySubset rest = alpha.complement(n);
            Matrix m = partial_trace(outer, dims, rest);
            double p = m.squaredNorm();
            value += s - p / s;
            gradient += w * (1.0 + p / (s * s)) - (2.0 / s) * (embed_identity(m, dims, rest) * w);
        }
        return value;
    }

   private:
    std::vector<PartySubset> subsets_;
};

}  // namespace mwfisher
