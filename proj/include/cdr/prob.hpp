#pragma once

#include <cstddef>
#include <vector>

#include "cdr/errors.hpp"

namespace cdr {

// Joint pmf over one or more finite source coordinates, stored dense and
// row-major (last coordinate varies fastest). All information quantities
// are in nats.
struct JointSource {
    std::vector<int> sizes;
    std::vector<double> pmf;

    std::size_t cells() const { return pmf.size(); }
    int coords() const { return static_cast<int>(sizes.size()); }

    // Mixed-radix strides of the row-major layout.
    std::vector<std::size_t> strides() const;

    // Decompose a flat cell index into per-coordinate letters.
    std::vector<int> unravel(std::size_t cell) const;
};

// Validates shape, nonnegativity (>= -1e-15 entrywise) and normalization
// (|sum - 1| <= 1e-9). No silent renormalization.
JointSource validate_joint(std::vector<double> pmf, std::vector<int> sizes);

// Per-source single-letter distortion matrix, |source| x |reconstruction|.
struct DistortionMeasure {
    std::vector<std::vector<double>> matrix;
    double dmax = 0.0;

    int source_size() const { return static_cast<int>(matrix.size()); }
    int recon_size() const {
        return matrix.empty() ? 0 : static_cast<int>(matrix[0].size());
    }
};

DistortionMeasure make_distortion(std::vector<std::vector<double>> matrix);

// Hamming distortion on a square alphabet.
DistortionMeasure hamming_distortion(int size);

// Deterministic decoder map (u, side letter) -> reconstruction letter.
struct DecoderRule {
    int u_size = 0;
    int side_size = 0;
    int recon_size = 0;
    std::vector<int> table;  // table[u * side_size + s]

    int operator()(int u, int side) const { return table[static_cast<std::size_t>(u) * side_size + side]; }
};

// H(target | given) in nats, 0 log 0 = 0. Coordinate sets must be disjoint.
double conditional_entropy(const JointSource& src, const std::vector<int>& target,
                           const std::vector<int>& given);

// I(a; b | c) = H(a|c) - H(a|bc), clamped to >= 0 on return.
double conditional_mutual_information(const JointSource& src, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c);

// src is a joint over (U, S, side) in that coordinate order; returns
// sum_{u,s,side} P(u,s,side) * dm(s, rule(u, side)).
double expected_distortion(const JointSource& src, const DecoderRule& rule,
                           const DistortionMeasure& dm);

}  // namespace cdr
