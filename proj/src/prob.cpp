#include "cdr/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace cdr {

namespace {

constexpr double kNormalizationTol = 1e-9;
constexpr double kMassTol = 1e-15;

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// Flat index of the projection of `cell` onto the coordinate subset.
std::size_t project(const std::vector<int>& letters, const std::vector<int>& coords,
                    const std::vector<int>& sizes) {
    std::size_t idx = 0;
    for (int c : coords) {
        idx = idx * static_cast<std::size_t>(sizes[c]) + static_cast<std::size_t>(letters[c]);
    }
    return idx;
}

std::size_t subset_cells(const std::vector<int>& coords, const std::vector<int>& sizes) {
    std::size_t n = 1;
    for (int c : coords) n *= static_cast<std::size_t>(sizes[c]);
    return n;
}

void check_coords(const JointSource& src, const std::vector<int>& coords) {
    for (int c : coords) {
        if (c < 0 || c >= src.coords()) throw ShapeMismatchError("coordinate index out of range");
    }
}

void check_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
    std::unordered_set<int> seen(a.begin(), a.end());
    if (seen.size() != a.size()) throw CoordOverlapError("repeated coordinate in set");
    for (int c : b) {
        if (!seen.insert(c).second) throw CoordOverlapError("coordinate sets overlap");
    }
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Entropy of the marginal on `coords`, in nats.
double marginal_entropy(const JointSource& src, const std::vector<int>& coords) {
    std::vector<double> marg(subset_cells(coords, src.sizes), 0.0);
    std::vector<int> letters(src.sizes.size(), 0);
    for (std::size_t cell = 0; cell < src.cells(); ++cell) {
        marg[project(letters, coords, src.sizes)] += src.pmf[cell];
        for (int c = src.coords() - 1; c >= 0; --c) {
            if (++letters[c] < src.sizes[c]) break;
            letters[c] = 0;
        }
    }
    double h = 0.0;
    for (double p : marg) h -= xlogx(p);
    return h;
}

}  // namespace

std::vector<std::size_t> JointSource::strides() const {
    std::vector<std::size_t> s(sizes.size(), 1);
    for (int c = coords() - 2; c >= 0; --c) {
        s[c] = s[c + 1] * static_cast<std::size_t>(sizes[c + 1]);
    }
    return s;
}

std::vector<int> JointSource::unravel(std::size_t cell) const {
    std::vector<int> letters(sizes.size());
    for (int c = coords() - 1; c >= 0; --c) {
        letters[c] = static_cast<int>(cell % static_cast<std::size_t>(sizes[c]));
        cell /= static_cast<std::size_t>(sizes[c]);
    }
    return letters;
}

JointSource validate_joint(std::vector<double> pmf, std::vector<int> sizes) {
    if (sizes.empty()) throw ShapeMismatchError("no coordinates");
    std::size_t cells = 1;
    for (int s : sizes) {
        if (s < 1) throw ShapeMismatchError("alphabet size must be >= 1");
        cells *= static_cast<std::size_t>(s);
    }
    if (pmf.size() != cells) throw ShapeMismatchError("pmf length does not match alphabet product");
    double sum = 0.0;
    for (double p : pmf) {
        if (p < -kMassTol) throw NegativeMassError("negative probability mass");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kNormalizationTol) throw NotNormalizedError("pmf is not normalized (does not sum to 1)");
    for (double& p : pmf) p = std::max(p, 0.0);
    return JointSource{std::move(sizes), std::move(pmf)};
}

DistortionMeasure make_distortion(std::vector<std::vector<double>> matrix) {
    if (matrix.empty() || matrix[0].empty()) throw ShapeMismatchError("empty distortion matrix");
    const std::size_t cols = matrix[0].size();
    double dmax = 0.0;
    for (const auto& row : matrix) {
        if (row.size() != cols) throw ShapeMismatchError("ragged distortion matrix");
        for (double d : row) {
            if (!(d >= 0.0) || !std::isfinite(d)) throw ShapeMismatchError("distortion entries must be finite and >= 0");
            dmax = std::max(dmax, d);
        }
    }
    return DistortionMeasure{std::move(matrix), dmax};
}

DistortionMeasure hamming_distortion(int size) {
    std::vector<std::vector<double>> m(size, std::vector<double>(size, 1.0));
    for (int i = 0; i < size; ++i) m[i][i] = 0.0;
    return make_distortion(std::move(m));
}

double conditional_entropy(const JointSource& src, const std::vector<int>& target,
                           const std::vector<int>& given) {
    check_coords(src, target);
    check_coords(src, given);
    check_disjoint(target, given);
    if (target.empty()) return 0.0;
    // H(T|G) = H(T,G) - H(G)
    return marginal_entropy(src, concat(target, given)) - marginal_entropy(src, given);
}

double conditional_mutual_information(const JointSource& src, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c) {
    check_coords(src, a);
    check_coords(src, b);
    check_coords(src, c);
    check_disjoint(a, b);
    check_disjoint(a, c);
    check_disjoint(b, c);
    const double mi = conditional_entropy(src, a, c) - conditional_entropy(src, a, concat(b, c));
    return std::max(mi, 0.0);
}

double expected_distortion(const JointSource& src, const DecoderRule& rule,
                           const DistortionMeasure& dm) {
    if (src.coords() != 3) throw ShapeMismatchError("expected a (U, S, side) joint");
    const int u_size = src.sizes[0];
    const int s_size = src.sizes[1];
    const int side_size = src.sizes[2];
    if (rule.u_size != u_size || rule.side_size != side_size)
        throw ShapeMismatchError("decoder rule does not match (U, side) alphabets");
    if (dm.source_size() != s_size || dm.recon_size() != rule.recon_size)
        throw ShapeMismatchError("distortion matrix does not match (S, reconstruction) alphabets");
    double total = 0.0;
    std::size_t cell = 0;
    for (int u = 0; u < u_size; ++u) {
        for (int s = 0; s < s_size; ++s) {
            for (int side = 0; side < side_size; ++side, ++cell) {
                total += src.pmf[cell] * dm.matrix[s][rule(u, side)];
            }
        }
    }
    return total;
}

}  // namespace cdr
