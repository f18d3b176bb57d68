#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cdr/prob.hpp"

using namespace cdr;

namespace {

JointSource dsbs(double p) {
    return validate_joint({0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)}, {2, 2});
}

JointSource random_joint(const std::vector<int>& sizes, std::mt19937_64& gen) {
    std::size_t cells = 1;
    for (int s : sizes) cells *= s;
    std::vector<double> pmf(cells);
    double sum = 0.0;
    for (double& p : pmf) {
        p = -std::log(std::max(static_cast<double>(gen() >> 11) * 0x1.0p-53, 1e-300));
        sum += p;
    }
    for (double& p : pmf) p /= sum;
    return validate_joint(pmf, sizes);
}

// Independent oracle: H(T|G) by direct summation over the raw pmf, without
// going through the library's marginalization path.
double entropy_oracle_dsbs_h_x_given_y(double p) {
    // P(y) = 1/2 each; P(x|y) in {1-p, p}.
    const double terms[2] = {1 - p, p};
    double h = 0.0;
    for (double t : terms) {
        if (t > 0) h -= t * std::log(t);
    }
    return h;  // symmetric, so H(X|Y) = h(p)
}

}  // namespace

TEST_CASE("validate_joint accepts the uniform and DSBS pmfs") {
    const auto u = validate_joint({0.25, 0.25, 0.25, 0.25}, {2, 2});
    CHECK(u.cells() == 4);
    const auto d = validate_joint({0.45, 0.05, 0.05, 0.45}, {2, 2});
    CHECK(d.pmf[0] == doctest::Approx(0.45));
}

TEST_CASE("validate_joint rejects bad input") {
    CHECK_THROWS_AS(validate_joint({0.5, 0.6}, {2}), NotNormalizedError);
    CHECK_THROWS_AS(validate_joint({1.2, -0.2}, {2}), NegativeMassError);
    CHECK_THROWS_AS(validate_joint({0.5, 0.5}, {2, 2}), ShapeMismatchError);
    CHECK_THROWS_AS(validate_joint({1.0}, {0}), ShapeMismatchError);
}

TEST_CASE("conditional entropy corners") {
    const auto indep = validate_joint({0.25, 0.25, 0.25, 0.25}, {2, 2});
    CHECK(conditional_entropy(indep, {0}, {1}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const auto copula = validate_joint({0.5, 0.0, 0.0, 0.5}, {2, 2});
    CHECK(conditional_entropy(copula, {0}, {1}) == doctest::Approx(0.0));
    CHECK(conditional_entropy(dsbs(0.1), {0}, {1}) ==
          doctest::Approx(entropy_oracle_dsbs_h_x_given_y(0.1)).epsilon(1e-12));
    // Frozen value from the summation oracle.
    CHECK(conditional_entropy(dsbs(0.1), {0}, {1}) == doctest::Approx(0.325083).epsilon(1e-5));
}

TEST_CASE("conditional entropy rejects overlapping coordinate sets") {
    CHECK_THROWS_AS(conditional_entropy(dsbs(0.1), {0}, {0}), CoordOverlapError);
    CHECK_THROWS_AS(conditional_entropy(dsbs(0.1), {0, 0}, {}), CoordOverlapError);
}

TEST_CASE("conditional mutual information identities") {
    std::mt19937_64 gen(7);
    // B independent of (A, C).
    auto ac = random_joint({2, 2}, gen);
    std::vector<double> pmf(8);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) pmf[(a * 2 + b) * 2 + c] = ac.pmf[a * 2 + c] * 0.5;
        }
    }
    const auto joint = validate_joint(pmf, {2, 2, 2});
    CHECK(conditional_mutual_information(joint, {0}, {1}, {2}) == doctest::Approx(0.0).epsilon(1e-12));

    // B = A exactly: I(A;B|C) = H(A|C).
    std::vector<double> pmf2(8, 0.0);
    auto acj = random_joint({2, 2}, gen);
    for (int a = 0; a < 2; ++a) {
        for (int c = 0; c < 2; ++c) pmf2[(a * 2 + a) * 2 + c] = acj.pmf[a * 2 + c];
    }
    const auto joint2 = validate_joint(pmf2, {2, 2, 2});
    CHECK(conditional_mutual_information(joint2, {0}, {1}, {2}) ==
          doctest::Approx(conditional_entropy(joint2, {0}, {2})).epsilon(1e-12));

    // Generic: I(A;B|C) = H(A|C) - H(A|BC).
    const auto j3 = random_joint({2, 2, 2}, gen);
    const double expect =
        conditional_entropy(j3, {0}, {2}) - conditional_entropy(j3, {0}, {1, 2});
    CHECK(conditional_mutual_information(j3, {0}, {1}, {2}) ==
          doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("chain rule holds on random joints") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto j = random_joint({4, 4, 4}, gen);
        const double lhs = conditional_mutual_information(j, {0, 1}, {2}, {});
        const double rhs = conditional_mutual_information(j, {1}, {2}, {}) +
                           conditional_mutual_information(j, {0}, {2}, {1});
        CHECK(lhs == doctest::Approx(rhs).epsilon(0).scale(1).epsilon(1e-9));
        CHECK(conditional_entropy(j, {0}, {1}) <= std::log(4.0) + 1e-12);
        CHECK(conditional_entropy(j, {0}, {1}) >= 0.0);
    }
}

TEST_CASE("conditional entropy is invariant under consistent relabeling") {
    std::mt19937_64 gen(13);
    const auto j = random_joint({3, 3}, gen);
    // Permute both alphabets with the cycle 0->1->2->0.
    auto perm = [](int v) { return (v + 1) % 3; };
    std::vector<double> pmf(9, 0.0);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) pmf[perm(a) * 3 + perm(b)] = j.pmf[a * 3 + b];
    }
    const auto jp = validate_joint(pmf, {3, 3});
    CHECK(conditional_entropy(jp, {0}, {1}) ==
          doctest::Approx(conditional_entropy(j, {0}, {1})).epsilon(1e-12));
}

TEST_CASE("expected distortion examples") {
    const auto hamming = hamming_distortion(2);
    // Identity rule on the X=Y copula with a trivial U.
    {
        const auto joint = validate_joint({0.5, 0.0, 0.0, 0.5}, {1, 2, 2});
        const DecoderRule identity{1, 2, 2, {0, 1}};
        CHECK(expected_distortion(joint, identity, hamming) == doctest::Approx(0.0));
        const DecoderRule constant{1, 2, 2, {0, 0}};
        // Uniform binary marginal, constant reconstruction.
        const auto unif = validate_joint({0.25, 0.25, 0.25, 0.25}, {1, 2, 2});
        CHECK(expected_distortion(unif, constant, hamming) == doctest::Approx(0.5));
    }
    {
        // DSBS(0.1) with rule phi(u, y) = y: distortion equals the crossover.
        const auto joint = validate_joint({0.45, 0.05, 0.05, 0.45}, {1, 2, 2});
        const DecoderRule copy_side{1, 2, 2, {0, 1}};
        CHECK(expected_distortion(joint, copy_side, hamming) == doctest::Approx(0.1));
    }
}

TEST_CASE("expected distortion is linear in the pmf") {
    std::mt19937_64 gen(17);
    const auto a = random_joint({2, 2, 2}, gen);
    const auto b = random_joint({2, 2, 2}, gen);
    const double lam = 0.3;
    std::vector<double> mixed(a.pmf.size());
    for (std::size_t i = 0; i < mixed.size(); ++i) {
        mixed[i] = lam * a.pmf[i] + (1 - lam) * b.pmf[i];
    }
    const auto m = validate_joint(mixed, {2, 2, 2});
    const DecoderRule rule{2, 2, 2, {0, 1, 1, 0}};
    const auto hamming = hamming_distortion(2);
    const double expect = lam * expected_distortion(a, rule, hamming) +
                          (1 - lam) * expected_distortion(b, rule, hamming);
    CHECK(expected_distortion(m, rule, hamming) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("expected distortion shape checks") {
    const auto joint = validate_joint({0.45, 0.05, 0.05, 0.45}, {1, 2, 2});
    const DecoderRule bad{2, 2, 2, {0, 1, 1, 0}};
    CHECK_THROWS_AS(expected_distortion(joint, bad, hamming_distortion(2)), ShapeMismatchError);
    CHECK_THROWS_AS(expected_distortion(joint, DecoderRule{1, 2, 3, {0, 1}}, hamming_distortion(2)),
                    ShapeMismatchError);
}
