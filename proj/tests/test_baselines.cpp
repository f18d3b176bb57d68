#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "cdr/baselines.hpp"

using namespace cdr;

namespace {

JointSource dsbs(double p) {
    return validate_joint({0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)}, {2, 2});
}

// Grid oracle for R_C(X|Y,D) on binary instances: exhaustive enumeration of
// P(Xhat|X,Y) with every row on the denominator-q simplex grid, evaluated as
// the lower convex envelope of the achievable (distortion, rate) cloud at the
// budget. The envelope removes the O(1/q) boundary error a raw feasible
// minimum would carry.
double cond_rd_grid_oracle(const JointSource& src, double budget, int q) {
    std::vector<std::pair<double, double>> pts;
    std::vector<int> num(4, 0);
    const auto& pmf = src.pmf;
    for (num[0] = 0; num[0] <= q; ++num[0])
    for (num[1] = 0; num[1] <= q; ++num[1])
    for (num[2] = 0; num[2] <= q; ++num[2])
    for (num[3] = 0; num[3] <= q; ++num[3]) {
        // Row index x*2+y, P(Xhat=1 | x, y) = num/q.
        double dist = 0.0;
        std::vector<double> joint(8, 0.0);  // (x, y, xhat)
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                const double p1 = static_cast<double>(num[x * 2 + y]) / q;
                joint[(x * 2 + y) * 2 + 1] = pmf[x * 2 + y] * p1;
                joint[(x * 2 + y) * 2 + 0] = pmf[x * 2 + y] * (1 - p1);
                dist += pmf[x * 2 + y] * (x == 1 ? 1 - p1 : p1);
            }
        }
        const auto j = validate_joint(joint, {2, 2, 2});
        pts.emplace_back(dist, conditional_mutual_information(j, {0}, {2}, {1}));
    }
    std::sort(pts.begin(), pts.end());
    // One point per distinct distortion (the cheapest), then the monotone-chain
    // lower hull over (dist, rate).
    std::vector<std::pair<double, double>> dedup;
    for (const auto& p : pts) {
        if (!dedup.empty() && p.first - dedup.back().first < 1e-12) continue;
        dedup.push_back(p);
    }
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : dedup) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            if ((b.first - a.first) * (p.second - a.second) -
                    (p.first - a.first) * (b.second - a.second) <=
                0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    // The rate curve is nonincreasing in distortion; evaluate the hull at the
    // budget, clamping to the ends.
    if (budget <= hull.front().first) return hull.front().second;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (budget <= hull[i].first) {
            const double t = (budget - hull[i - 1].first) / (hull[i].first - hull[i - 1].first);
            return hull[i - 1].second + t * (hull[i].second - hull[i - 1].second);
        }
    }
    return hull.back().second;
}

}  // namespace

TEST_CASE("lossless rate corners") {
    CHECK(lossless_cd_rate(validate_joint({0.5, 0.0, 0.0, 0.5}, {2, 2})) == doctest::Approx(0.0));
    CHECK(lossless_cd_rate(validate_joint({0.25, 0.25, 0.25, 0.25}, {2, 2})) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(lossless_cd_rate(dsbs(0.1)) == doctest::Approx(0.325083).epsilon(1e-5));
}

TEST_CASE("conditional RD corners and monotonicity") {
    const auto src = dsbs(0.1);
    const auto dm = hamming_distortion(2);
    const double h = conditional_entropy(src, {0}, {1});
    CHECK(conditional_rd(src, dm, 0.0, 0) == doctest::Approx(h).epsilon(0).scale(1).epsilon(1e-6));
    CHECK(conditional_rd(src, dm, 1.0, 0) == doctest::Approx(0.0));
    // Copying the side attains distortion p = 0.1, so any larger budget is free.
    CHECK(conditional_rd(src, dm, 0.2, 0) == doctest::Approx(0.0));

    double prev = h + 1;
    for (double d : {0.0, 0.02, 0.05, 0.08}) {
        const double r = conditional_rd(src, dm, d, 0);
        CHECK(r <= prev + 1e-9);
        CHECK(r >= 0.0);
        CHECK(r <= std::log(2.0) + 1e-9);
        prev = r;
    }
    CHECK_THROWS_AS(conditional_rd(src, dm, -0.1, 0), BudgetNegativeError);
}

TEST_CASE("conditional RD agrees with the analytic curve and the grid oracle") {
    const auto src = dsbs(0.1);
    const auto dm = hamming_distortion(2);
    const auto h = [](double d) { return -d * std::log(d) - (1 - d) * std::log(1 - d); };
    for (double d : {0.03, 0.05, 0.07}) {
        const double value = conditional_rd(src, dm, d, 0);
        // Both conditionals are Bernoulli(0.1), so the curve is h(p) - h(D).
        CHECK(value == doctest::Approx(h(0.1) - h(d)).epsilon(0).scale(1).epsilon(1e-7));
        // The grid hull is achievable, hence an upper bound; how tight depends
        // on which reverse channels the grid happens to contain.
        const double oracle = cond_rd_grid_oracle(src, d, 16);
        CHECK(value <= oracle + 1e-9);
        CHECK(oracle - value <= 5e-3);
    }
}

TEST_CASE("Wyner-Ziv corners and rate-loss ordering") {
    const auto src = dsbs(0.1);
    const auto dm = hamming_distortion(2);
    const double h = conditional_entropy(src, {0}, {1});
    CHECK(wyner_ziv(src, dm, 0.0, 0) == doctest::Approx(h).epsilon(0).scale(1).epsilon(2e-3));
    CHECK(wyner_ziv(src, dm, 1.0, 0) == doctest::Approx(0.0));
    CHECK(wyner_ziv(src, dm, 0.05, 0) >= conditional_rd(src, dm, 0.05, 0) - 1e-3);

    double prev = h + 1;
    for (double d : {0.0, 0.03, 0.06}) {
        const double r = wyner_ziv(src, dm, d, 0);
        CHECK(r <= prev + 1e-6);
        CHECK(r >= 0.0);
        prev = r;
    }
    CHECK_THROWS_AS(wyner_ziv(src, dm, -0.5, 0), BudgetNegativeError);
}

TEST_CASE("sandwich report at the corners") {
    const auto src = dsbs(0.1);
    const std::pair<DistortionMeasure, DistortionMeasure> dms{hamming_distortion(2),
                                                              hamming_distortion(2)};
    OptimizerOptions opts;
    opts.restarts = 8;

    {
        const auto rep = sandwich_check(src, dms, DistortionBudget{{1.0, 1.0}}, opts);
        CHECK(rep.lower == doctest::Approx(0.0));
        CHECK(rep.cd_rate == doctest::Approx(0.0));
        CHECK(rep.upper == doctest::Approx(0.0));
        CHECK_FALSE(rep.violated);
    }
    {
        const auto rep = sandwich_check(src, dms, DistortionBudget{{0.0, 0.0}}, opts);
        const double h = lossless_cd_rate(src);
        CHECK(rep.lower == doctest::Approx(h).epsilon(0).scale(1).epsilon(2e-3));
        CHECK(rep.cd_rate == doctest::Approx(h).epsilon(0).scale(1).epsilon(3e-3));
        CHECK(rep.upper == doctest::Approx(h).epsilon(0).scale(1).epsilon(3e-3));
        CHECK_FALSE(rep.violated);
    }
    {
        const auto rep = sandwich_check(src, dms, DistortionBudget{{0.05, 0.05}}, opts);
        CHECK(rep.slack_lower >= -2e-3);
        CHECK(rep.slack_upper >= -2e-3);
        CHECK_FALSE(rep.violated);
    }
}
