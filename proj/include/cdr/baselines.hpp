#pragma once

#include "cdr/cd_rate.hpp"
#include "cdr/prob.hpp"

namespace cdr {

// max{ H(X|Y), H(Y|X) } in nats, the zero-distortion corner of the rate
// function.
double lossless_cd_rate(const JointSource& src);

// Conditional rate-distortion function R_C(target | side, D): min I(X;Xhat|Y)
// subject to the expected distortion budget, both encoder and decoder knowing
// the side coordinate. Computed by per-side-letter alternating minimization
// with a shared Lagrange slope swept over a log grid.
double conditional_rd(const JointSource& src, const DistortionMeasure& dm, double budget,
                      int which);

// Wyner-Ziv rate-distortion function R_WZ(target | side, D): min over P(U|X)
// with |U| = |X|+1 and decoders g : U x side -> reconstruction of
// I(X;U) - I(Y;U). The raw optimizer output is an upper bound; the reported
// value is its lower convex envelope over a 33-point budget grid (time
// sharing is admissible here).
double wyner_ziv(const JointSource& src, const DistortionMeasure& dm, double budget, int which);

struct SandwichReport {
    double lower = 0.0;       // max of the two conditional-RD values
    double cd_rate = 0.0;     // optimized R(X,Y|D_X,D_Y)
    double upper = 0.0;       // max of the two Wyner-Ziv values
    double slack_lower = 0.0;  // cd_rate - lower
    double slack_upper = 0.0;  // upper - cd_rate
    bool violated = false;     // either slack below -2e-3
};

SandwichReport sandwich_check(const JointSource& src,
                              const std::pair<DistortionMeasure, DistortionMeasure>& dms,
                              const DistortionBudget& budgets,
                              const OptimizerOptions& opts = {});

}  // namespace cdr
