"""Complementary-delivery rate-distortion toolkit."""

from ._cdrate import (
    CDSolution,
    InputError,
    JointSource,
    NonConvergenceError,
    TooLargeError,
    cd_rate,
    conditional_entropy,
    conditional_mutual_information,
    conditional_rd,
    gcd_rate,
    lossless_cd_rate,
    simulate,
    wyner_ziv,
)

__all__ = [
    "CDSolution",
    "InputError",
    "JointSource",
    "NonConvergenceError",
    "TooLargeError",
    "cd_rate",
    "conditional_entropy",
    "conditional_mutual_information",
    "conditional_rd",
    "gcd_rate",
    "lossless_cd_rate",
    "simulate",
    "wyner_ziv",
]
