"""
A tour of the intuitionistic fuzzy set toolbox
==============================================

An ordinary fuzzy grade says how much something is the case. An
intuitionistic pair <mu, gamma> also says how much it is NOT the case,
and whatever is left over, 1 - mu - gamma, is hesitancy: the part the
evidence simply does not cover.
"""
import numpy as np

from ifcm import (
    IFValue,
    IntuitionisticFuzzySet,
    Gaussian,
    Triangular,
    hesitancy,
    icoa,
    ifs_intersection,
    ifs_union,
    ifs_validate,
    linguistic_partition,
)

# ---------------------------------------------------------------- values
v = IFValue(0.6, 0.3)
print(f"pair <{v.mu}, {v.gamma}>  hesitancy = {hesitancy(v):.2f}")

# the constructor refuses impossible evidence
try:
    IFValue(0.8, 0.4)
except ValueError as exc:
    print(f"rejected: {exc}")

# ------------------------------------------------------------------ sets
# a full set pairs a membership curve with a non-membership curve over
# the shared domain [0, 1]
high = IntuitionisticFuzzySet(Triangular(0.45, 0.8, 1.0),
                              Triangular(0.0, 0.2, 0.4), label="High")
low = IntuitionisticFuzzySet(Triangular(0.0, 0.2, 0.65),
                             Triangular(0.6, 0.8, 1.0), label="Low")
print(f"\n'{high.label}' at z=0.75: mu={high.mu_fn(0.75):.3f} "
      f"gamma={high.gamma_fn(0.75):.3f}")
print(f"valid on a dense grid: {ifs_validate(high)}")

# union takes the most optimistic reading, intersection the most cautious
either = ifs_union([low, high])
both = ifs_intersection(low, high)
for z in (0.2, 0.5, 0.8):
    print(f"  z={z}: union mu={either.mu_fn(z):.3f}  "
          f"intersection mu={both.mu_fn(z):.3f}")

# gaussian tails never reach zero, so full-height bumps always overshoot
# somewhere: at the membership apex mu is 1 and gamma is still positive
bump = IntuitionisticFuzzySet(Gaussian(0.7, 0.1), Gaussian(0.1, 0.15))
x = 0.7
print(f"\nraw gaussian pair valid: {ifs_validate(bump)} "
      f"(at x={x}: {bump.mu_fn(x) + bump.gamma_fn(x):.6f} > 1)")

# -------------------------------------------------------- defuzzification
# icoa collapses a set back to one number over concrete sample points,
# weighting each sample by mu - gamma and ignoring samples where doubt
# wins outright
samples = np.array([0.55, 0.62, 0.71, 0.78, 0.86, 0.93])
print(f"\nicoa of 'High' over {samples.tolist()}: "
      f"{icoa(high, samples):.4f}")

# --------------------------------------------------------- linguistics
# a partition turns raw grades into words; this is what the classifier
# uses to phrase its explanations
part = linguistic_partition(5)
for x in (0.05, 0.3, 0.5, 0.7, 0.95):
    print(f"  {x:.2f} reads as {part.term(x)!r}")
