"""Intuitionistic fuzzy set algebra.

Membership-function shapes over the similarity domain [0, 1], the
``IFValue`` membership/non-membership pair, set-level union/intersection,
grid validity checking, the intuitionistic center-of-area defuzzifier, and
uniform linguistic partitions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VALIDATION_GRID_N = 1001
VALIDITY_TOL = 1e-12


class InvalidShapeError(ValueError):
    """Malformed membership-function parameters."""


class InvalidValueError(ValueError):
    """IFValue outside the valid region (mu, gamma >= 0, mu + gamma <= 1)."""


class EmptyAggregationError(ValueError):
    """Set aggregation over an empty collection."""


class IndeterminateRelationError(ArithmeticError):
    """No defuzzification sample has membership strictly above non-membership."""


class InvalidResultError(ValueError):
    """A composed set failed the validity grid check (should be unreachable)."""


def _eval_input(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _eval_output(values, scalar):
    return float(values) if scalar else values


class MembershipFunction:
    """Base for all shapes; concrete classes implement `_eval` on arrays."""

    def __call__(self, x):
        arr, scalar = _eval_input(x)
        return _eval_output(self._eval(np.atleast_1d(arr))[0] if scalar
                            else self._eval(arr), scalar)

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def peak(self) -> float:
        """Location used as the function's labeling anchor."""
        raise NotImplementedError


@dataclass(frozen=True)
class Triangular(MembershipFunction):
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (np.isfinite([self.a, self.b, self.c]).all()
                and self.a <= self.b <= self.c):
            raise InvalidShapeError(f"triangular needs a <= b <= c, got "
                                    f"({self.a}, {self.b}, {self.c})")

    def _eval(self, x):
        out = np.zeros_like(x)
        if self.b > self.a:
            m = (x > self.a) & (x < self.b)
            out[m] = (x[m] - self.a) / (self.b - self.a)
        if self.c > self.b:
            m = (x > self.b) & (x < self.c)
            out[m] = (self.c - x[m]) / (self.c - self.b)
        out[x == self.b] = 1.0
        return out

    @property
    def peak(self):
        return self.b


@dataclass(frozen=True)
class Trapezoidal(MembershipFunction):
    a: float
    b: float
    c: float
    d: float
    apex: float | None = None  # labeling anchor override (defaults to plateau midpoint)

    def __post_init__(self):
        if not (np.isfinite([self.a, self.b, self.c, self.d]).all()
                and self.a <= self.b <= self.c <= self.d):
            raise InvalidShapeError(f"trapezoidal needs a <= b <= c <= d, got "
                                    f"({self.a}, {self.b}, {self.c}, {self.d})")
        if self.apex is not None and not self.b <= self.apex <= self.c:
            raise InvalidShapeError("trapezoidal apex must lie on the plateau")

    def _eval(self, x):
        out = np.zeros_like(x)
        if self.b > self.a:
            m = (x > self.a) & (x < self.b)
            out[m] = (x[m] - self.a) / (self.b - self.a)
        if self.d > self.c:
            m = (x > self.c) & (x < self.d)
            out[m] = (self.d - x[m]) / (self.d - self.c)
        out[(x >= self.b) & (x <= self.c)] = 1.0
        return out

    @property
    def peak(self):
        return self.apex if self.apex is not None else 0.5 * (self.b + self.c)


@dataclass(frozen=True)
class Gaussian(MembershipFunction):
    center: float
    sigma: float

    def __post_init__(self):
        if not (np.isfinite([self.center, self.sigma]).all() and self.sigma > 0):
            raise InvalidShapeError(f"gaussian needs sigma > 0, got {self.sigma}")

    def _eval(self, x):
        return np.exp(-((x - self.center) ** 2) / (2.0 * self.sigma ** 2))

    @property
    def peak(self):
        return self.center


@dataclass(frozen=True)
class PointwiseMax(MembershipFunction):
    terms: tuple[MembershipFunction, ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidShapeError("pointwise max of nothing")

    def _eval(self, x):
        out = self.terms[0]._eval(x)
        for t in self.terms[1:]:
            out = np.maximum(out, t._eval(x))
        return out

    @property
    def peak(self):
        grid = np.linspace(0.0, 1.0, VALIDATION_GRID_N)
        return float(grid[int(np.argmax(self._eval(grid)))])


@dataclass(frozen=True)
class PointwiseMin(MembershipFunction):
    terms: tuple[MembershipFunction, ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidShapeError("pointwise min of nothing")

    def _eval(self, x):
        out = self.terms[0]._eval(x)
        for t in self.terms[1:]:
            out = np.minimum(out, t._eval(x))
        return out

    @property
    def peak(self):
        grid = np.linspace(0.0, 1.0, VALIDATION_GRID_N)
        return float(grid[int(np.argmax(self._eval(grid)))])


@dataclass(frozen=True)
class Scaled(MembershipFunction):
    """Amplitude-scaled wrapper, used by the pairing fallback."""
    term: MembershipFunction
    factor: float

    def __post_init__(self):
        if not 0.0 < self.factor <= 1.0:
            raise InvalidShapeError(f"scale factor must be in (0, 1], got {self.factor}")

    def _eval(self, x):
        return self.factor * self.term._eval(x)

    @property
    def peak(self):
        return self.term.peak


def mf_eval(mf: MembershipFunction, x):
    """Evaluate a membership function; scalar in, scalar out."""
    return mf(x)


@dataclass(frozen=True)
class IFValue:
    """A <membership, non-membership> pair. Strict: mu + gamma <= 1.

    Sums within VALIDITY_TOL above 1 (float residue) are renormalized by
    scaling gamma down; anything larger is rejected.
    """
    mu: float
    gamma: float

    def __post_init__(self):
        mu, gamma = float(self.mu), float(self.gamma)
        if not (np.isfinite(mu) and np.isfinite(gamma)):
            raise InvalidValueError(f"non-finite pair <{mu}, {gamma}>")
        if mu < -VALIDITY_TOL or mu > 1 + VALIDITY_TOL \
                or gamma < -VALIDITY_TOL or gamma > 1 + VALIDITY_TOL:
            raise InvalidValueError(f"degrees outside [0,1]: <{mu}, {gamma}>")
        mu = min(max(mu, 0.0), 1.0)
        gamma = min(max(gamma, 0.0), 1.0)
        if mu + gamma > 1.0:
            if mu + gamma > 1.0 + VALIDITY_TOL:
                raise InvalidValueError(f"mu + gamma > 1: <{mu}, {gamma}>")
            gamma = 1.0 - mu
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "gamma", gamma)

    @property
    def hesitancy(self) -> float:
        return 1.0 - self.mu - self.gamma


def hesitancy(v: IFValue) -> float:
    """Degree of indeterminacy: 1 - mu - gamma."""
    return 1.0 - v.mu - v.gamma


def ifvalue_clamped(mu: float, gamma: float, diagnostics: dict | None = None,
                    key: str = "clamped_values") -> IFValue:
    """Build an IFValue from evidence evaluations, clamping excess.

    Grid-validated sets can still sum slightly above 1 between grid nodes;
    membership is kept and gamma is scaled down to fit. Clamp events are
    counted in `diagnostics[key]` when a dict is supplied.
    """
    m = min(max(float(mu), 0.0), 1.0)
    g = min(max(float(gamma), 0.0), 1.0)
    clamped = (m != mu) or (g != gamma)
    if m + g > 1.0:
        g = 1.0 - m
        clamped = True
    if clamped and diagnostics is not None:
        diagnostics[key] = diagnostics.get(key, 0) + 1
    return IFValue(m, g)


@dataclass(frozen=True)
class IntuitionisticFuzzySet:
    """Paired membership/non-membership functions with a linguistic label."""
    mu_fn: MembershipFunction
    gamma_fn: MembershipFunction
    label: str = ""


def ifs_validate(s: IntuitionisticFuzzySet, grid_n: int = VALIDATION_GRID_N) -> bool:
    """True iff mu(x) + gamma(x) <= 1 + tol on a uniform grid over [0, 1]."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_n)
    total = s.mu_fn(grid) + s.gamma_fn(grid)
    return bool(np.max(total) <= 1.0 + VALIDITY_TOL)


def ifs_union(sets: list[IntuitionisticFuzzySet]) -> IntuitionisticFuzzySet:
    """Pointwise max of memberships, pointwise min of non-memberships."""
    if not sets:
        raise EmptyAggregationError("union of an empty collection")
    if len(sets) == 1:
        return sets[0]
    out = IntuitionisticFuzzySet(
        mu_fn=PointwiseMax(tuple(s.mu_fn for s in sets)),
        gamma_fn=PointwiseMin(tuple(s.gamma_fn for s in sets)),
        label=" | ".join(s.label for s in sets if s.label),
    )
    if not ifs_validate(out):
        raise InvalidResultError("union produced an invalid set")
    return out


def ifs_intersection(s1: IntuitionisticFuzzySet,
                     s2: IntuitionisticFuzzySet) -> IntuitionisticFuzzySet:
    """Pointwise min of memberships, pointwise max of non-memberships."""
    out = IntuitionisticFuzzySet(
        mu_fn=PointwiseMin((s1.mu_fn, s2.mu_fn)),
        gamma_fn=PointwiseMax((s1.gamma_fn, s2.gamma_fn)),
        label=f"({s1.label}) & ({s2.label})" if s1.label or s2.label else "",
    )
    if not ifs_validate(out):
        raise InvalidResultError("intersection produced an invalid set")
    return out


def icoa(s: IntuitionisticFuzzySet, samples) -> float:
    """Intuitionistic center of area over the given similarity samples.

    Samples are weighted by mu(z) - gamma(z), restricted to samples where
    membership strictly exceeds non-membership. Raises
    IndeterminateRelationError when no sample qualifies; the caller decides
    the fallback policy (neutral weight).
    """
    zs = np.asarray(samples, dtype=float)
    if zs.size == 0:
        raise ValueError("icoa needs at least one sample")
    if zs.min() < 0.0 or zs.max() > 1.0:
        raise ValueError("icoa samples must lie in [0, 1]")
    mu = np.atleast_1d(s.mu_fn(zs))
    ga = np.atleast_1d(s.gamma_fn(zs))
    keep = mu > ga
    if not keep.any():
        raise IndeterminateRelationError("no sample with mu > gamma")
    w = mu[keep] - ga[keep]
    den = w.sum()
    if den <= 0.0:
        raise IndeterminateRelationError("non-positive defuzzification mass")
    return float((w * zs[keep]).sum() / den)


_PARTITION_LABELS = {
    3: ("Low", "Medium", "High"),
    5: ("Very Low", "Low", "Medium", "High", "Very High"),
    7: ("Very Low", "Low", "Medium Low", "Medium", "Medium High", "High",
        "Very High"),
}


@dataclass(frozen=True)
class LinguisticPartition:
    """Uniform triangular partition of [0, 1] with ascending labels."""
    labels: tuple[str, ...]
    functions: tuple[MembershipFunction, ...] = field(repr=False)

    @property
    def levels(self) -> int:
        return len(self.labels)

    def term(self, x: float) -> str:
        """Max-membership label at x; exact ties go to the higher label."""
        best_label, best_val = self.labels[0], -1.0
        for label, fn in zip(self.labels, self.functions):
            val = fn(x)
            if val >= best_val:
                best_label, best_val = label, val
        return best_label


def linguistic_partition(levels: int = 5) -> LinguisticPartition:
    """Uniform fuzzy partition with apexes at i/(levels-1), i = 0..levels-1."""
    if levels not in _PARTITION_LABELS:
        raise ValueError(f"unsupported partition size {levels}; pick 3, 5 or 7")
    apexes = np.linspace(0.0, 1.0, levels)
    fns = []
    for i, apex in enumerate(apexes):
        left = apexes[i - 1] if i > 0 else apex
        right = apexes[i + 1] if i < levels - 1 else apex
        fns.append(Triangular(float(left), float(apex), float(right)))
    return LinguisticPartition(_PARTITION_LABELS[levels], tuple(fns))
