"""Piecewise-linear weight profiles on [0, 1].

The admissible class consists of nonnegative concave functions h on [0, 1]
with unit integral.  Profiles are stored as piecewise-linear interpolants so
that integrals, projections and mesh transfers stay exact.  A ``ProfileH`` is
only a container for a piecewise-linear function; membership in the admissible
class is checked by :func:`validate` and enforced by the constructors that
promise it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

CONCAVITY_TOL = 1e-12
NONNEG_TOL = 1e-12


class ProfileError(ValueError):
    """Malformed profile data (knots or ordinates)."""


@dataclass(frozen=True)
class ProfileH:
    """Piecewise-linear function on [0, 1] given by knots and ordinates."""

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.ndim != 1 or values.ndim != 1 or knots.size != values.size:
            raise ProfileError("knots and values must be 1-d arrays of equal length")
        if knots.size < 2:
            raise ProfileError("need at least two knots")
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(values))):
            raise ProfileError("non-finite profile data")
        if abs(knots[0]) > 1e-15 or abs(knots[-1] - 1.0) > 1e-15:
            raise ProfileError("knots must span [0, 1]")
        if np.any(np.diff(knots) <= 0):
            raise ProfileError("knots must be strictly increasing")
        knots = knots.copy()
        knots[0], knots[-1] = 0.0, 1.0
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values.copy())
        self.knots.setflags(write=False)
        self.values.setflags(write=False)

    def __call__(self, x):
        return np.interp(x, self.knots, self.values)

    def integral(self) -> float:
        """Exact integral of the piecewise-linear interpolant."""
        return float(np.trapezoid(self.values, self.knots))

    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.knots)

    def max(self) -> float:
        return float(self.values.max())


@dataclass
class ValidityReport:
    """Outcome of an admissibility check.

    ``violations`` holds (kind, index, magnitude) tuples where kind is one of
    'negative', 'concavity', 'integral'.
    """

    ok: bool
    normalized: bool
    integral: float
    violations: list = field(default_factory=list)


def validate(h: ProfileH, tol: float = CONCAVITY_TOL) -> ValidityReport:
    """Check nonnegativity, concavity and unit integral of a profile."""
    violations = []
    neg = np.where(h.values < -tol)[0]
    for i in neg:
        violations.append(("negative", int(i), float(-h.values[i])))
    s = h.slopes()
    scale = max(1.0, float(np.abs(s).max())) if s.size else 1.0
    jump = np.diff(s)
    bad = np.where(jump > tol * scale)[0]
    for i in bad:
        violations.append(("concavity", int(i) + 1, float(jump[i])))
    integ = h.integral()
    normalized = abs(integ - 1.0) <= 1e-12
    if integ <= 0:
        violations.append(("integral", -1, float(integ)))
    ok = not violations
    return ValidityReport(ok=ok, normalized=normalized, integral=integ, violations=violations)


def is_admissible(h: ProfileH, tol: float = CONCAVITY_TOL) -> bool:
    r = validate(h, tol)
    return r.ok and r.normalized


def normalize(h: ProfileH) -> ProfileH:
    """Rescale ordinates so the integral equals one."""
    integ = h.integral()
    if integ <= 0:
        raise ProfileError("cannot normalize a profile with nonpositive integral")
    return ProfileH(h.knots, h.values / integ)


def constant() -> ProfileH:
    """The flat profile h == 1."""
    return ProfileH(np.array([0.0, 1.0]), np.array([1.0, 1.0]))


def triangular(x0: float) -> ProfileH:
    """Normalized tent profile with peak at x0.

    Rises linearly from 0 to the peak at x0 and falls linearly back to 0;
    normalization puts the peak ordinate at 2.
    """
    if not 0.0 < x0 < 1.0:
        raise ProfileError("tent peak must lie strictly inside (0, 1)")
    return ProfileH(np.array([0.0, x0, 1.0]), np.array([0.0, 2.0, 0.0]))


def parabolic_star(n_knots: int = 2001) -> ProfileH:
    """Piecewise-linear sampling of 6x(1-x) on uniform knots, then normalized."""
    if n_knots < 3:
        raise ProfileError("need at least three knots")
    x = np.linspace(0.0, 1.0, n_knots)
    return normalize(ProfileH(x, 6.0 * x * (1.0 - x)))


def mirror(h: ProfileH) -> ProfileH:
    """The profile x -> h(1 - x)."""
    return ProfileH(1.0 - h.knots[::-1], h.values[::-1])


def add(h1: ProfileH, h2: ProfileH) -> ProfileH:
    """Pointwise sum on the union knot grid (exact for piecewise-linear)."""
    knots = np.union1d(h1.knots, h2.knots)
    return ProfileH(knots, h1(knots) + h2(knots))


def scale(h: ProfileH, k: float) -> ProfileH:
    return ProfileH(h.knots, k * h.values)


def resample(h: ProfileH, knots) -> ProfileH:
    """Evaluate on a new knot grid (lossy unless old knots are included)."""
    knots = np.asarray(knots, dtype=float)
    return ProfileH(knots, h(knots))


def positivity_constant(h: ProfileH) -> float:
    """Largest K with h(x) >= K x(1-x) on [0, 1].

    Minimizes the ratio h(x) / (x(1-x)) exactly: on each linear piece the
    ratio has at most one interior critical point (quadratic numerator of the
    derivative), and at an endpoint where h vanishes the ratio tends to the
    absolute boundary slope.
    """
    k, v, s = h.knots, h.values, h.slopes()
    cands = []
    if v[0] <= 0.0:
        cands.append(s[0])
    if v[-1] <= 0.0:
        cands.append(-s[-1])
    interior = k[1:-1]
    if interior.size:
        cands.extend((v[1:-1] / (interior * (1.0 - interior))).tolist())

    def ratio(x):
        return h(x) / (x * (1.0 - x))

    for i in range(s.size):
        lo = max(k[i], 1e-15)
        hi = min(k[i + 1], 1.0 - 1e-15)
        if lo >= hi:
            continue
        b = s[i]
        a = v[i] - b * k[i]
        if b == 0.0:
            x_star = 0.5
            if lo < x_star < hi:
                cands.append(ratio(x_star))
            continue
        disc = a * a + a * b
        if disc < 0.0:
            continue
        root = np.sqrt(disc)
        for x_star in ((-a + root) / b, (-a - root) / b):
            if lo < x_star < hi:
                cands.append(ratio(x_star))
    if not cands:
        return 0.0
    return float(min(cands))


def _pava_nonincreasing(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted least-squares fit of a nonincreasing sequence (pool adjacent violators)."""
    n = y.size
    means = []
    weights = []
    counts = []
    for i in range(n):
        means.append(y[i])
        weights.append(w[i])
        counts.append(1)
        while len(means) > 1 and means[-2] < means[-1] - 0.0:
            m2, w2, c2 = means.pop(), weights.pop(), counts.pop()
            m1, w1, c1 = means.pop(), weights.pop(), counts.pop()
            wt = w1 + w2
            means.append((m1 * w1 + m2 * w2) / wt)
            weights.append(wt)
            counts.append(c1 + c2)
    out = np.empty(n)
    pos = 0
    for m, c in zip(means, counts):
        out[pos:pos + c] = m
        pos += c
    return out


def project_concave(values, knots=None, max_rounds: int = 100) -> ProfileH:
    """Nearest concave nonnegative profile to the given ordinates.

    Slopes are made nonincreasing by pool-adjacent-violators, the ordinate
    level is chosen by least squares, and negatives are clamped at zero.  The
    two steps alternate until both constraints hold.  The result is not
    renormalized; callers that need a unit integral compose with
    :func:`normalize`.
    """
    values = np.asarray(values, dtype=float)
    if knots is None:
        knots = np.linspace(0.0, 1.0, values.size)
    else:
        knots = np.asarray(knots, dtype=float)
    probe = ProfileH(knots, values)
    if validate(probe).ok:
        return probe
    dx = np.diff(knots)
    v = values.copy()
    for _ in range(max_rounds):
        s = np.diff(v) / dx
        s_fit = _pava_nonincreasing(s, dx)
        shape = np.concatenate([[0.0], np.cumsum(s_fit * dx)])
        level = float(np.mean(values - shape))
        v = shape + level
        np.clip(v, 0.0, None, out=v)
        if validate(ProfileH(knots, v)).ok:
            break
    else:
        raise ProfileError("concave projection did not converge")
    if not np.any(v > 0):
        raise ProfileError("concave projection collapsed to the zero profile")
    return ProfileH(knots, v)


def random_profile(rng: np.random.Generator, n_knots: int = 33,
                   strictly_positive: bool = False) -> ProfileH:
    """Random admissible profile (nonnegative, concave, unit integral).

    Draws a Dirichlet-weighted positive combination of concave generators:
    a constant, a random tent, the parabola x(1-x), and a minimum of random
    affine functions.  Sums of concave functions are concave, so no projection
    is needed.  With ``strictly_positive`` the constant component gets a floor
    so the profile is bounded away from zero at the endpoints.
    """
    if n_knots < 3:
        raise ProfileError("need at least three knots")
    x = np.linspace(0.0, 1.0, n_knots)
    x0 = float(rng.uniform(0.1, 0.9))
    tent = np.interp(x, [0.0, x0, 1.0], [0.0, 1.0, 0.0])
    parab = x * (1.0 - x) * 4.0
    n_aff = int(rng.integers(2, 5))
    a = rng.uniform(-2.0, 2.0, size=n_aff)
    b = rng.uniform(0.5, 2.0, size=n_aff)
    minaff = np.min(a[:, None] * (x[None, :] - 0.5) + b[:, None], axis=0)
    # shift instead of clip: the positive part of a concave function is not
    # concave (convex kinks at zero crossings), but a vertical shift is
    minaff -= min(minaff.min(), 0.0)
    w = rng.dirichlet(np.ones(4))
    if strictly_positive:
        w[0] = max(w[0], 0.25)
    elif rng.uniform() < 0.35:
        # force a profile that vanishes at both endpoints
        w[0] = 0.0
        w[3] = 0.0
    v = w[0] * np.ones_like(x) + w[1] * tent + w[2] * parab + w[3] * minaff
    return normalize(ProfileH(x, v))


def to_dict(h: ProfileH) -> dict:
    return {"knots": h.knots.tolist(), "values": h.values.tolist()}


def from_dict(d: dict) -> ProfileH:
    try:
        return ProfileH(np.asarray(d["knots"], dtype=float),
                        np.asarray(d["values"], dtype=float))
    except (KeyError, TypeError) as exc:
        raise ProfileError(f"malformed profile object: {exc}") from exc


def save(h: ProfileH, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_dict(h), f)
        f.write("\n")


def load(path) -> ProfileH:
    with open(path, encoding="utf-8") as f:
        return from_dict(json.load(f))


def resolve(spec: str) -> ProfileH:
    """Turn a CLI profile spec into a profile.

    Accepts ``const``, ``parabolic``, ``tent:<x0>`` or a path to a JSON file
    with ``knots`` and ``values`` fields.
    """
    if spec == "const":
        return constant()
    if spec == "parabolic":
        return parabolic_star()
    if spec.startswith("tent:"):
        try:
            x0 = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise ProfileError(f"bad tent spec {spec!r}") from exc
        return triangular(x0)
    return load(spec)
