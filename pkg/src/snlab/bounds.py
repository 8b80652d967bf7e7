"""Explicit bounds for the eigenvalue ratio functional on convex domains.

The lower bound comes from combining two inequalities for F in terms of the
normalized width delta: F >= pi^2/(6 delta) for wide domains and
F >= delta^2 pi^2 / 108 for narrow ones.  The branches cross at
delta = 18^(1/3), giving the constant pi^2 / (6 * 18^(1/3)).

The upper bound is F <= 2 (1 + pi w D / (r P)).  The product w D / (r P) is
controlled through tau = w / D: the perimeter satisfies
P >= D / g(tau) with g(tau) = 1 / (2 sqrt(1 - tau^2) + 2 tau arcsin tau), and
the inradius satisfies 2 r / D >= y2(tau), the second-smallest positive root
of the quartic

    P_tau(y) = tau/4 y^4 - 2 y^3 + 5 tau y^2 - 4 tau^2 y + tau^3.

Maximizing f(tau) = 2 pi tau g(tau) / y2(tau) over tau in (0, 1) gives a
constant K < 3.52, hence F <= 2 (1 + K) <= 9.04 uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT3_2 = np.sqrt(3.0) / 2.0
TWO_MINUS_SQRT2 = 2.0 - np.sqrt(2.0)
TWO_PLUS_SQRT2 = 2.0 + np.sqrt(2.0)
TAU_GRID_LO = 1e-6
TAU_GRID_HI = 1.0 - 1e-9


def p_tau(tau: float, y):
    """The bracketing quartic, by Horner evaluation."""
    return (((0.25 * tau * y - 2.0) * y + 5.0 * tau) * y - 4.0 * tau * tau) * y + tau ** 3


def p_tau_scaled(tau: float, u):
    """P_tau(tau u) / tau^3 in the exact factored form.

    The identity  -2u^3 + 5u^2 - 4u + 1 = -(u - 1)^2 (2u - 1)  makes the
    evaluation cancellation-free near the cluster of roots at u ~ 1, where
    the raw quartic degenerates to O(tau^5) and plain Horner loses the sign
    for small tau.
    """
    return 0.25 * (tau * u) ** 2 * u * u - (u - 1.0) ** 2 * (2.0 * u - 1.0)


def _scaled_magnitude(tau: float, u: float) -> float:
    return 0.25 * (tau * u) ** 2 * u * u + (u - 1.0) ** 2 * abs(2.0 * u - 1.0)


def _bisect_poly(tau: float, y_lo: float, y_hi: float, max_iter: int = 200) -> float:
    lo, hi = y_lo / tau, y_hi / tau

    def f(u):
        return p_tau_scaled(tau, u)

    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return y_lo
    if fhi == 0.0:
        return y_hi
    if flo * fhi > 0:
        raise ValueError(f"quartic has no sign change on [{y_lo}, {y_hi}] at tau={tau}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo <= 1e-14 * max(1.0, abs(hi)):
            break
    return tau * 0.5 * (lo + hi)


@dataclass(frozen=True)
class QuarticRoots:
    """The four positive roots of the bracketing quartic with certificates.

    ``residuals`` are |P_tau(y_i)| and ``scales`` the corresponding sums of
    term magnitudes; a certified root has residual small against its scale.
    """

    tau: float
    roots: np.ndarray
    brackets: tuple
    residuals: np.ndarray
    scales: np.ndarray

    @property
    def y2(self) -> float:
        return float(self.roots[1])


def root_brackets(tau: float) -> tuple:
    """Disjoint sign-change brackets for the four positive roots.

    Three regimes of tau; at the boundaries both adjacent bracket sets are
    valid.  The last bracket is closed by a coefficient bound on root size.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie strictly inside (0, 1)")
    mid = tau + 0.5 * tau * tau
    y_max = 1.0 + 8.0 / tau
    if tau <= SQRT3_2:
        first = 2.0 * tau / 3.0
    elif tau <= 0.9:
        first = 0.5
    else:
        first = TWO_MINUS_SQRT2
    return ((0.0, first), (first, mid), (mid, TWO_PLUS_SQRT2), (TWO_PLUS_SQRT2, y_max))


def quartic_roots(tau: float) -> QuarticRoots:
    brackets = root_brackets(tau)
    roots = np.array([_bisect_poly(tau, lo, hi) for lo, hi in brackets])
    t3 = tau ** 3
    residuals = np.array([t3 * abs(p_tau_scaled(tau, y / tau)) for y in roots])
    scales = np.array([t3 * _scaled_magnitude(tau, y / tau) for y in roots])
    return QuarticRoots(tau=tau, roots=roots, brackets=brackets,
                        residuals=residuals, scales=scales)


def g_of_tau(tau: float) -> float:
    """Perimeter-to-diameter control: D/P <= g(tau) for convex domains."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    return 1.0 / (2.0 * np.sqrt(1.0 - tau * tau) + 2.0 * tau * np.arcsin(tau))


def f_of_tau(tau: float) -> float:
    """The function whose maximum over (0, 1) is the constant K."""
    return 2.0 * np.pi * tau * g_of_tau(tau) / quartic_roots(tau).y2


def constant_K(grid: int = 1000) -> tuple[float, float]:
    """Maximum of f and its argmax, by grid scan plus golden-section refinement."""
    taus = np.linspace(TAU_GRID_LO, TAU_GRID_HI, grid)
    vals = np.array([f_of_tau(t) for t in taus])
    i = int(np.argmax(vals))
    lo = taus[max(i - 1, 0)]
    hi = taus[min(i + 1, grid - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f_of_tau(c), f_of_tau(d)
    while b - a > 1e-12:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f_of_tau(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f_of_tau(d)
    tau_star = 0.5 * (a + b)
    return f_of_tau(tau_star), tau_star


def lower_bound_constant() -> float:
    """pi^2 / (6 * 18^(1/3)), the uniform lower bound for F on convex domains."""
    return np.pi ** 2 / (6.0 * 18.0 ** (1.0 / 3.0))


def lower_bound_branches(delta: float) -> tuple[float, float]:
    """The two lower-bound branches evaluated at normalized width delta."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return np.pi ** 2 / (6.0 * delta), delta * delta * np.pi ** 2 / 108.0


def upper_bound_constant(grid: int = 1000) -> float:
    """2 (1 + K): the uniform upper bound for F on convex domains."""
    K, _ = constant_K(grid)
    return 2.0 * (1.0 + K)


def per_domain_upper_bound(width: float, diameter: float, inradius: float,
                           perimeter: float) -> float:
    """Domain-wise upper bound 2 (1 + pi w D / (r P))."""
    if min(width, diameter, inradius, perimeter) <= 0:
        raise ValueError("geometric functionals must be positive")
    return 2.0 * (1.0 + np.pi * width * diameter / (inradius * perimeter))
