"""
The invariant submeasure sigma_H on a finite group:

    sigma_H(A) = inf over probability measures mu on H of sup_y mu(Ay)

solved exactly as a zero-sum game with a Fraction simplex, or bracketed
in closed form from the uniform measure on H for larger groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from src.covering import max_E_separated
from src.errors import CarrierError, CertificateError, PreconditionError
from src.groups import FiniteGroup, FiniteSet, indicator, inverse_set, is_normal, is_subgroup, set_product
from src.models import LIMITS, Limits, fraction_str, parse_fraction
from src.setcalc import LargenessWitness
from src.submeasure.base import SubmeasureOracle
from src.submeasure.measures import FiniteMeasure, dirac


class SimplexTableau:
    """
    Compact tableau for  max c.x  s.t.  A x <= b, x >= 0  with b >= 0,
    pivoting by Bland's rule over exact Fractions.
    """

    def __init__(self, A, b, c):
        self.m = len(A)
        self.n = len(c)
        self.A = [[Fraction(v) for v in row] for row in A]
        self.b = [Fraction(v) for v in b]
        self.c = [Fraction(v) for v in c]
        self.nb_vars = list(range(self.n))
        self.b_vars = list(range(self.n, self.n + self.m))
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        piv = self.A[i][j]
        delta = self.c[j] / piv
        for col in range(self.n):
            self.c[col] -= delta * self.A[i][col]
        self.c[j] = -delta
        row = self.A[i]
        for col in range(self.n):
            row[col] = 1 / piv if col == j else row[col] / piv
        self.b[i] /= piv
        for k in range(self.m):
            if k == i:
                continue
            f = self.A[k][j]
            if not f:
                continue
            other = self.A[k]
            for col in range(self.n):
                other[col] = -f / piv if col == j else other[col] - f * row[col]
            self.b[k] -= f * self.b[i]
        self.nb_vars[j], self.b_vars[i] = self.b_vars[i], self.nb_vars[j]
        self.pivots += 1

    def bland_primal_step(self) -> str:
        try:
            _, j = min((self.nb_vars[j], j) for j in range(self.n) if self.c[j] > 0)
        except ValueError:
            return "optimal"
        try:
            _, _, i = min(
                (self.b[i] / self.A[i][j], self.b_vars[i], i)
                for i in range(self.m)
                if self.A[i][j] > 0
            )
        except ValueError:
            return "unbounded"
        self.pivot(i, j)
        return "go_on"

    def bland_primal(self) -> str:
        while True:
            status = self.bland_primal_step()
            if status in ("optimal", "unbounded"):
                return status

    def primal(self) -> list[Fraction]:
        x = [Fraction(0)] * self.n
        for i, var in enumerate(self.b_vars):
            if var < self.n:
                x[var] = self.b[i]
        return x

    def dual(self) -> list[Fraction]:
        y = [Fraction(0)] * self.m
        for j, var in enumerate(self.nb_vars):
            if var >= self.n:
                y[var - self.n] = -self.c[j]
        return y


def _hit_matrix(G: FiniteGroup, H: FiniteSet, A: FiniteSet) -> np.ndarray:
    """P[i, y] = 1 when the i-th element of H lies in Ay."""
    in_a = indicator(A)
    return in_a[G.mul_table[H.members][:, G.inv_table]]


def _check_inputs(G: FiniteGroup, H: FiniteSet, A: FiniteSet, require_normal: bool) -> None:
    if A.carrier != G or H.carrier != G:
        raise CarrierError(f"A and H must be subsets of {G.name}")
    if not is_subgroup(G, H):
        raise PreconditionError(f"H = {H.to_list()} is not a subgroup of {G.name}")
    if require_normal and not is_normal(G, H):
        raise PreconditionError(f"H = {H.to_list()} is not normal in {G.name}")


@dataclass(frozen=True)
class SigmaCertificate:
    """
    Exact value with an optimal measure mu on H (sup_y mu(Ay) = value)
    and a dual measure q on G (every h in H lies in Ay with q-mass at
    least value).
    """

    group: FiniteGroup = field(repr=False)
    H: FiniteSet = field(repr=False)
    target: FiniteSet = field(repr=False)
    value: Fraction
    measure: FiniteMeasure
    dual: FiniteMeasure
    pivots: int = 0

    def primal_sup(self) -> Fraction:
        P = _hit_matrix(self.group, self.H, self.target)
        weights = {int(h): w for h, w in self.measure.items()}
        best = Fraction(0)
        for y in range(self.group.order):
            mass = sum((weights.get(int(h), Fraction(0)) for h in self.H.members[P[:, y]]), Fraction(0))
            best = max(best, mass)
        return best

    def dual_min(self) -> Fraction:
        P = _hit_matrix(self.group, self.H, self.target)
        worst = None
        for i in range(len(self.H)):
            mass = sum((w for y, w in self.dual.items() if P[i, y]), Fraction(0))
            worst = mass if worst is None else min(worst, mass)
        return worst

    def replay(self) -> bool:
        if not self.measure.support.issubset(self.H):
            return False
        return self.primal_sup() == self.value == self.dual_min()

    def to_dict(self) -> dict:
        return {
            "value": fraction_str(self.value),
            "measure": self.measure.to_dict(),
            "dual": self.dual.to_dict(),
            "pivots": self.pivots,
        }


def solecki_sigma(G: FiniteGroup, H: FiniteSet, A: FiniteSet, require_normal: bool = False,
                  limits: Limits | None = None) -> SigmaCertificate:
    """
    Exact sigma_H(A) by linear programming.

    The row player picks h in H, the column player y in G, and pays 1
    when h lies in Ay. Scaling mu by 1/value turns the game into
    max sum(u) s.t. sum_h u_h [h in Ay] <= 1 for every y. Identical
    columns are merged before solving.
    """
    limits = limits or LIMITS
    _check_inputs(G, H, A, require_normal)
    if G.order > limits.exact_sigma_order_cap:
        raise PreconditionError(
            f"|G| = {G.order} above exact_sigma_order_cap={limits.exact_sigma_order_cap}; use sigma_estimate"
        )
    if len(A) == 0:
        point = dirac(G, G.identity)
        return SigmaCertificate(G, H, A, Fraction(0), point, point)

    P = _hit_matrix(G, H, A)
    patterns, first = np.unique(P.T, axis=0, return_index=True)
    keep = patterns.any(axis=1)
    patterns, first = patterns[keep], first[keep]
    tableau = SimplexTableau(patterns.astype(int).tolist(), [1] * len(patterns), [1] * len(H))
    if tableau.bland_primal() != "optimal":
        raise CertificateError("sigma linear program did not reach an optimum")

    u = tableau.primal()
    x = tableau.dual()
    total = sum(u, Fraction(0))
    if total != sum(x, Fraction(0)):
        raise CertificateError(f"primal {total} and dual {sum(x, Fraction(0))} objectives differ")
    value = 1 / total
    measure = FiniteMeasure.from_weights(G, {int(h): w * value for h, w in zip(H.members, u)})
    dual = FiniteMeasure.from_weights(G, {int(y): w * value for y, w in zip(first, x)})
    cert = SigmaCertificate(G, H, A, value, measure, dual, tableau.pivots)
    if not cert.replay():
        raise CertificateError(f"sigma certificate for A = {A.to_list()} failed its replay")
    return cert


@dataclass(frozen=True)
class SigmaInterval:
    """
    lo <= sigma_H(A) <= hi, each side backed by a measure: `upper` on H
    with sup_y upper(Ay) = hi, and `lower` on G under which every h in
    H lies in Ay with mass at least lo.
    """

    group: FiniteGroup = field(repr=False)
    H: FiniteSet = field(repr=False)
    target: FiniteSet = field(repr=False)
    lo: Fraction
    hi: Fraction
    upper: FiniteMeasure = field(repr=False)
    lower: FiniteMeasure = field(repr=False)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def replay(self) -> bool:
        bounds = SigmaCertificate(self.group, self.H, self.target, self.hi, self.upper, self.lower)
        return (
            self.upper.support.issubset(self.H)
            and bounds.primal_sup() == self.hi
            and bounds.dual_min() == self.lo
            and self.lo <= self.hi
        )

    def to_dict(self) -> dict:
        return {
            "lo": fraction_str(self.lo),
            "hi": fraction_str(self.hi),
            "width": fraction_str(self.width),
            "lower_support": self.lower.support.to_list(),
        }


def sigma_estimate(G: FiniteGroup, H: FiniteSet, A: FiniteSet) -> SigmaInterval:
    """
    Bracket sigma_H(A) without a linear program, for groups of any order.

    Averaging any measure on H over right translates by H never raises
    its sup over y, so the uniform measure on H is optimal and
    hi = max_y |Ay & H| / |H|. The uniform measure on the coset yH of a
    maximizing y gives every h in H the same mass, which is lo. The two
    sides meet, so the interval has width zero; both measures replay.
    """
    _check_inputs(G, H, A, False)
    if len(A) == 0:
        point = dirac(G, G.identity)
        return SigmaInterval(G, H, A, Fraction(0), Fraction(0), point, point)

    hits = _hit_matrix(G, H, A).sum(axis=0)
    best = int(np.argmax(hits))
    value = Fraction(int(hits[best]), len(H))
    upper = FiniteMeasure.from_weights(G, {int(h): Fraction(1, len(H)) for h in H.members})
    coset = G.mul_table[best, H.members]
    lower = FiniteMeasure.from_weights(G, {int(y): Fraction(1, len(H)) for y in coset})
    interval = SigmaInterval(G, H, A, value, value, upper, lower)
    if not interval.replay():
        raise CertificateError(f"sigma bracket for A = {A.to_list()} failed its replay")
    return interval


def complement_largeness(G: FiniteGroup, H: FiniteSet, A: FiniteSet, limits: Limits | None = None,
                         cert: SigmaCertificate | None = None) -> LargenessWitness:
    """When sigma_H(A) < 1 the optimal support F gives F^-1 (G \\ A) = G."""
    cert = cert or solecki_sigma(G, H, A, limits=limits)
    if cert.value >= 1:
        raise PreconditionError("sigma_H(A) = 1: the complement need not be large")
    rest = cert.target.complement()
    witness = LargenessWitness(inverse_set(cert.measure.support), rest)
    if not witness.replay():
        raise CertificateError("complement largeness failed its replay")
    return witness


class SoleckiOracle(SubmeasureOracle):
    name = "sigma"
    description = "inf over measures mu on H of sup_y mu(Ay), exact"

    def __init__(self, G: FiniteGroup, H: FiniteSet | None = None, require_normal: bool = False,
                 limits: Limits | None = None):
        super().__init__(G)
        self.H = H if H is not None else FiniteSet.full(G)
        self.limits = limits or LIMITS
        self.require_normal = require_normal
        _check_inputs(G, self.H, FiniteSet.empty(G), require_normal)
        self._cache: dict[bytes, SigmaCertificate] = {}

    def certificate(self, A: FiniteSet) -> SigmaCertificate:
        self.check_carrier(A)
        key = A.members.tobytes()
        if key not in self._cache:
            self._cache[key] = solecki_sigma(self.carrier, self.H, A, self.require_normal, self.limits)
        return self._cache[key]

    def eval(self, A: FiniteSet) -> Fraction:
        return self.certificate(A).value

    def syndetic_witness(self, A: FiniteSet, eps) -> Optional[tuple[FiniteSet, LargenessWitness]]:
        """
        E is the first floor(1/eps) + 1 elements of H, B a maximal
        E-separated subset of G \\ A. Then sigma_H(B) <= 1/|E| < eps,
        and F^-1 E^-1 E B = G with F the optimal support for A.
        """
        G = self.carrier
        eps = parse_fraction(eps)
        if not Fraction(1, G.order) < eps <= 1:
            raise PreconditionError(f"eps must lie in (1/{G.order}, 1], got {eps}")
        cert = self.certificate(A)
        if cert.value >= 1:
            raise PreconditionError("sigma_H(A) = 1; no syndetic set avoids A")
        size = math.floor(1 / eps) + 1
        if size > len(self.H):
            raise PreconditionError(f"eps={fraction_str(eps)} needs {size} elements of H, H has {len(self.H)}")

        E = FiniteSet(G, self.H.members[:size])
        net = max_E_separated(E, A.complement())
        F = cert.measure.support
        spread = set_product(set_product(inverse_set(F), inverse_set(E)), E)
        witness = LargenessWitness(spread, net.B)
        if not witness.replay() or self.eval(net.B) >= eps:
            raise CertificateError(f"syndetic witness for eps={fraction_str(eps)} failed its replay")
        return net.B, witness

    def witness_epsilon(self) -> Optional[Fraction]:
        if len(self.H) < 2:
            return None
        return Fraction(1, len(self.H) - 1)
