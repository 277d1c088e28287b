"""Finite quadratic modules: torsion groups with Q/Z-valued quadratic data.

A finite quadratic module is a finite Abelian group ``T`` together with a
quadratic function ``q: T -> Q/Z`` refining a symmetric linking pairing
``lam``:

    q(u + v) - q(u) - q(v) = lam(u, v)   (mod 1),   q(0) = 0.

For a surgery matrix with regular block ``L_reg`` the module lives on
``T = Z^rho / L_reg Z^rho`` with

    q([x])      = (1/2) x^T L_reg^{-1} x   (mod 1),
    lam([x],[y]) =        x^T L_reg^{-1} y (mod 1).

``q`` itself is only well defined on cosets up to half-integers; for every
even ``k`` the combination ``k * q`` is well defined mod 1, which is exactly
what the level-``k`` Gauss sum consumes.

Phase convention: a stored exponent ``e`` denotes the complex number
``exp(2*pi*i*e)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .errors import GroupTooLarge
from .intlinalg import (
    GROUP_ENUMERATION_CAP,
    CokernelGroup,
    IntSymMatrix,
    cokernel,
    regular_decomposition,
    solve_rational,
)
from .numeric import UnitPhase, rational_from_json, rational_to_json, unit_phase_eval


@dataclass(frozen=True)
class FiniteQuadraticModule:
    """A finite Abelian group with an exact quadratic refinement.

    ``q`` and ``lam`` are stored on the cyclic generators; values on general
    elements are computed either from an explicit integer lift (when the
    module came from a surgery matrix, in which case ``gram_inv`` is the
    exact inverse of the regular block) or from the generator data via the
    homogeneous evaluation rule

        q(sum a_i g_i) = sum a_i^2 q(g_i) + sum_{i<j} a_i a_j lam(g_i, g_j).

    Elements are coefficient tuples against the cyclic generators, and ``q``
    is a function of the tuple through its integer lift: on blocks with odd
    diagonal, ``q`` itself changes by half-integers across other lifts of
    the same coset (the pairing ``lam`` and, for every even level ``k``, the
    exponentials ``exp(2 pi i k q)`` are coset-independent; that is all the
    Gauss sums consume).  Accordingly :meth:`add` adds tuples without
    reducing modulo the cyclic orders, which makes lifts strictly additive
    and the refinement identity

        q(u + v) - q(u) - q(v) = lam(u, v)   (mod 1)

    an exact rational identity on tuples.
    """

    group: CokernelGroup
    q_gen: Tuple[Fraction, ...]
    lambda_gen: Tuple[Tuple[Fraction, ...], ...]
    gram_inv: Optional[Tuple[Tuple[Fraction, ...], ...]] = field(default=None)

    @property
    def order(self) -> int:
        return self.group.order

    def elements(self, cap: int = GROUP_ENUMERATION_CAP):
        return self.group.elements(cap)

    def q(self, element: Sequence[int]) -> Fraction:
        """Quadratic value of a group element, reduced into [0, 1)."""
        if self.gram_inv is not None:
            return self.q_of_lift(self.group.lift(element))
        total = Fraction(0)
        for a, qg in zip(element, self.q_gen):
            total += a * a * qg
        t = len(self.q_gen)
        for i in range(t):
            for j in range(i + 1, t):
                total += element[i] * element[j] * self.lambda_gen[i][j]
        return total % 1

    def q_of_lift(self, x: Sequence[int]) -> Fraction:
        """Quadratic value of an explicit integer lift in ``Z^rho``."""
        if self.gram_inv is None:
            raise ValueError("module carries no ambient lattice data")
        acc = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = self.gram_inv[i]
                acc += xi * sum(row[j] * x[j] for j in range(len(x)))
        return (acc / 2) % 1

    def linking(self, u: Sequence[int], v: Sequence[int]) -> Fraction:
        """Linking pairing lam(u, v), reduced into [0, 1)."""
        if self.gram_inv is not None:
            x = self.group.lift(u)
            y = self.group.lift(v)
            acc = Fraction(0)
            for i, xi in enumerate(x):
                if xi:
                    row = self.gram_inv[i]
                    acc += xi * sum(row[j] * y[j] for j in range(len(y)))
            return acc % 1
        acc = Fraction(0)
        t = len(self.q_gen)
        for i in range(t):
            for j in range(t):
                acc += u[i] * v[j] * self.lambda_gen[i][j]
        return acc % 1

    def add(self, u: Sequence[int], v: Sequence[int]) -> Tuple[int, ...]:
        """Tuple addition without reduction, so lifts add exactly."""
        return tuple(a + b for a, b in zip(u, v))

    def zero(self) -> Tuple[int, ...]:
        return tuple(0 for _ in self.group.cyclic_orders)

    def to_json(self) -> dict:
        t = len(self.q_gen)
        return {
            "orders": list(self.group.cyclic_orders),
            "q_gen": [[i, rational_to_json(self.q_gen[i])] for i in range(t)],
            "lambda_gen": [[i, j, rational_to_json(self.lambda_gen[i][j])]
                           for i in range(t) for j in range(i, t)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteQuadraticModule":
        orders = tuple(int(d) for d in obj["orders"])
        t = len(orders)
        q_gen = [Fraction(0)] * t
        for i, val in obj["q_gen"]:
            q_gen[i] = rational_from_json(val) % 1
        lam = [[Fraction(0)] * t for _ in range(t)]
        for i, j, val in obj["lambda_gen"]:
            lam[i][j] = lam[j][i] = rational_from_json(val) % 1
        group = CokernelGroup(orders, tuple(tuple() for _ in orders), 0)
        return cls(group, tuple(q_gen), tuple(tuple(row) for row in lam))


def from_surgery(L: IntSymMatrix, cap: int = GROUP_ENUMERATION_CAP) -> FiniteQuadraticModule:
    """Finite quadratic module of a surgery matrix (degenerate ``L`` allowed;
    only the regular block enters)."""
    return from_regular_block(regular_decomposition(L).regular, cap)


def from_regular_block(reg: IntSymMatrix,
                       cap: int = GROUP_ENUMERATION_CAP) -> FiniteQuadraticModule:
    """Finite quadratic module of a nondegenerate symmetric block."""
    group = cokernel(reg) if reg.m else CokernelGroup.trivial(0)
    if group.order > cap:
        raise GroupTooLarge(
            f"torsion group of order {group.order} exceeds cap {cap}")
    rho = reg.m
    if rho:
        # Exact inverse of the regular block, one column solve at a time.
        cols = []
        for j in range(rho):
            e = [1 if i == j else 0 for i in range(rho)]
            cols.append(solve_rational(reg.rows(), e))
        gram_inv = tuple(tuple(cols[j][i] for j in range(rho)) for i in range(rho))
    else:
        gram_inv = tuple()
    t = len(group.cyclic_orders)
    module = FiniteQuadraticModule(group, (Fraction(0),) * t,
                                   tuple((Fraction(0),) * t for _ in range(t)),
                                   gram_inv)
    q_gen = tuple(module.q_of_lift(group.lift(_unit(t, i))) for i in range(t))
    lam = tuple(tuple(module.linking(_unit(t, i), _unit(t, j)) for j in range(t))
                for i in range(t))
    return FiniteQuadraticModule(group, q_gen, lam, gram_inv)


def _unit(t: int, i: int) -> Tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(t))


def gauss_sum(module: FiniteQuadraticModule, k: int,
              cap: int = GROUP_ENUMERATION_CAP) -> complex:
    """Normalized level-``k`` Gauss sum ``|T|^{-1/2} sum_x exp(2 pi i k q(x))``.

    Requires even ``k`` (oddness would make ``k * q`` ill defined on cosets).
    """
    if k <= 0 or k % 2 != 0:
        raise ValueError("level k must be a positive even integer")
    total = 0j
    for element in module.elements(cap):
        total += unit_phase_eval(UnitPhase((k * module.q(element)) % 1))
    return total / math.sqrt(module.order)


@dataclass(frozen=True)
class CyclicQuadraticData:
    """The standard cyclic module at even level ``k``.

    The labels are ``Z_k``; the twist exponent of label ``x`` is
    ``x^2 / (2k)`` mod 1 (so the twist is ``exp(pi i x^2 / k)``) and the
    braiding bicharacter exponent is ``x y / k`` mod 1.
    """

    k: int

    def __post_init__(self) -> None:
        if self.k <= 0 or self.k % 2 != 0:
            raise ValueError("level k must be a positive even integer")

    def twist_exponent(self, x: int) -> Fraction:
        return Fraction(x * x, 2 * self.k) % 1

    def twist_phase(self, x: int) -> UnitPhase:
        return UnitPhase(self.twist_exponent(x))


def bicharacter(data: CyclicQuadraticData, x: int, y: int) -> UnitPhase:
    """The nondegenerate pairing phase ``x y / k`` mod 1 on ``Z_k``."""
    if not (0 <= x < data.k and 0 <= y < data.k):
        raise ValueError("labels must lie in range(k)")
    return UnitPhase(Fraction(x * y, data.k))
