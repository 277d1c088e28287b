"""Torus-boundary structure: state vectors, modular data, Maslov bookkeeping.

State spaces
------------
A disjoint union of ``g`` boundary tori (equivalently a genus-``g``
handlebody model) carries the free vector space on ``(Z_k)^g`` labels; a
:class:`TorusStateVector` is a coefficient table over exactly ``k^g`` label
tuples.

Modular data
------------
On one torus the modular operators in the label basis are fixed as

    S[y][x] = k^{-1/2} exp(-2 pi i x y / k),      T[x][x] = exp(pi i x^2 / k).

``S^2`` is the charge-conjugation permutation ``e_x -> e_{-x}`` for either
sign of the Fourier kernel, but only this sign pairing satisfies the
anomaly identity ``(S T)^3 = exp(pi i / 4) S^2`` entrywise (with the
``+2 pi i x y / k`` kernel the triple product collapses to
``exp(pi i/4) * Id`` instead, which is not a scalar multiple of ``S^2``).
Conjugating both kernel and twist flips the anomaly phase to
``exp(-pi i / 4)``.

Boundary coefficients
---------------------
A bordism with designated boundary components is stored as one symmetric
block linking matrix over [surgery | colored insertions | boundary]
components, the boundary components carrying framing data instead of colors.
Filling a boundary component at label ``x`` (:meth:`ExtendedBordism.fill`)
produces an honest closed presentation and the boundary state vector is the
table of closed evaluations over ``x``.  Two filling conventions are
implemented:

* ``"meridian"`` (default): the flagged component becomes a colored
  insertion with color ``x``, its framing moving to the insertion
  self-linking diagonal. The solid-torus pairing closure then evaluates to
  ``Omega(x, y) * Z(S^3)`` on a core colored ``y``, reproducing the Fourier
  pairing of the torus state space.
* ``"zero_framed"``: the flagged component becomes a surgery component
  (keeping its framing) and a fresh meridian insertion colored ``x`` is
  adjoined.  The trivially filled empty bordism then gives the slot values
  of ``rt_raw_closed([[0]])``.

Anomaly bookkeeping
-------------------
Bordisms carry an integer weight mod 8.  Weights compose additively with the
Maslov index of the gluing triple, and a closed weighted scalar is corrected
by ``exp(+ pi i n / 4)``.  The Maslov index of three Lagrangian frames is
the signature of the standard three-slot quadratic form

    Q(x1, x2, x3) = w(x1, x2) + w(x2, x3) + w(x3, x1)

on their direct sum, computed exactly (this classical construction is not
fixed by the invariants themselves; it is validated here through its
antisymmetry, vanishing and cocycle properties).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotLagrangian
from .intlinalg import IntSymMatrix, regular_decomposition, signature
from .numeric import UnitPhase, approx_to_json, unit_phase_eval
from .quadmod import CyclicQuadraticData, bicharacter
from .surgery import SurgeryPresentation, rt_raw_closed


def hopf_pairing(k: int, x: int, y: int) -> UnitPhase:
    """Pairing phase of dual label ``x`` against label ``y``: ``x y / k``."""
    return bicharacter(CyclicQuadraticData(k), x % k, y % k)


@dataclass(frozen=True)
class TorusStateVector:
    """Coefficients over the ``k^g`` label tuples of ``g`` boundary tori."""

    level: int
    genus: int
    coefficients: Dict[Tuple[int, ...], complex]

    def __post_init__(self) -> None:
        k, g = self.level, self.genus
        table: Dict[Tuple[int, ...], complex] = {}
        for label, value in self.coefficients.items():
            key = tuple(int(x) % k for x in label)
            if len(key) != g:
                raise ValueError("label arity must equal the genus")
            table[key] = table.get(key, 0j) + complex(value)
        import itertools
        for key in itertools.product(range(k), repeat=g):
            table.setdefault(key, 0j)
        object.__setattr__(self, "coefficients", table)

    def __getitem__(self, label) -> complex:
        if isinstance(label, int):
            label = (label,)
        return self.coefficients[tuple(int(x) % self.level for x in label)]

    def slot_count(self) -> int:
        return len(self.coefficients)

    def to_json(self) -> dict:
        return {"k": self.level, "g": self.genus,
                "coeffs": {",".join(str(x) for x in label): approx_to_json(val)
                           for label, val in sorted(self.coefficients.items())}}


# ---------------------------------------------------------------------------
# Modular representation on one torus

def modular_rep(k: int) -> Tuple[np.ndarray, np.ndarray]:
    """The ``S`` and ``T`` matrices on the torus label basis (k x k).

    ``S[y][x] = k^{-1/2} exp(-2 pi i x y / k)`` and
    ``T[x][x] = exp(pi i x^2 / k)``; see the module docstring for why the
    Fourier kernel carries the minus sign.
    """
    if k < 2 or k % 2 != 0:
        raise ValueError("level k must be an even integer >= 2")
    data = CyclicQuadraticData(k)
    s = np.empty((k, k), dtype=complex)
    for x in range(k):
        for y in range(x, k):
            s[y][x] = s[x][y] = unit_phase_eval(
                bicharacter(data, x, y).conjugate())
    s /= math.sqrt(k)
    t = np.zeros((k, k), dtype=complex)
    for x in range(k):
        t[x][x] = unit_phase_eval(data.twist_phase(x))
    return s, t


def twist_phase(k: int, x: int) -> UnitPhase:
    """Exact twist phase of label ``x``: exponent ``x^2 / (2k)`` mod 1."""
    return CyclicQuadraticData(k).twist_phase(x % k)


@dataclass(frozen=True)
class AnomalyCheck:
    lhs: np.ndarray            # (S T)^3
    rhs: np.ndarray            # S^2
    phase: complex             # scalar ratio lhs / rhs
    ok: bool
    max_entry_deviation: float


ANOMALY_PHASE = complex(math.sqrt(0.5), math.sqrt(0.5))  # exp(pi i / 4)


def anomaly_check(k: int, tol: float = 1e-9) -> AnomalyCheck:
    """Verify ``(S T)^3 = exp(pi i/4) S^2`` and that ``S^2`` is charge
    conjugation, at level ``k <= 64``."""
    if k > 64:
        raise ValueError("anomaly check capped at k = 64")
    s, t = modular_rep(k)
    st = s @ t
    lhs = st @ st @ st
    rhs = s @ s
    phase = lhs[0][0] / rhs[0][0]   # (S^2)[0][0] = 1 exactly
    max_dev = float(np.max(np.abs(lhs - phase * rhs)))
    ok = abs(phase - ANOMALY_PHASE) <= tol and max_dev <= tol * k
    return AnomalyCheck(lhs, rhs, phase, ok, max_dev)


def charge_conjugation_deviation(k: int) -> float:
    """Max deviation of ``S^2`` from the permutation ``delta[y, -x]``."""
    s, _ = modular_rep(k)
    s2 = s @ s
    perm = np.zeros((k, k), dtype=complex)
    for x in range(k):
        perm[(-x) % k][x] = 1.0
    return float(np.max(np.abs(s2 - perm)))


# ---------------------------------------------------------------------------
# Bordisms with designated boundary tori

def _as_rows(block, n_rows: int, n_cols: int, name: str) -> Tuple[Tuple[int, ...], ...]:
    rows = tuple(tuple(int(x) for x in row) for row in block)
    if len(rows) != n_rows or any(len(r) != n_cols for r in rows):
        raise ValueError(f"{name} block must be {n_rows} x {n_cols}")
    return rows


@dataclass(frozen=True)
class ExtendedBordism:
    """Surgery data with designated boundary components and a weight mod 8.

    Blocks of the full symmetric linking matrix over components ordered as
    [surgery | insertion | boundary]; boundary components carry framings
    (diagonal of ``boundary_self``) instead of colors.
    """

    surgery: IntSymMatrix
    insertion_mixed: Tuple[Tuple[int, ...], ...] = ()
    insertion_self: IntSymMatrix = IntSymMatrix.empty()
    insertion_colors: Tuple[int, ...] = ()
    boundary_mixed: Tuple[Tuple[int, ...], ...] = ()
    boundary_self: IntSymMatrix = IntSymMatrix.empty()
    insertion_boundary: Tuple[Tuple[int, ...], ...] = ()
    weight: int = 0

    def __post_init__(self) -> None:
        s, r, t = self.surgery.m, self.insertion_self.m, self.boundary_self.m
        object.__setattr__(self, "insertion_mixed",
                           _as_rows(self.insertion_mixed or ((),) * s, s, r,
                                    "insertion_mixed"))
        object.__setattr__(self, "boundary_mixed",
                           _as_rows(self.boundary_mixed or ((),) * s, s, t,
                                    "boundary_mixed"))
        object.__setattr__(self, "insertion_boundary",
                           _as_rows(self.insertion_boundary or ((),) * r, r, t,
                                    "insertion_boundary"))
        if len(self.insertion_colors) != r:
            raise ValueError("one color per insertion component required")
        object.__setattr__(self, "weight", int(self.weight) % 8)

    @property
    def boundary_count(self) -> int:
        return self.boundary_self.m

    def fill(self, colors: Sequence[int], mode: str = "meridian",
             ) -> SurgeryPresentation:
        """Close every boundary component at the given labels."""
        t = self.boundary_count
        if len(colors) != t:
            raise ValueError("one filling color per boundary component required")
        colors = tuple(int(x) for x in colors)
        s, r = self.surgery.m, self.insertion_self.m
        C = self.insertion_self.entries
        E = self.boundary_self.entries
        F = self.insertion_boundary
        if mode == "meridian":
            mixed = tuple(self.insertion_mixed[i] + self.boundary_mixed[i]
                          for i in range(s))
            self_rows = [list(C[i]) + list(F[i]) for i in range(r)]
            self_rows += [[F[i][j] for i in range(r)] + list(E[j])
                          for j in range(t)]
            return SurgeryPresentation(
                self.surgery, mixed,
                IntSymMatrix.from_rows(self_rows),
                self.insertion_colors + colors)
        if mode == "zero_framed":
            L_rows = [list(self.surgery.entries[i]) + list(self.boundary_mixed[i])
                      for i in range(s)]
            L_rows += [[self.boundary_mixed[i][j] for i in range(s)] + list(E[j])
                       for j in range(t)]
            mixed = tuple(tuple(self.insertion_mixed[i]) + (0,) * t
                          for i in range(s))
            mixed += tuple(tuple(F[i][j] for i in range(r))
                           + tuple(1 if a == j else 0 for a in range(t))
                           for j in range(t))
            self_rows = [list(C[i]) + [0] * t for i in range(r)]
            self_rows += [[0] * (r + t) for _ in range(t)]
            return SurgeryPresentation(
                IntSymMatrix.from_rows(L_rows), mixed,
                IntSymMatrix.from_rows(self_rows),
                self.insertion_colors + colors)
        raise ValueError(f"unknown filling mode {mode!r}")


def boundary_vector(b: ExtendedBordism, k: int, mode: str = "meridian",
                    max_terms: Optional[int] = None) -> TorusStateVector:
    """State vector of a one-boundary bordism: slot ``x`` holds the closed
    evaluation of the presentation filled at ``x``."""
    if b.boundary_count != 1:
        raise ValueError("boundary_vector needs exactly one boundary component")
    coeffs = {(x,): rt_raw_closed(b.fill((x,), mode), k, max_terms)
              for x in range(k)}
    return TorusStateVector(k, 1, coeffs)


def solid_torus_bordism(core_color: int, core_framing: int = 0,
                        boundary_framing: int = 0) -> ExtendedBordism:
    """Solid torus with core colored ``core_color``, one boundary torus."""
    return ExtendedBordism(
        surgery=IntSymMatrix.empty(),
        insertion_self=IntSymMatrix.from_rows([[core_framing]]),
        insertion_colors=(core_color,),
        boundary_self=IntSymMatrix.from_rows([[boundary_framing]]),
        insertion_boundary=((1,),),
    )


def empty_boundary_bordism(boundary_framing: int = 0) -> ExtendedBordism:
    """One bare boundary torus (no surgery, no insertions)."""
    return ExtendedBordism(
        surgery=IntSymMatrix.empty(),
        boundary_self=IntSymMatrix.from_rows([[boundary_framing]]),
    )


def cylinder_bordism() -> ExtendedBordism:
    """Two boundary tori linked once: the pairing cylinder."""
    return ExtendedBordism(
        surgery=IntSymMatrix.empty(),
        boundary_self=IntSymMatrix.from_rows([[0, 1], [1, 0]]),
    )


# ---------------------------------------------------------------------------
# Lagrangian frames and the Maslov index

def symplectic_pairing(g: int, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    """Standard symplectic form on Q^{2g}: ``w(e_i, e_{g+i}) = 1``."""
    acc = Fraction(0)
    for i in range(g):
        acc += u[i] * v[g + i] - u[g + i] * v[i]
    return acc


def _rank(columns: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(col) for col in columns]  # rank is transpose-invariant
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][c]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class LagrangianFrame:
    """A rational basis (2g x g, column-major storage) of a Lagrangian
    subspace of ``(Q^{2g}, w)``."""

    genus: int
    columns: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        g = self.genus
        cols = tuple(tuple(Fraction(x) for x in col) for col in self.columns)
        if len(cols) != g or any(len(col) != 2 * g for col in cols):
            raise NotLagrangian("frame must consist of g vectors in Q^{2g}")
        if _rank(cols) != g:
            raise NotLagrangian("frame columns are linearly dependent")
        for i in range(g):
            for j in range(i + 1, g):
                if symplectic_pairing(g, cols[i], cols[j]) != 0:
                    raise NotLagrangian("frame is not isotropic")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_columns(cls, genus: int, columns: Iterable[Iterable]) -> "LagrangianFrame":
        return cls(genus, tuple(tuple(Fraction(x) for x in col) for col in columns))

    @classmethod
    def horizontal(cls, genus: int) -> "LagrangianFrame":
        """The span of the first g basis vectors."""
        cols = []
        for i in range(genus):
            col = [Fraction(0)] * (2 * genus)
            col[i] = Fraction(1)
            cols.append(tuple(col))
        return cls(genus, tuple(cols))

    @classmethod
    def graph(cls, sym: Sequence[Sequence]) -> "LagrangianFrame":
        """Graph Lagrangian ``{(x, S x)}`` of a symmetric rational matrix."""
        g = len(sym)
        cols = []
        for i in range(g):
            col = [Fraction(0)] * (2 * g)
            col[i] = Fraction(1)
            for j in range(g):
                col[g + j] = Fraction(sym[j][i])
            cols.append(tuple(col))
        return cls(g, tuple(cols))


def maslov_index(l1: LagrangianFrame, l2: LagrangianFrame,
                 l3: LagrangianFrame) -> int:
    """Signature of the three-slot form on ``l1 + l2 + l3`` (exact)."""
    g = l1.genus
    if l2.genus != g or l3.genus != g:
        raise ValueError("frames must share one genus")
    frames = (l1.columns, l2.columns, l3.columns)
    n = 3 * g
    gram = [[Fraction(0)] * n for _ in range(n)]
    # Bilinear form of Q(x1,x2,x3) = w(x1,x2) + w(x2,x3) + w(x3,x1):
    # slot pairs (0,1) and (1,2) enter with +1/2, (0,2) with -1/2.
    for (a, b, half) in ((0, 1, Fraction(1, 2)), (1, 2, Fraction(1, 2)),
                         (0, 2, Fraction(-1, 2))):
        for i, u in enumerate(frames[a]):
            for j, v in enumerate(frames[b]):
                val = half * symplectic_pairing(g, u, v)
                gram[a * g + i][b * g + j] += val
                gram[b * g + j][a * g + i] += val
    lcm = 1
    for row in gram:
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    scaled = [[int(2 * lcm * x) for x in row] for row in gram]
    return signature(IntSymMatrix.from_rows(scaled))


def random_lagrangian(rng: random.Random, genus: int,
                      moves: int = 3) -> LagrangianFrame:
    """Seeded random rational Lagrangian: a graph frame pushed around by a
    few integral symplectic moves and a rational change of basis."""
    g = genus
    sym = [[Fraction(0)] * g for _ in range(g)]
    for i in range(g):
        for j in range(i, g):
            sym[i][j] = sym[j][i] = Fraction(rng.randint(-3, 3),
                                             rng.randint(1, 3))
    cols = [list(col) for col in LagrangianFrame.graph(sym).columns]

    def apply(mat: List[List[Fraction]]) -> None:
        for c, col in enumerate(cols):
            cols[c] = [sum(mat[i][j] * col[j] for j in range(2 * g))
                       for i in range(2 * g)]

    for _ in range(rng.randint(0, moves)):
        kind = rng.randrange(3)
        if kind == 0:
            # J: (a, b) -> (-b, a)
            mat = [[Fraction(0)] * (2 * g) for _ in range(2 * g)]
            for i in range(g):
                mat[i][g + i] = Fraction(-1)
                mat[g + i][i] = Fraction(1)
        elif kind == 1:
            # shear [[I, B], [0, I]] with B symmetric integral
            b = [[0] * g for _ in range(g)]
            for i in range(g):
                for j in range(i, g):
                    b[i][j] = b[j][i] = rng.randint(-2, 2)
            mat = [[Fraction(1 if i == j else 0) for j in range(2 * g)]
                   for i in range(2 * g)]
            for i in range(g):
                for j in range(g):
                    mat[i][g + j] = Fraction(b[i][j])
        else:
            # block-diagonal GL(g, Z) action [[A, 0], [0, A^{-T}]]
            from .surgery import random_unimodular
            from .intlinalg import integer_inverse, mat_transpose
            a = random_unimodular(rng, g, steps=3)
            a_inv_t = mat_transpose(integer_inverse(a))
            mat = [[Fraction(0)] * (2 * g) for _ in range(2 * g)]
            for i in range(g):
                for j in range(g):
                    mat[i][j] = Fraction(a[i][j])
                    mat[g + i][g + j] = Fraction(a_inv_t[i][j])
        apply(mat)

    # rational change of basis inside the subspace
    while True:
        mix = [[Fraction(rng.randint(-2, 2), rng.randint(1, 2))
                for _ in range(g)] for _ in range(g)]
        if _rank(tuple(tuple(row) for row in mix)) == g:
            break
    mixed_cols = []
    for c in range(g):
        vec = [sum(mix[r][c] * cols[r][i] for r in range(g))
               for i in range(2 * g)]
        mixed_cols.append(tuple(vec))
    return LagrangianFrame(g, tuple(mixed_cols))


# ---------------------------------------------------------------------------
# Weight bookkeeping

def walker_correct(raw: complex, n: int) -> complex:
    """Weighted correction of a closed scalar: multiply by ``e^{+pi i n/4}``."""
    return complex(raw) * unit_phase_eval(UnitPhase(Fraction(n % 8, 8)))


def compose_weights(n1: int, n2: int, mu: int) -> int:
    """Weight of a composite bordism: ``n1 + n2 + mu`` mod 8."""
    return (n1 + n2 + mu) % 8


def closure_weight(L: IntSymMatrix) -> int:
    """Default weight of a handlebody closure presented by ``L``: the
    signature of the regular block, mod 8."""
    return signature(regular_decomposition(L).regular) % 8
