"""Meromorphic connection germs in matrix form and in elementary normal form.

A germ is a square matrix A of Puiseux series with a common ramification
index q, read as z∇_{z∂} e = e·A, i.e. connection form A·dz/z in the
basis e.  An elementary model is the decomposed shape ⊕ E^φ ⊗ R_φ with
per-φ regular data (α, Jordan partition).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import IrrationalRootOfUnity, ParseError
from .series import (CQ, CQ_ZERO, CQ_ONE, PuiseuxSeries, _as_fraction, common_ram,
                     ps_add, ps_derive, ps_eq_to_trunc, ps_from_literal, ps_mul,
                     ps_neg, ps_ramify, ps_scale, ps_sub, ps_to_literal,
                     quarter_root)

SMatrix = list[list[PuiseuxSeries]]


# -- matrices of series -------------------------------------------------

def smat_common_ram(a: SMatrix) -> tuple[SMatrix, int]:
    q = 1
    for row in a:
        for s in row:
            q = lcm(q, s.ram)
    return [[s.lift_ram(q) for s in row] for row in a], q


def smat_add(a: SMatrix, b: SMatrix) -> SMatrix:
    return [[ps_add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def smat_sub(a: SMatrix, b: SMatrix) -> SMatrix:
    return [[ps_sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def smat_mul(a: SMatrix, b: SMatrix) -> SMatrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = ps_mul(a[i][0], b[0][j])
            for k in range(1, inner):
                acc = ps_add(acc, ps_mul(a[i][k], b[k][j]))
            row.append(acc)
        out.append(row)
    return out


def smat_scale(a: SMatrix, s: PuiseuxSeries) -> SMatrix:
    return [[ps_mul(s, x) for x in row] for row in a]


def smat_derive(a: SMatrix) -> SMatrix:
    return [[ps_derive(x) for x in row] for row in a]


def smat_from_const(m, ram: int, trunc: int) -> SMatrix:
    """Lift a CQ matrix to a constant series matrix."""
    return [[PuiseuxSeries(ram, {0: x} if not x.is_zero else {}, trunc)
             for x in row] for row in m]


def smat_eye(d: int, ram: int, trunc: int) -> SMatrix:
    out = []
    for i in range(d):
        out.append([PuiseuxSeries(ram, {0: CQ_ONE} if i == j else {}, trunc)
                    for j in range(d)])
    return out


def smat_min_val(a: SMatrix) -> int | None:
    vals = [s.valuation() for row in a for s in row if s.valuation() is not None]
    return min(vals) if vals else None


def smat_min_trunc(a: SMatrix) -> int:
    return min(s.trunc for row in a for s in row)


def smat_coeff(a: SMatrix, n: int):
    """Constant CQ matrix of the coefficient of t^n."""
    return [[s.coeff(n) for s in row] for row in a]


def smat_neumann_inverse(a: SMatrix) -> SMatrix:
    """Inverse of a series matrix of the shape C·(I + T) with val(T) >= 1."""
    from . import exactla

    d = len(a)
    ram = a[0][0].ram
    trunc = smat_min_trunc(a)
    c = smat_coeff(a, 0)
    cinv = exactla.inverse(c)
    cinv_s = smat_from_const(cinv, ram, trunc)
    t = smat_sub(smat_mul(cinv_s, a), smat_eye(d, ram, trunc))
    if (smat_min_val(t) or trunc + 1) < 1:
        raise ValueError("matrix is not unipotent-plus-higher-order")
    neg_t = [[ps_neg(x) for x in row] for row in t]
    acc = smat_eye(d, ram, trunc)
    pw = smat_eye(d, ram, trunc)
    for _ in range(trunc + 1):
        pw = smat_mul(pw, neg_t)
        v = smat_min_val(pw)
        if v is None or v > trunc:
            break
        acc = smat_add(acc, pw)
    return smat_mul(acc, cinv_s)


def gauge_transform(a: SMatrix, g: SMatrix, g_inv: SMatrix | None = None) -> SMatrix:
    """A ↦ G⁻¹·A·G − G⁻¹·(z∂G)."""
    if g_inv is None:
        g_inv = smat_neumann_inverse(g)
    return smat_sub(smat_mul(g_inv, smat_mul(a, g)),
                    smat_mul(g_inv, smat_derive(g)))


# -- domain types --------------------------------------------------------

@dataclass(frozen=True)
class ConnectionGerm:
    rank: int
    ram: int
    matrix: SMatrix = field(compare=False)

    @staticmethod
    def from_matrix(matrix: SMatrix) -> "ConnectionGerm":
        m, q = smat_common_ram(matrix)
        d = len(m)
        if any(len(row) != d for row in m):
            raise ValueError("connection matrix must be square")
        return ConnectionGerm(d, q, m)


@dataclass(frozen=True)
class RegularBlockData:
    """Residue eigenvalue (normalized Re ∈ [0,1)) plus Jordan partition."""

    alpha: CQ
    partition: tuple[int, ...]
    lattice_shift: int = 0  # integer part split off during normalization

    def __post_init__(self):
        if not self.partition or any(p < 1 for p in self.partition):
            raise ValueError("partition entries must be >= 1")
        if not (0 <= self.alpha.re < 1):
            raise ValueError("alpha must be normalized to Re in [0,1)")

    @property
    def rank(self) -> int:
        return sum(self.partition)

    def monodromy(self) -> np.ndarray:
        """T = e^{−2πiα}·T_u with T_u unipotent from the partition."""
        d = self.rank
        n = np.zeros((d, d))
        pos = 0
        for p in self.partition:
            for j in range(p - 1):
                n[pos + j + 1, pos + j] = 1.0
            pos += p
        tu = np.eye(d)
        pw = np.eye(d)
        for k in range(1, d):
            pw = pw @ (2j * np.pi * n) / k
            tu = tu + pw
        lam = cmath.exp(-2j * cmath.pi * self.alpha.to_complex())
        return lam * tu

    def unit_monodromy_kernel_dim(self) -> int:
        """dim ker(T − Id): the number of Jordan blocks when α = 0."""
        return len(self.partition) if self.alpha.is_zero else 0


@dataclass(frozen=True)
class ElementaryModel:
    """⊕ E^φ ⊗ R_φ in the variable t with t^ram = z."""

    ram: int
    blocks: tuple[tuple[PuiseuxSeries, tuple[RegularBlockData, ...]], ...]

    def __post_init__(self):
        for phi, regs in self.blocks:
            if any(n >= 0 for n in phi.terms):
                raise ValueError("phi must have strictly negative support")
            if not regs:
                raise ValueError("each block needs regular data")
        phis = [phi for phi, _ in self.blocks]
        for i in range(len(phis)):
            for j in range(i + 1, len(phis)):
                if ps_eq_to_trunc(phis[i], phis[j]):
                    raise ValueError("the phi's must be pairwise distinct")

    @property
    def rank(self) -> int:
        return sum(r.rank for _, regs in self.blocks for r in regs)

    def block_ranks(self) -> list[int]:
        return [sum(r.rank for r in regs) for _, regs in self.blocks]

    def pole_orders_z(self) -> list[Fraction]:
        """Pole order of each φ in z-units (0 for φ = 0)."""
        out = []
        for phi, _ in self.blocks:
            v = phi.valuation()
            out.append(Fraction(0) if v is None else Fraction(-v, phi.ram))
        return out


def jordan_nilpotent(partition) -> list[list[CQ]]:
    """Lower-triangular Jordan Y: ones on the subdiagonal per block."""
    d = sum(partition)
    y = [[CQ_ZERO] * d for _ in range(d)]
    pos = 0
    for p in partition:
        for j in range(p - 1):
            y[pos + j + 1][pos + j] = CQ_ONE
        pos += p
    return y


# -- operations -----------------------------------------------------------

def assemble_matrix(m: ElementaryModel, trunc: int | None = None) -> ConnectionGerm:
    """Block-diagonal germ: each (φ, α, partition) gives Y + (−α + zφ′)·Id."""
    d = m.rank
    ram = m.ram
    if trunc is None:
        trunc = max((phi.trunc for phi, _ in m.blocks), default=0)
        trunc = max(trunc, 24)
    rows: SMatrix = [[PuiseuxSeries(ram, {}, trunc) for _ in range(d)]
                     for _ in range(d)]
    pos = 0
    for phi, regs in m.blocks:
        dphi = ps_derive(phi).lift_ram(ram)
        for reg in regs:
            r = reg.rank
            y = jordan_nilpotent(reg.partition)
            for i in range(r):
                for j in range(r):
                    diag = ps_sub(dphi, PuiseuxSeries(ram, {0: reg.alpha}, trunc)) \
                        if i == j else PuiseuxSeries(ram, {}, trunc)
                    entry = diag
                    if not y[i][j].is_zero:
                        entry = ps_add(entry, PuiseuxSeries(ram, {0: y[i][j]}, trunc))
                    rows[pos + i][pos + j] = entry
            pos += r
    return ConnectionGerm(d, ram, rows)


def ramified_pullback(g: ConnectionGerm, m: int) -> ConnectionGerm:
    """A_t(t) = m·A(t^m); dz/z picks up the factor m."""
    factor = CQ.of(m)
    mat = [[ps_scale(ps_ramify(s, m), factor) for s in row] for row in g.matrix]
    return ConnectionGerm.from_matrix(mat)


def twist_by_exponential(g: ConnectionGerm, phi: PuiseuxSeries) -> ConnectionGerm:
    """A + z·φ′(z)·Id (the E^φ twist)."""
    if any(n > 0 for n in phi.terms):
        raise ValueError("twist requires phi with non-positive support")
    dphi = ps_derive(phi)
    mat = [[ps_add(s, dphi) if i == j else s
            for j, s in enumerate(row)] for i, row in enumerate(g.matrix)]
    return ConnectionGerm.from_matrix(mat)


def _rotate_series(phi: PuiseuxSeries, k: int) -> PuiseuxSeries:
    """φ(t) ↦ φ(ζ^k t) with ζ = e^{2πi/q}, exactly or not at all."""
    q = phi.ram
    terms = {}
    for n, c in phi.terms.items():
        j = (k * n) % q
        if j == 0:
            terms[n] = c
            continue
        # ζ^j is Gaussian rational iff it is a fourth root of unity
        if (4 * j) % q:
            raise IrrationalRootOfUnity(
                f"rotation e^(2*pi*i*{j}/{q}) leaves the Gaussian rationals")
        terms[n] = c * quarter_root(4 * j // q)
    return PuiseuxSeries(q, terms, phi.trunc)


def sigma_pullback(m: ElementaryModel, k: int) -> ElementaryModel:
    """Pull back along t ↦ ζ^k t; regular data carried along."""
    q = m.ram
    if not 0 <= k < q:
        raise ValueError("k must satisfy 0 <= k < ram")
    blocks = tuple((_rotate_series(phi.lift_ram(q), k), regs)
                   for phi, regs in m.blocks)
    return ElementaryModel(q, blocks)


def _rotation_matches(phi_a: PuiseuxSeries, phi_b: PuiseuxSeries, k: int) -> bool:
    """Exact check of φ_b = φ_a∘σ^k, staying symbolic about roots of unity."""
    a, b = common_ram(phi_a, phi_b)
    q = a.ram
    n_max = min(a.trunc, b.trunc)
    for n in set(a.terms) | set(b.terms):
        if n > n_max:
            continue
        ca, cb = a.coeff(n), b.coeff(n)
        j = (k * n) % q
        if j == 0:
            if not (ca - cb).is_zero:
                return False
        elif (4 * j) % q == 0:
            if not (ca * quarter_root(4 * j // q) - cb).is_zero:
                return False
        else:
            # ζ^j is irrational; two Gaussian-rational coefficients can
            # only be related by it when both vanish
            if not (ca.is_zero and cb.is_zero):
                return False
    return True


@dataclass(frozen=True)
class DescentCertificate:
    descends: bool
    permutations: tuple[tuple[int, ...], ...] = ()
    orphans: tuple[int, ...] = ()


def descends_to_base(m: ElementaryModel) -> DescentCertificate:
    """Certificate that σ-pullback permutes the blocks, or a refusal.

    Succeeds iff the φ-set is stable under φ ↦ φ∘σ^k for every k, with
    matching regular data; the permutation per power of σ is returned.
    """
    q = m.ram
    n = len(m.blocks)
    perms = []
    orphans: set[int] = set()
    for k in range(q):
        perm = []
        for i, (phi_i, regs_i) in enumerate(m.blocks):
            target = None
            for j, (phi_j, regs_j) in enumerate(m.blocks):
                if regs_i == regs_j and _rotation_matches(phi_i, phi_j, k):
                    target = j
                    break
            if target is None:
                orphans.add(i)
                perm.append(-1)
            else:
                perm.append(target)
        if -1 not in perm and sorted(perm) != list(range(n)):
            # collision: not a permutation
            for i in range(n):
                if perm.count(perm[i]) > 1:
                    orphans.add(i)
        perms.append(tuple(perm))
    if orphans:
        return DescentCertificate(False, orphans=tuple(sorted(orphans)))
    return DescentCertificate(True, permutations=tuple(perms))


# -- connection spec files -------------------------------------------------

def _alpha_from_spec(val) -> CQ:
    if isinstance(val, (list, tuple)) and len(val) == 2:
        return CQ(_as_fraction(val[0]), _as_fraction(val[1]))
    return CQ(_as_fraction(val), Fraction(0))


def germ_or_model_from_dict(doc):
    """Parse a connection spec dict into a germ or an elementary model."""
    try:
        form = doc["form"]
    except (TypeError, KeyError) as exc:
        raise ParseError("connection spec needs a 'form' field") from exc
    if form == "matrix":
        try:
            rank = int(doc["rank"])
            matrix = [[ps_from_literal(lit) for lit in row]
                      for row in doc["matrix"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad matrix spec: {exc}") from exc
        if len(matrix) != rank or any(len(r) != rank for r in matrix):
            raise ParseError("matrix shape does not match the declared rank")
        return ConnectionGerm.from_matrix(matrix)
    if form == "elementary":
        try:
            ram = int(doc.get("ram", 1))
            blocks = []
            for blk in doc["blocks"]:
                phi = ps_from_literal(blk["phi"])
                regs = tuple(
                    RegularBlockData(_alpha_from_spec(r["alpha"]),
                                     tuple(int(p) for p in r["partition"]))
                    for r in blk["regs"])
                blocks.append((phi, regs))
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad elementary spec: {exc}") from exc
        try:
            return ElementaryModel(ram, tuple(blocks))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown form {form!r}")


def model_to_dict(m: ElementaryModel) -> dict:
    return {
        "form": "elementary",
        "ram": m.ram,
        "blocks": [
            {
                "phi": ps_to_literal(phi),
                "regs": [
                    {
                        "alpha": [[r.alpha.re.numerator, r.alpha.re.denominator],
                                  [r.alpha.im.numerator, r.alpha.im.denominator]],
                        "partition": list(r.partition),
                    }
                    for r in regs
                ],
            }
            for phi, regs in m.blocks
        ],
    }
