"""Exact dense linear algebra over the Gaussian rationals.

Everything here is fraction-free in spirit but implemented directly over
the field CQ; sizes are tiny (rank guard 4), so clarity wins over speed.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import IrrationalSpectrum
from .series import CQ, CQ_ONE, CQ_ZERO

Matrix = list[list[CQ]]


def eye(d: int) -> Matrix:
    return [[CQ_ONE if i == j else CQ_ZERO for j in range(d)] for i in range(d)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[CQ_ZERO] * cols for _ in range(rows)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = zeros(rows, cols)
    for i in range(rows):
        for k in range(inner):
            aik = a[i][k]
            if aik.is_zero:
                continue
            for j in range(cols):
                out[i][j] = out[i][j] + aik * b[k][j]
    return out


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c: CQ) -> Matrix:
    return [[c * x for x in row] for row in a]


def mat_vec(a: Matrix, v: list[CQ]) -> list[CQ]:
    return [sum((x * y for x, y in zip(row, v)), CQ_ZERO) for row in a]


def to_complex(a: Matrix) -> np.ndarray:
    return np.array([[x.to_complex() for x in row] for row in a], dtype=complex)


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (rref, pivot column indices)."""
    a = [row[:] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if not a[i][c].is_zero), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = CQ_ONE / a[r][c]
        a[r] = [inv * x for x in a[r]]
        for i in range(rows):
            if i != r and not a[i][c].is_zero:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel(m: Matrix) -> list[list[CQ]]:
    """Basis of the right null space."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    red, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [CQ_ZERO] * cols
        v[fc] = CQ_ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(m: Matrix, rhs: list[CQ]) -> list[CQ] | None:
    """One solution of m·x = rhs, or None if inconsistent."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    aug = [m[i][:] + [rhs[i]] for i in range(rows)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [CQ_ZERO] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def solve_consistent_part(m: Matrix, rhs: list[CQ]) -> tuple[list[CQ], list[CQ]]:
    """Split rhs = m·x + resid with resid outside the image.

    Used at resonant orders where the homological equation is singular;
    any splitting works, the residual is the unremovable part.
    """
    x = solve(m, rhs)
    if x is not None:
        return x, [CQ_ZERO] * len(rhs)
    # project rhs onto the image: solve in the least-structure sense by
    # augmenting with image-basis bookkeeping
    cols = len(m[0]) if m else 0
    rows = len(m)
    # columns of m span the image; find coefficients of the best exact
    # representation by row reduction of [m | rhs] and zeroing the
    # inconsistent rows.
    aug = [m[i][:] + [rhs[i]] for i in range(rows)]
    red, pivots = rref(aug)
    x = [CQ_ZERO] * cols
    for r, pc in enumerate(pivots):
        if pc < cols:
            x[pc] = red[r][cols]
    mx = mat_vec(m, x)
    resid = [b - c for b, c in zip(rhs, mx)]
    return x, resid


def inverse(m: Matrix) -> Matrix:
    d = len(m)
    aug = [m[i][:] + eye(d)[i] for i in range(d)]
    red, pivots = rref(aug)
    if pivots != list(range(d)):
        raise ZeroDivisionError("matrix is singular")
    return [row[d:] for row in red]


def charpoly(m: Matrix) -> list[CQ]:
    """Characteristic polynomial det(T·I − m), coefficients [c_0..c_d]."""
    d = len(m)
    # Faddeev–LeVerrier: exact over a field of characteristic 0
    coeffs = [CQ_ZERO] * (d + 1)
    coeffs[d] = CQ_ONE
    mk = eye(d)
    a = m
    for k in range(1, d + 1):
        mk = mat_mul(a, mk)
        tr = sum((mk[i][i] for i in range(d)), CQ_ZERO)
        c = -(tr.scale(Fraction(1, k)))
        coeffs[d - k] = c
        for i in range(d):
            mk[i][i] = mk[i][i] + c
    return coeffs


def poly_eval(coeffs: list[CQ], x: CQ) -> CQ:
    acc = CQ_ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_deflate(coeffs: list[CQ], root: CQ) -> list[CQ]:
    """Divide by (T − root); assumes root is exact."""
    d = len(coeffs) - 1
    out = [CQ_ZERO] * d
    carry = coeffs[d]
    for k in range(d - 1, -1, -1):
        out[k] = carry
        carry = coeffs[k] + carry * root
    return out


def _rationalize(x: float, max_den: int = 10 ** 6) -> Fraction:
    return Fraction(x).limit_denominator(max_den)


def gaussian_roots(coeffs: list[CQ]) -> list[tuple[CQ, int]]:
    """All roots in Q(i) with multiplicities; raises if any root is outside.

    Candidates come from a numeric solve, acceptance is exact
    (verification by substitution plus exact deflation).
    """
    work = list(coeffs)
    while len(work) > 1 and work[-1].is_zero:
        work.pop()
    if len(work) <= 1:
        return []
    numeric = np.roots([c.to_complex() for c in reversed(work)])
    candidates = []
    for z in numeric:
        candidates.append(CQ(_rationalize(z.real), _rationalize(z.imag)))
    found: list[tuple[CQ, int]] = []
    for cand in candidates:
        if any(cand == r for r, _ in found):
            continue
        mult = 0
        while len(work) > 1 and poly_eval(work, cand).is_zero:
            work = poly_deflate(work, cand)
            mult += 1
        if mult:
            found.append((cand, mult))
    if len(work) > 1:
        raise IrrationalSpectrum(
            "spectrum leaves the Gaussian rationals "
            f"(residual factor of degree {len(work) - 1})")
    return found


def eigen_data(m: Matrix) -> list[tuple[CQ, int]]:
    """Exact eigenvalues with algebraic multiplicities."""
    return gaussian_roots(charpoly(m))


def generalized_eigenspace(m: Matrix, lam: CQ) -> list[list[CQ]]:
    d = len(m)
    shifted = [[m[i][j] - (lam if i == j else CQ_ZERO) for j in range(d)]
               for i in range(d)]
    power = eye(d)
    prev_dim = -1
    basis: list[list[CQ]] = []
    for _ in range(d):
        power = mat_mul(shifted, power)
        basis = kernel(power)
        if len(basis) == prev_dim:
            break
        prev_dim = len(basis)
    return basis


def nilpotent_partition(n: Matrix) -> list[int]:
    """Jordan partition of a nilpotent matrix from the rank sequence."""
    d = len(n)
    ranks = [d]
    power = eye(d)
    for _ in range(d):
        power = mat_mul(n, power)
        ranks.append(rank(power))
        if ranks[-1] == 0:
            break
    while len(ranks) < d + 2:
        ranks.append(0)
    # number of blocks of size >= k is ranks[k-1] - ranks[k]
    parts = []
    for k in range(1, d + 1):
        count_ge_k = ranks[k - 1] - ranks[k]
        count_ge_k1 = ranks[k] - ranks[k + 1] if k < d else 0
        exactly_k = count_ge_k - count_ge_k1
        parts.extend([k] * exactly_k)
    parts.sort(reverse=True)
    return parts


def is_nilpotent(m: Matrix) -> bool:
    cp = charpoly(m)
    return all(c.is_zero for c in cp[:-1])
