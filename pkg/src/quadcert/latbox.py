"""Exhaustive enumeration of ring-of-integers elements in an embedding box.

Target set: all c in O_K with |sigma_1(c)| <= S1 and |sigma_2(c)| <= S2 for
positive rationals S1, S2, where c = x + y*omega over the integral basis
{1, omega} (omega = sqrt(D), or (1+sqrt(D))/2 when D ≡ 1 mod 4).

Two engines:

* y-scan — walk y, intersect the two x-intervals with exact floors.  Fine
  until the y-range gets large.

* Gauss-reduced — Lagrange-reduce the basis under the box-normalized form
  F(c) = (sigma_1(c)/S1)^2 + (sigma_2(c)/S2)^2 and Fincke-Pohst the ellipse
  F <= 2, which contains the whole box.  The reduction is a unimodular
  change of basis and every bound is an outer rational bound computed in
  exact Q(sqrt(D)) arithmetic, so completeness does not depend on how good
  the reduction is.  The certificate pair boxes are astronomically skewed
  (y-ranges ~2^67 with sub-unit widths); this engine visits O(1) candidates.

Candidates are yielded as (x, y) basis coordinates after an exact box
membership test; callers apply their own exact predicates on top.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Tuple

from .qarith import QuadElem, isqrt
from .qd import QD, frac_sqrt_outer

# beyond this y-range the Gauss engine wins by orders of magnitude (the scan
# pays exact Q(sqrt(D)) interval arithmetic per y, the reduced basis pays per
# candidate line)
YSCAN_LIMIT = 1500


def omega_basis(D: int) -> QD:
    """The non-rational basis element of O_K as an exact QD value."""
    if D % 4 == 1:
        return QD(D, 1, 1, 2)
    return QD(D, 0, 1, 1)


def coords_to_elem(D: int, x: int, y: int) -> QuadElem:
    """x + y*omega as a QuadElem."""
    if D % 4 == 1:
        return QuadElem(D, 2 * x + y, y, 2)
    return QuadElem(D, x, y, 1)


def _embedding_pair(D: int, x: int, y: int) -> Tuple[QD, QD]:
    w = omega_basis(D)
    c1 = QD(D, x) + w * y
    return c1, c1.conj()


def box_enumerate_scan(D: int, S1: Fraction, S2: Fraction) -> List[Tuple[int, int]]:
    """y-scan engine.  Exact interval intersection per y; raises if the
    y-range exceeds YSCAN_LIMIT (use the Gauss engine there)."""
    w = omega_basis(D)
    wc = w.conj()
    spread = w - wc  # sqrt(D) or 2 sqrt(D) ... positive
    y_hi = (QD(D, Fraction(S1 + S2)) / spread).floor() + 1
    if y_hi > YSCAN_LIMIT:
        raise ValueError(f"y-range {y_hi} too large for the scan engine")
    nS1, pS1 = QD(D, Fraction(-S1)), QD(D, Fraction(S1))
    nS2, pS2 = QD(D, Fraction(-S2)), QD(D, Fraction(S2))
    out = []
    for y in range(-y_hi, y_hi + 1):
        # x in [-S1 - y w1, S1 - y w1] ∩ [-S2 - y w2, S2 - y w2]
        wy = w * y
        wcy = wc * y
        lo1 = (nS1 - wy).floor()
        hi1 = (pS1 - wy).floor() + 1
        lo2 = (nS2 - wcy).floor()
        hi2 = (pS2 - wcy).floor() + 1
        lo, hi = max(lo1, lo2) - 1, min(hi1, hi2) + 1
        for x in range(lo, hi + 1):
            if _in_box(D, x, y, S1, S2):
                out.append((x, y))
    out.sort()
    return out


def _in_box(D: int, x: int, y: int, S1: Fraction, S2: Fraction) -> bool:
    c1, c2 = _embedding_pair(D, x, y)
    return abs(c1) <= QD(D, Fraction(S1)) and abs(c2) <= QD(D, Fraction(S2))


def box_enumerate_gauss(D: int, S1: Fraction, S2: Fraction) -> List[Tuple[int, int]]:
    """Gauss-reduced Fincke-Pohst engine; complete for any box shape."""
    w = omega_basis(D)
    wc = w.conj()
    iS1 = QD(D, Fraction(1) / (Fraction(S1) ** 2))
    iS2 = QD(D, Fraction(1) / (Fraction(S2) ** 2))
    G11 = iS1 + iS2
    G12 = w * iS1 + wc * iS2
    G22 = w * w * iS1 + wc * wc * iS2

    def gram(p: Tuple[int, int], q: Tuple[int, int]) -> QD:
        return (G11 * (p[0] * q[0]) + G12 * (p[0] * q[1] + p[1] * q[0])
                + G22 * (p[1] * q[1]))

    u, v = (1, 0), (0, 1)
    # Lagrange/Gauss reduction; terminates because F(v) strictly decreases
    while True:
        if gram(v, v) < gram(u, u):
            u, v = v, u
        mu = (gram(u, v) / gram(u, u)).round_nearest()
        if mu != 0:
            v = (v[0] - mu * u[0], v[1] - mu * u[1])
        if not (gram(v, v) < gram(u, u)):
            break
    A, B0, C = gram(u, u), gram(u, v), gram(v, v)
    det = A * C - B0 * B0  # > 0, = ((w - w')/(S1 S2))^2
    two = QD(D, 2)
    n_max = (two * A / det).sqrt_floor()
    out = []
    for n in range(-n_max, n_max + 1):
        disc = two * A - det * (n * n)
        if disc.sign() < 0:
            continue
        # outer rational bound on sqrt(disc): an integer floor would explode
        # the m-range whenever disc < 1
        sd = QD(D, _qd_sqrt_outer(disc, 24))
        lo = ((B0 * (-n) - sd) / A).floor() - 1
        hi = ((B0 * (-n) + sd) / A).floor() + 2
        for m in range(lo, hi + 1):
            x = m * u[0] + n * v[0]
            y = m * u[1] + n * v[1]
            if _in_box(D, x, y, S1, S2):
                out.append((x, y))
    out.sort()
    return out


def box_enumerate(D: int, S1: Fraction, S2: Fraction) -> List[Tuple[int, int]]:
    """All (x, y) with x + y*omega inside the embedding box, engine chosen
    by the y-range."""
    w = omega_basis(D)
    spread = w - w.conj()
    y_hi = (QD(D, Fraction(S1) + Fraction(S2)) / spread).floor() + 1
    if y_hi <= YSCAN_LIMIT:
        return box_enumerate_scan(D, S1, S2)
    return box_enumerate_gauss(D, S1, S2)


def sqrt_embedding_bounds(beta: QuadElem, extra_bits: int = 24) -> Tuple[Fraction, Fraction]:
    """Outer rational bounds (S1, S2) on sqrt(sigma_h(beta)) for totally
    positive beta.

    sigma_2(beta) is computed as N(beta)/sigma_1(beta) through a rational
    lower bound on sigma_1, so S2 stays tight even when the conjugate is
    vanishingly small (which is exactly the certificate situation).
    """
    D = beta.D
    s1 = QD(D, Fraction(beta.a, beta.den), Fraction(beta.b, beta.den))
    if s1.sign() <= 0 or s1.conj().sign() <= 0:
        raise ValueError("beta must be totally positive")
    S1 = _qd_sqrt_outer(s1, extra_bits)
    n = Fraction(beta.norm())
    bits = extra_bits
    lo1 = s1.lower_frac(bits)
    while lo1 <= 0:  # sigma_1 smaller than the resolution: sharpen
        bits *= 2
        lo1 = s1.lower_frac(bits)
    s2_outer = n / lo1  # >= sigma_2
    S2 = frac_sqrt_outer(s2_outer, extra_bits)
    return S1, S2


def _qd_sqrt_outer(x: QD, extra_bits: int) -> Fraction:
    scale = 1 << extra_bits
    n = (x * (scale * scale)).floor()
    return Fraction(isqrt(n) + 1, scale)
