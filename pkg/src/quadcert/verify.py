"""Independent certificate verification.

Everything is recomputed from the certificate's (D, sequence, k, indices):
the expansion round trip, witness values, every pair enumeration, and the
squarefree status at the stated mode.  Stored bounds and candidate counts
are never trusted.  The enumeration here is a separate implementation from
the generation side: directed-rounding rational intervals around sqrt(D)
drive the reduction and the Fincke-Pohst bounds, and only the final
membership/succeq filters use exact integer sign tests.  Shared with
generation is nothing beyond the exact-arithmetic kernel (integer sqrt,
squarefree classifier).

Checks run cheapest-first so that tampered certificates are rejected before
the expensive squarefree recomputation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor, isqrt
from typing import List, Optional, Tuple

from .qarith import SquarefreeUndetermined, squarefree_status
from .qd import frac_sqrt_outer


class MalformedCertificate(Exception):
    """Certificate cannot be parsed against the schema (exit code 2)."""


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Optional[str] = None


_DEC_RE = re.compile(r"^-?\d+$")


def _dec(obj, key, positive=True) -> int:
    v = obj.get(key)
    if not isinstance(v, str) or not _DEC_RE.match(v):
        raise MalformedCertificate(f"field {key!r} must be a decimal string")
    n = int(v)
    if positive and n < 1:
        raise MalformedCertificate(f"field {key!r} must be positive")
    return n


def _vsign(a: int, b: int, D: int) -> int:
    """Sign of a + b*sqrt(D), exact."""
    if a == 0 and b == 0:
        return 0
    if a >= 0 and b >= 0:
        return 1
    if a <= 0 and b <= 0:
        return -1
    if a > 0:
        return 1 if a * a > b * b * D else -1
    return 1 if a * a < b * b * D else -1


# ---------------------------------------------------------------------------
# rational intervals
# ---------------------------------------------------------------------------

def _iv_add(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _iv_neg(x):
    return (-x[1], -x[0])


def _iv_mul(x, y):
    ps = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
    return (min(ps), max(ps))


def _iv_scale(x, c: int):
    if c >= 0:
        return (x[0] * c, x[1] * c)
    return (x[1] * c, x[0] * c)


def _iv_sq(x):
    if x[0] >= 0:
        return (x[0] * x[0], x[1] * x[1])
    if x[1] <= 0:
        return (x[1] * x[1], x[0] * x[0])
    return (Fraction(0), max(x[0] * x[0], x[1] * x[1]))


def _sqrtD_interval(D: int, prec_bits: int) -> Tuple[Fraction, Fraction]:
    s = 1 << prec_bits
    r = isqrt(D * s * s)
    return Fraction(r, s), Fraction(r + 1, s)


# ---------------------------------------------------------------------------
# verifier-side box enumeration
# ---------------------------------------------------------------------------

def _vbox_enumerate(D: int, S1: Fraction, S2: Fraction) -> List[Tuple[int, int]]:
    """All (x, y) with |sigma_h(x + y*omega)| <= S_h; interval-driven.

    The reduction uses midpoint Gram values (any unimodular basis is valid);
    the enumeration bounds use interval endpoints, so completeness never
    depends on the approximation quality.
    """
    prec = 96
    while True:
        got = _vbox_attempt(D, S1, S2, prec)
        if got is not None:
            return got
        prec *= 2
        if prec > 100_000:  # cannot happen: det interval tightens linearly
            raise AssertionError("interval precision runaway")


def _vbox_attempt(D, S1, S2, prec):
    half = D % 4 == 1
    glo, ghi = _sqrtD_interval(D, prec)
    if half:
        w = ((1 + glo) / 2, (1 + ghi) / 2)
        wc = ((1 - ghi) / 2, (1 - glo) / 2)
    else:
        w = (glo, ghi)
        wc = (-ghi, -glo)
    inv1 = 1 / (S1 * S1)
    inv2 = 1 / (S2 * S2)
    G11 = (inv1 + inv2, inv1 + inv2)
    G12 = _iv_add((w[0] * inv1, w[1] * inv1), (wc[0] * inv2, wc[1] * inv2))
    w2 = _iv_sq(w)
    wc2 = _iv_sq(wc)
    G22 = _iv_add((w2[0] * inv1, w2[1] * inv1), (wc2[0] * inv2, wc2[1] * inv2))

    def gram_iv(p, q):
        out = _iv_scale(G11, p[0] * q[0])
        out = _iv_add(out, _iv_scale(G12, p[0] * q[1] + p[1] * q[0]))
        return _iv_add(out, _iv_scale(G22, p[1] * q[1]))

    def mid(x):
        return (x[0] + x[1]) / 2

    u, v = (1, 0), (0, 1)
    for _ in range(512):
        if mid(gram_iv(v, v)) < mid(gram_iv(u, u)):
            u, v = v, u
        den = mid(gram_iv(u, u))
        if den <= 0:
            break  # degenerate midpoint; rigorous bounds below stay valid
        mu = floor(mid(gram_iv(u, v)) / den + Fraction(1, 2))
        if mu == 0:
            break
        v = (v[0] - mu * u[0], v[1] - mu * u[1])
    if mid(gram_iv(v, v)) < mid(gram_iv(u, u)):
        u, v = v, u
    A = gram_iv(u, u)
    B0 = gram_iv(u, v)
    C = gram_iv(v, v)
    babs = max(abs(B0[0]), abs(B0[1]))
    det_lo = A[0] * C[0] - babs * babs
    if det_lo <= 0:
        return None  # precision too low for a rigorous determinant bound
    n_max = floor(frac_sqrt_outer(2 * A[1] / det_lo)) + 1
    out = []
    for n in range(-n_max, n_max + 1):
        disc_hi = 2 * A[1] - det_lo * n * n
        if disc_hi < 0:
            continue
        sd = frac_sqrt_outer(disc_hi)
        num_lo = min(-B0[0] * n, -B0[1] * n) - sd
        num_hi = max(-B0[0] * n, -B0[1] * n) + sd
        m_lo = floor(min(num_lo / A[0], num_lo / A[1])) - 1
        m_hi = floor(max(num_hi / A[0], num_hi / A[1])) + 2
        for m in range(m_lo, m_hi + 1):
            x = m * u[0] + n * v[0]
            y = m * u[1] + n * v[1]
            if _v_in_box(D, half, x, y, S1, S2):
                out.append((x, y))
    out.sort()
    return out


def _v_in_box(D, half, x, y, S1: Fraction, S2: Fraction) -> bool:
    # coordinates of x + y*omega over sqrt(D), scaled integral: (a + b sqrt D)/dn
    if half:
        a, b, dn = 2 * x + y, y, 2
    else:
        a, b, dn = x, y, 1
    for (bnd, bb) in ((S1, b), (S2, -b)):
        n, d = bnd.numerator, bnd.denominator
        # need |a + bb*sqrt(D)| * d <= n * dn
        if _vsign(n * dn - d * a, -d * bb, D) < 0:
            return False
        if _vsign(n * dn + d * a, d * bb, D) < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# verifier-side expansion and convergents
# ---------------------------------------------------------------------------

def _v_expand(D: int, cap: int):
    """(k, period) of sqrt(D), aborting with None once len > cap."""
    k = isqrt(D)
    if k * k == D or D < 2:
        return None
    m, d, a = 0, 1, k
    period = []
    while True:
        m = d * a - m
        d = (D - m * m) // d
        a = (k + m) // d
        period.append(a)
        if d == 1:
            return k, period
        if len(period) > cap:
            return None


def _v_convergents(k: int, period: List[int], upto: int):
    """p_i, q_i for i = 0..upto with cyclic partial quotients."""
    s = len(period)
    ps, qs = [k], [1]
    p_prev, q_prev = 1, 0
    for i in range(1, upto + 1):
        u = period[(i - 1) % s]
        ps.append(u * ps[-1] + p_prev)
        qs.append(u * qs[-1] + q_prev)
        p_prev, q_prev = ps[-2], qs[-2]
    return ps, qs


# ---------------------------------------------------------------------------
# the verifier
# ---------------------------------------------------------------------------

_ALLOWED_SOUNDNESS = ("proved", "conditional")


def _parse_structure(obj) -> dict:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise MalformedCertificate(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedCertificate("certificate must be a JSON object")
    for key in ("version", "sequence", "k", "D", "squarefree", "M",
                "witnesses", "pairs", "conclusion"):
        if key not in obj:
            raise MalformedCertificate(f"missing field {key!r}")
    if obj["version"] != 1:
        raise MalformedCertificate(f"unsupported version {obj['version']!r}")
    if not isinstance(obj["sequence"], list) or not all(
            isinstance(u, str) and _DEC_RE.match(u) for u in obj["sequence"]):
        raise MalformedCertificate("sequence must be a list of decimal strings")
    if not isinstance(obj["M"], int):
        raise MalformedCertificate("M must be an integer")
    sf = obj["squarefree"]
    if not isinstance(sf, dict) or "mode" not in sf or "verdict" not in sf:
        raise MalformedCertificate("squarefree block must carry mode and verdict")
    if sf["mode"] not in ("exact", "probable"):
        raise MalformedCertificate(f"unknown squarefree mode {sf['mode']!r}")
    if not isinstance(obj["witnesses"], list) or not isinstance(obj["pairs"], list):
        raise MalformedCertificate("witnesses and pairs must be lists")
    for w in obj["witnesses"]:
        if not isinstance(w, dict) or not isinstance(w.get("i"), int):
            raise MalformedCertificate("witness entries need integer index i")
        _dec(w, "p")
        _dec(w, "q")
    for p in obj["pairs"]:
        if not isinstance(p, dict) or not isinstance(p.get("i"), int) \
                or not isinstance(p.get("j"), int) \
                or not isinstance(p.get("violators"), list):
            raise MalformedCertificate("pair entries need i, j, violators")
    concl = obj["conclusion"]
    if not isinstance(concl, dict) or not isinstance(concl.get("excluded_rank_le"), int) \
            or not isinstance(concl.get("soundness"), str):
        raise MalformedCertificate("conclusion needs excluded_rank_le and soundness")
    return obj


def verify_certificate(obj) -> Verdict:
    """Recompute everything; accept only a fully consistent, violator-free
    certificate.  Raises MalformedCertificate for schema-level breakage."""
    obj = _parse_structure(obj)
    D = _dec(obj, "D")
    k = _dec(obj, "k")
    seq = [int(u) for u in obj["sequence"]]
    if any(u < 1 for u in seq):
        return Verdict(False, "sequence entries must be positive")
    if any(seq[t] != seq[len(seq) - 1 - t] for t in range(len(seq))):
        return Verdict(False, "sequence is not symmetric")

    # cheap field checks
    kk = isqrt(D)
    if kk * kk == D:
        return Verdict(False, f"D = {D} is a perfect square")
    if kk != k:
        return Verdict(False, f"k = {k} is not floor(sqrt(D))")

    # round trip with a step cap: a tampered D fails in O(len(seq)) steps
    expanded = _v_expand(D, cap=len(seq) + 1)
    if expanded is None:
        return Verdict(False, "expansion of sqrt(D) does not match the stated period")
    _, period = expanded
    if period != seq + [2 * k]:
        return Verdict(False, "expansion of sqrt(D) does not match the stated period")

    # conclusion consistency (cross-field, no recompute needed)
    M = obj["M"]
    concl = obj["conclusion"]
    soundness = concl["soundness"]
    if soundness not in _ALLOWED_SOUNDNESS:
        return Verdict(False, f"soundness {soundness!r} is not acceptable")
    wits = obj["witnesses"]
    if len(wits) != M + 1:
        return Verdict(False, f"expected {M + 1} witnesses, found {len(wits)}")
    if concl["excluded_rank_le"] != len(wits) - 1:
        return Verdict(False, "excluded rank does not match the witness count")
    sf = obj["squarefree"]
    if soundness == "proved" and not (sf["mode"] == "exact" and sf["verdict"] == "squarefree-proved"):
        return Verdict(False, "proved conclusion requires an exact squarefree proof")
    if soundness == "conditional" and sf["verdict"] != "probably-squarefree":
        return Verdict(False, "conditional conclusion requires a probable squarefree verdict")

    # witnesses: indices odd ascending, values recomputed
    idx = [w["i"] for w in wits]
    if any(i < 1 or i % 2 == 0 for i in idx) or sorted(set(idx)) != idx:
        return Verdict(False, f"witness indices must be distinct ascending odd: {idx}")
    ps, qs = _v_convergents(k, period, idx[-1])
    for w in wits:
        i = w["i"]
        if ps[i] != _dec(w, "p") or qs[i] != _dec(w, "q"):
            return Verdict(False, f"witness alpha_{i} does not match the convergent")
        # totally positive: p - q*sqrt(D) > 0 for odd i
        if _vsign(ps[i], -qs[i], D) <= 0 or _vsign(ps[i], qs[i], D) <= 0:
            return Verdict(False, f"witness alpha_{i} is not totally positive")

    # pairs: complete coverage, independently re-enumerated, violator-free
    want_pairs = {(idx[a], idx[b]) for a in range(len(idx)) for b in range(a + 1, len(idx))}
    got_pairs = {(p["i"], p["j"]) for p in obj["pairs"]}
    if want_pairs != got_pairs or len(obj["pairs"]) != len(want_pairs):
        return Verdict(False, "pair list does not cover exactly all witness pairs")
    for p in obj["pairs"]:
        if p["violators"]:
            return Verdict(False, f"pair ({p['i']},{p['j']}) carries stored violators")
    glo, ghi = _sqrtD_interval(D, 64)
    for p in obj["pairs"]:
        i, j = p["i"], p["j"]
        bx = 4 * (ps[i] * ps[j] + qs[i] * qs[j] * D)
        by = 4 * (ps[i] * qs[j] + ps[j] * qs[i])
        nb = bx * bx - by * by * D  # N(beta) > 0: both witnesses totally positive
        hi1 = Fraction(bx) + Fraction(by) * ghi
        lo1 = Fraction(bx) + Fraction(by) * glo
        S1 = frac_sqrt_outer(hi1, 20)
        S2 = frac_sqrt_outer(Fraction(nb) / lo1, 20)
        viol = _v_violators(D, bx, by, S1, S2)
        if viol:
            return Verdict(False, f"pair ({i},{j}) has violators: {viol[:3]}")

    # squarefree recomputation (the expensive step, deliberately last)
    mode = sf["mode"]
    bound = int(sf.get("bound", 10 ** 7))
    try:
        re_sf = squarefree_status(D, mode=mode, bound=bound)
    except SquarefreeUndetermined:
        return Verdict(False, "squarefree status cannot be re-established")
    if re_sf.verdict != sf["verdict"]:
        return Verdict(False, f"squarefree verdict mismatch: recomputed {re_sf.verdict}")
    return Verdict(True, None)


def _v_violators(D: int, bx: int, by: int, S1: Fraction, S2: Fraction):
    """Nonzero c in the box with 4*a_i*a_j ⪰ c^2, by exact comparison."""
    half = D % 4 == 1
    out = []
    for x, y in _vbox_enumerate(D, S1, S2):
        if x == 0 and y == 0:
            continue
        if half:
            ca, cb, cd = 2 * x + y, y, 2
        else:
            ca, cb, cd = x, y, 1
        dd = cd * cd
        # beta - c^2 componentwise over denominator dd
        ra = bx * dd - (ca * ca + cb * cb * D)
        rb = by * dd - 2 * ca * cb
        s1 = _vsign(ra, rb, D)
        s2 = _vsign(ra, -rb, D)
        if (s1 > 0 and s2 > 0) or (s1 == 0 and s2 == 0):
            out.append((ca, cb, cd))
    return out


def verify_file(path: str) -> Verdict:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return verify_certificate(text)
