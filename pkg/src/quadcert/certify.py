"""Certificates that Q(sqrt(D)) admits no low-rank universal form.

A certificate packages a field (found through the Friesen machinery), a set
of totally positive witnesses alpha_{i_1}, ..., alpha_{i_w} from the
continued fraction of sqrt(D), and, for every pair, an exhaustive
enumeration of all c in O_K with sigma_h(c)^2 <= sigma_h(4 a_i a_j) showing
that no nonzero c satisfies 4 a_i a_j ⪰ c^2.  By the orthogonality argument
this excludes universal totally positive forms (and free O_K-lattices) of
rank <= w-1.  Soundness rests on the enumeration alone, never on the growth
of the constructed period.

Also here: exact total-positive-definiteness checks for n-ary forms over
O_K, an exhaustive representability decider, and the generator of all
totally positive integers up to a trace bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .contfrac import SurdExpansion, convergents, expand_sqrt
from .friesen import SymSequence, admissible_k, construct_sequence, derive_D
from .latbox import box_enumerate, coords_to_elem, omega_basis, sqrt_embedding_bounds
from .qarith import (
    QuadElem,
    SquarefreeStatus,
    SquarefreeUndetermined,
    format_elem,
    parse_elem,
    squarefree_status,
    succeq,
)
from .qd import QD, sqrt_in_field

CERT_VERSION = 1


class CertificateError(Exception):
    pass


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessSet:
    D: int
    indices: Tuple[int, ...]
    witnesses: Tuple[QuadElem, ...]


def select_witnesses(
    e: SurdExpansion,
    M: int,
    indices: Optional[Sequence[int]] = None,
    force: bool = False,
) -> WitnessSet:
    """M+1 totally positive convergent elements, default alpha_1, ..., alpha_{2M+1}.

    Indices must be odd and <= r unless force is set (forcing is how the
    negative controls are built; enumeration, not index placement, carries
    soundness).
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    idx = tuple(indices) if indices is not None else tuple(range(1, 2 * M + 2, 2))
    if len(idx) != len(set(idx)) or any(i < 1 or i % 2 == 0 for i in idx):
        raise ValueError(f"witness indices must be distinct odd positives: {idx}")
    if tuple(sorted(idx)) != idx:
        raise ValueError("witness indices must be ascending")
    if not force and idx[-1] > e.r:
        raise CertificateError(
            f"period too short: index {idx[-1]} > r = {e.r} for D = {e.D}"
        )
    cs = convergents(e, idx[-1] + 1)
    ws = tuple(QuadElem(e.D, cs[i].p, cs[i].q) for i in idx)
    for w in ws:
        assert w.is_totally_positive()
    return WitnessSet(D=e.D, indices=idx, witnesses=ws)


# ---------------------------------------------------------------------------
# pair refutation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairCheck:
    i: int
    j: int
    beta: QuadElem
    s1_bound: Fraction
    s2_bound: Fraction
    candidates_tested: int
    violators: Tuple[QuadElem, ...]
    doubling_clean: bool


def _box_violators(D: int, beta: QuadElem, S1: Fraction, S2: Fraction):
    pts = box_enumerate(D, S1, S2)
    assert (0, 0) in pts, "origin must always be a candidate"
    violators = []
    for x, y in pts:
        if x == 0 and y == 0:
            continue
        c = coords_to_elem(D, x, y)
        if succeq(beta, c * c):
            violators.append(c)
    violators.sort(key=lambda c: (c.a, c.b, c.den))
    return len(pts), tuple(violators)


def pair_refute(D: int, a: QuadElem, b: QuadElem, audit_doubling: bool = True,
                i: int = -1, j: int = -1) -> PairCheck:
    """Exhaustively enumerate c in O_K with sigma_h(c)^2 <= sigma_h(4ab), h = 1, 2.

    Returns every nonzero c with 4ab ⪰ c^2 (the equality branch counts).
    The doubling audit repeats the enumeration with both windows doubled and
    records that nothing new appeared.
    """
    if a.D != D or b.D != D:
        raise ValueError("witness field mismatch")
    if not (a.is_totally_positive() and b.is_totally_positive()):
        raise ValueError("pair_refute needs totally positive inputs")
    beta = a * b * 4
    S1, S2 = sqrt_embedding_bounds(beta)
    tested, violators = _box_violators(D, beta, S1, S2)
    clean = True
    if audit_doubling:
        _, v2 = _box_violators(D, beta, 2 * S1, 2 * S2)
        clean = v2 == violators
    return PairCheck(i=i, j=j, beta=beta, s1_bound=S1, s2_bound=S2,
                     candidates_tested=tested, violators=violators,
                     doubling_clean=clean)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    version: int
    seq: SymSequence
    k: int
    D: int
    squarefree: SquarefreeStatus
    M: int
    witness_set: WitnessSet
    pair_checks: Tuple[PairCheck, ...]
    excluded_rank_le: int
    soundness: str  # 'proved' | 'conditional' | 'refuted'

    @property
    def refuted(self) -> bool:
        return any(p.violators for p in self.pair_checks)

    def conclusion_text(self) -> str:
        if self.soundness == "refuted":
            return (f"REFUTED: the chosen witnesses over Q(sqrt({self.D})) admit "
                    f"nonzero c with 4*a_i*a_j ⪰ c^2")
        cond = "" if self.soundness == "proved" else " (conditional on D being squarefree)"
        return (f"Q(sqrt({self.D})) admits no universal totally positive quadratic "
                f"form or O_K-lattice of rank <= {self.excluded_rank_le}{cond}")

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "sequence": [str(u) for u in self.seq.values],
            "k": str(self.k),
            "D": str(self.D),
            "squarefree": self.squarefree.to_json(),
            "M": self.M,
            "witnesses": [
                {"i": i, "p": str(w.a), "q": str(w.b)}
                for i, w in zip(self.witness_set.indices, self.witness_set.witnesses)
            ],
            "pairs": [
                {
                    "i": p.i,
                    "j": p.j,
                    "candidates": p.candidates_tested,
                    "violators": [format_elem(c) for c in p.violators],
                }
                for p in self.pair_checks
            ],
            "conclusion": {
                "excluded_rank_le": self.excluded_rank_le,
                "soundness": self.soundness,
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def certificate_from_json(obj: dict) -> Certificate:
    """Inverse of Certificate.to_json (generation-side convenience; the
    verifier does its own parsing)."""
    seq = SymSequence(tuple(int(u) for u in obj["sequence"]))
    D = int(obj["D"])
    k = int(obj["k"])
    ws = []
    idx = []
    for w in obj["witnesses"]:
        idx.append(int(w["i"]))
        ws.append(QuadElem(D, int(w["p"]), int(w["q"])))
    pcs = []
    for p in obj["pairs"]:
        viol = tuple(parse_elem(v, D) for v in p["violators"])
        pcs.append(PairCheck(i=int(p["i"]), j=int(p["j"]), beta=QuadElem(D, 0, 0),
                             s1_bound=Fraction(0), s2_bound=Fraction(0),
                             candidates_tested=int(p["candidates"]),
                             violators=viol, doubling_clean=True))
    return Certificate(
        version=int(obj["version"]),
        seq=seq,
        k=k,
        D=D,
        squarefree=SquarefreeStatus.from_json(obj["squarefree"]),
        M=int(obj["M"]),
        witness_set=WitnessSet(D=D, indices=tuple(idx), witnesses=tuple(ws)),
        pair_checks=tuple(pcs),
        excluded_rank_le=int(obj["conclusion"]["excluded_rank_le"]),
        soundness=obj["conclusion"]["soundness"],
    )


def build_certificate(
    M: int,
    base: str = "minimal",
    k_search: int = 64,
    sf_mode: Optional[str] = None,
    sf_bound: int = 10 ** 7,
    rho_budget: int = 40_000_000,
    force_D: Optional[int] = None,
    indices: Optional[Sequence[int]] = None,
    threads: int = 1,
) -> Certificate:
    """Construct -> k-search -> witnesses -> all pair refutations.

    sf_mode defaults to 'exact' for M = 1 and 'probable' for M >= 2 (those D
    run to hundreds of digits).  force_D skips the construction and builds
    the certificate for the given field; combined with explicit indices this
    produces the negative controls.  Pair checks are independent and may run
    on a thread pool; assembly stays deterministic.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if sf_mode is None:
        sf_mode = "exact" if M == 1 else "probable"
    if force_D is not None:
        e = expand_sqrt(force_D)
        seq = SymSequence(e.period[:-1])
        k, D = e.k, force_D
        sf = squarefree_status(D, mode=sf_mode, bound=sf_bound, rho_budget=rho_budget)
    else:
        seq = construct_sequence(M, base)
        prog = admissible_k(seq)
        if prog is None:
            raise CertificateError(f"sequence {seq} admits no k at all")
        k0, step = prog
        k = D = None
        sf = None
        for t in range(k_search):
            kc = k0 + t * step
            Dc = derive_D(kc, seq)
            if Dc is None:
                continue
            try:
                sfc = squarefree_status(Dc, mode=sf_mode, bound=sf_bound,
                                        rho_budget=rho_budget)
            except SquarefreeUndetermined:
                continue
            if sfc.verdict == "not-squarefree":
                continue
            k, D, sf = kc, Dc, sfc
            break
        if D is None:
            raise CertificateError(
                f"no admissible squarefree field within {k_search} progression steps"
            )
        e = expand_sqrt(D, max_steps=seq.s + 1)
    wset = select_witnesses(e, M, indices=indices, force=force_D is not None)
    jobs = list(combinations(zip(wset.indices, wset.witnesses), 2))
    if threads > 1 and len(jobs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            pairs = list(ex.map(
                lambda j: pair_refute(D, j[0][1], j[1][1], i=j[0][0], j=j[1][0]),
                jobs,
            ))
    else:
        pairs = [pair_refute(D, a, b, i=ii, j=jj) for (ii, a), (jj, b) in jobs]
    pairs.sort(key=lambda p: (p.i, p.j))
    refuted = any(p.violators for p in pairs)
    if refuted:
        soundness = "refuted"
    elif sf.proved:
        soundness = "proved"
    else:
        soundness = "conditional"
    return Certificate(
        version=CERT_VERSION,
        seq=seq,
        k=k,
        D=D,
        squarefree=sf,
        M=M,
        witness_set=wset,
        pair_checks=tuple(pairs),
        excluded_rank_le=len(wset.witnesses) - 1,
        soundness=soundness,
    )


# ---------------------------------------------------------------------------
# quadratic forms over O_K and the representability decider
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticForm:
    """Q(x) = sum_{i<=j} a_ij x_i x_j with a_ij in O_K; Gram b_ij = a_ij/2."""

    D: int
    n: int
    coeffs: Tuple[Tuple[int, int, QuadElem], ...]  # (i, j, a_ij), 1-based, i <= j

    def coeff(self, i: int, j: int) -> QuadElem:
        if i > j:
            i, j = j, i
        for a, b, c in self.coeffs:
            if (a, b) == (i, j):
                return c
        return QuadElem(self.D, 0, 0)

    def gram(self) -> List[List[QD]]:
        """Exact Gram matrix over Q(sqrt(D)); off-diagonal entries are halved."""
        B = [[QD(self.D, 0) for _ in range(self.n)] for _ in range(self.n)]
        for i in range(1, self.n + 1):
            for j in range(i, self.n + 1):
                c = self.coeff(i, j)
                v = QD(self.D, Fraction(c.a, c.den), Fraction(c.b, c.den))
                if i == j:
                    B[i - 1][i - 1] = v
                else:
                    half = v * Fraction(1, 2)
                    B[i - 1][j - 1] = half
                    B[j - 1][i - 1] = half
        return B

    def evaluate(self, v: Sequence[QuadElem]) -> QuadElem:
        if len(v) != self.n:
            raise ValueError("vector length mismatch")
        total = QuadElem(self.D, 0, 0)
        for i in range(1, self.n + 1):
            for j in range(i, self.n + 1):
                c = self.coeff(i, j)
                if c.a == 0 and c.b == 0:
                    continue
                total = total + c * v[i - 1] * v[j - 1]
        return total

    def is_totally_positive_definite(self) -> bool:
        """All leading principal minors positive under both embeddings, exactly."""
        B = self.gram()
        for t in range(1, self.n + 1):
            d = _qd_det([row[:t] for row in B[:t]])
            if d.sign() <= 0 or d.conj().sign() <= 0:
                return False
        return True


def _qd_det(M: List[List[QD]]) -> QD:
    """Determinant by fraction-free-ish Gaussian elimination over Q(sqrt(D))."""
    n = len(M)
    M = [row[:] for row in M]
    det = None
    sign_flips = 0
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not M[r][col].is_zero():
                piv = r
                break
        if piv is None:
            return M[0][0] * 0
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            sign_flips ^= 1
        for r in range(col + 1, n):
            f = M[r][col] / M[col][col]
            M[r] = [M[r][c] - f * M[col][c] for c in range(n)]
    det = M[0][0]
    for t in range(1, n):
        det = det * M[t][t]
    return -det if sign_flips else det


def _qd_matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(m)), A[0][0] * 0) for j in range(p)]
            for i in range(n)]


def _qd_inverse(M: List[List[QD]]) -> List[List[QD]]:
    n = len(M)
    aug = [row[:] + [QD(row[0].D, 1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if not aug[r][col].is_zero())
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = aug[col][col].inverse()
        aug[col] = [v * inv_p for v in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class RepresentResult:
    status: str  # 'found' | 'impossible'
    vector: Optional[Tuple[QuadElem, ...]]
    candidates_per_coordinate: Tuple[int, ...]
    nodes_visited: int


def _elem_to_qd(x: QuadElem) -> QD:
    return QD(x.D, Fraction(x.a, x.den), Fraction(x.b, x.den))


def _qd_to_elem(x: QD) -> Optional[QuadElem]:
    """QD -> O_K element, or None when not an algebraic integer."""
    D = x.D
    if x.q == 1:
        return QuadElem(D, x.a, x.b, 1)
    if x.q == 2 and D % 4 == 1 and (x.a - x.b) % 2 == 0:
        return QuadElem(D, x.a, x.b, 2)
    return None


def totally_positive_up_to(D: int, trace_bound: int) -> List[QuadElem]:
    """All totally positive integers of O_K with trace <= trace_bound,
    sorted by (trace, norm)."""
    if trace_bound < 1:
        raise ValueError("trace_bound must be >= 1")
    out = []
    # den = 1: trace 2a; totally positive <=> a >= 1 and a^2 > b^2 D
    for a in range(1, trace_bound // 2 + 1):
        bmax = 0 if a * a <= D else _isqrt_floor((a * a - 1) // D)
        for b in range(-bmax, bmax + 1):
            x = QuadElem(D, a, b, 1)
            assert x.is_totally_positive()
            out.append(x)
    if D % 4 == 1:
        for a in range(1, trace_bound + 1, 2):
            bmax = 0 if a * a <= D else _isqrt_floor((a * a - 1) // D)
            for b in range(-bmax, bmax + 1):
                if b % 2 == 0 or b == 0:
                    continue
                x = QuadElem(D, a, b, 2)
                assert x.is_totally_positive()
                out.append(x)
    out.sort(key=lambda x: (x.trace(), x.norm(), x.a, x.b))
    return out


def _isqrt_floor(n: int) -> int:
    from .qarith import isqrt

    return isqrt(n) if n >= 0 else 0


def decide_represent(form: QuadraticForm, target: QuadElem) -> RepresentResult:
    """Exhaustive decision of Q(v) = target over O_K^n.

    Coordinate boxes come from the exact inverse Gram per embedding:
    sigma_h(x_t)^2 <= sigma_h(target) * (B^(h)^-1)_tt, outer-rounded.  The
    search runs depth-first with exact Schur-complement pruning; the last
    coordinate is solved algebraically rather than enumerated.
    """
    D = form.D
    if target.D != D:
        raise ValueError("target field mismatch")
    if not form.is_totally_positive_definite():
        raise ValueError("form is not totally positive definite")
    if not (target.is_totally_positive() or (target.a > 0 and target.b == 0)):
        raise ValueError("target must be totally positive")
    B = form.gram()
    n = form.n
    tgt = _elem_to_qd(target)
    Binv = _qd_inverse(B)
    det = _qd_det(B)
    # per-coordinate boxes
    from .qd import frac_sqrt_outer

    candidates: List[List[QuadElem]] = []
    for t in range(n):
        th1 = (tgt * Binv[t][t]).upper_frac(24)
        th2 = (tgt.conj() * Binv[t][t].conj()).upper_frac(24)
        S1 = frac_sqrt_outer(max(th1, Fraction(0)), 24)
        S2 = frac_sqrt_outer(max(th2, Fraction(0)), 24)
        pts = box_enumerate(D, S1, S2)
        elems = [coords_to_elem(D, x, y) for x, y in pts]
        elems.sort(key=lambda c: ((c * c).trace(), c.a, c.b))
        candidates.append(elems)

    # Schur complements S_t for head length t = 1..n-1 (exact)
    schur: Dict[int, List[List[QD]]] = {}
    for t in range(1, n):
        Bhh = [row[:t] for row in B[:t]]
        Bht = [row[t:] for row in B[:t]]
        Btt = [row[t:] for row in B[t:]]
        Btt_inv = _qd_inverse(Btt)
        corr = _qd_matmul(_qd_matmul(Bht, Btt_inv), [list(r) for r in zip(*Bht)])
        schur[t] = [[Bhh[i][j] - corr[i][j] for j in range(t)] for i in range(t)]

    a_nn = B[n - 1][n - 1]
    nodes = 0

    def tail_min_ok(head: List[QD]) -> bool:
        t = len(head)
        if t == n:
            return True
        S = schur[t]
        acc = tgt * 0
        for i in range(t):
            for j in range(t):
                acc = acc + S[i][j] * head[i] * head[j]
        rem = tgt - acc
        return rem.sign() >= 0 and rem.conj().sign() >= 0

    def solve_last(head_elems: List[QuadElem]):
        # a_nn x^2 + L x + (C - target) = 0 over K
        L = QD(D, 0)
        for i in range(1, n):
            L = L + _elem_to_qd(form.coeff(i, n)) * _elem_to_qd(head_elems[i - 1])
        Cval = QD(D, 0)
        for i in range(1, n):
            for j in range(i, n):
                cij = form.coeff(i, j)
                if cij.a == 0 and cij.b == 0:
                    continue
                Cval = Cval + _elem_to_qd(cij) * _elem_to_qd(head_elems[i - 1]) * _elem_to_qd(head_elems[j - 1])
        disc = L * L - a_nn * (Cval - tgt) * 4
        root = sqrt_in_field(disc)
        if root is None:
            return None
        for rt in (root, -root):
            x = (rt - L) / (a_nn * 2)
            el = _qd_to_elem(x)
            if el is not None:
                return el
        return None

    def dfs(depth: int, head_elems: List[QuadElem], head_qd: List[QD]):
        nonlocal nodes
        if depth == n - 1:
            nodes += 1
            el = solve_last(head_elems)
            if el is not None:
                vec = tuple(head_elems + [el])
                assert form.evaluate(vec) == target
                return vec
            return None
        for cand in candidates[depth]:
            nodes += 1
            hq = head_qd + [_elem_to_qd(cand)]
            if not tail_min_ok(hq):
                continue
            got = dfs(depth + 1, head_elems + [cand], hq)
            if got is not None:
                return got
        return None

    if n == 1:
        vec = None
        el = _solve_unary(a_nn, tgt, D)
        if el is not None:
            vec = (el,)
            assert form.evaluate(vec) == target
        nodes += 1
    else:
        vec = dfs(0, [], [])
    counts = tuple(len(c) for c in candidates)
    if vec is not None:
        return RepresentResult("found", vec, counts, nodes)
    # recompute the exhaustion bounds before declaring impossibility
    recheck = []
    for t in range(n):
        th1 = (tgt * Binv[t][t]).upper_frac(24)
        th2 = (tgt.conj() * Binv[t][t].conj()).upper_frac(24)
        S1 = frac_sqrt_outer(max(th1, Fraction(0)), 24)
        S2 = frac_sqrt_outer(max(th2, Fraction(0)), 24)
        recheck.append(len(box_enumerate(D, S1, S2)))
    assert tuple(recheck) == counts
    return RepresentResult("impossible", None, counts, nodes)


def _solve_unary(a11: QD, tgt: QD, D: int) -> Optional[QuadElem]:
    theta = tgt / a11
    root = sqrt_in_field(theta)
    if root is None:
        return None
    for rt in (root, -root):
        el = _qd_to_elem(rt)
        if el is not None:
            return el
    return None


# ---------------------------------------------------------------------------
# form parsing: "a11 x1^2 + a12 x1 x2 + ..."
# ---------------------------------------------------------------------------

import re

_TERM_RE = re.compile(
    r"^(?P<coef>.*?)\s*\*?\s*x(?P<v1>\d+)\s*(?:(?P<sq>\^\s*2)|\*?\s*x(?P<v2>\d+))$"
)


def _split_terms(text: str) -> List[Tuple[int, str]]:
    terms = []
    depth = 0
    cur = []
    sign = 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur and "".join(cur).strip():
            terms.append((sign, "".join(cur).strip()))
            sign = 1 if ch == "+" else -1
            cur = []
        elif depth == 0 and ch in "+-" and not "".join(cur).strip():
            sign = sign * (1 if ch == "+" else -1)
        else:
            cur.append(ch)
    if "".join(cur).strip():
        terms.append((sign, "".join(cur).strip()))
    return terms


def parse_form(text: str, D: int) -> QuadraticForm:
    """Parse the mini-grammar "a11 x1^2 + a12 x1 x2 + ..." over Q(sqrt(D)).

    Coefficients use the textual element format (or plain integers) and
    default to 1; variables are x1, x2, ...; every term must be quadratic
    (xi^2 or xi xj).
    """
    coeffs: Dict[Tuple[int, int], QuadElem] = {}
    n = 0
    for sign_, term in _split_terms(text):
        m = _TERM_RE.match(term)
        if not m:
            raise ValueError(f"cannot parse form term {term!r}")
        v1 = int(m.group("v1"))
        v2 = int(m.group("v2")) if m.group("v2") else v1
        i, j = min(v1, v2), max(v1, v2)
        coef_text = m.group("coef").strip().rstrip("*").strip()
        if not coef_text:
            c = QuadElem(D, 1, 0)
        elif re.fullmatch(r"[+-]?\d+", coef_text):
            c = QuadElem(D, int(coef_text), 0)
        else:
            # compound coefficients must be parenthesized to survive term
            # splitting; a bare "(...)" wrapper is not part of the element
            # format and is peeled here
            if coef_text.startswith("(") and coef_text.endswith(")"):
                depth = 0
                wrapper = True
                for pos, ch in enumerate(coef_text):
                    depth += (ch == "(") - (ch == ")")
                    if depth == 0 and pos < len(coef_text) - 1:
                        wrapper = False
                        break
                if wrapper:
                    coef_text = coef_text[1:-1]
            c = parse_elem(coef_text, D)
        if sign_ < 0:
            c = -c
        if (i, j) in coeffs:
            coeffs[(i, j)] = coeffs[(i, j)] + c
        else:
            coeffs[(i, j)] = c
        n = max(n, j)
    if n == 0:
        raise ValueError("empty form")
    cleaned = tuple(
        (i, j, c) for (i, j), c in sorted(coeffs.items()) if not (c.a == 0 and c.b == 0)
    )
    return QuadraticForm(D=D, n=n, coeffs=cleaned)
