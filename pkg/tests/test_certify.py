from fractions import Fraction

import pytest

from quadcert.certify import (
    CertificateError,
    QuadraticForm,
    build_certificate,
    certificate_from_json,
    decide_represent,
    pair_refute,
    parse_form,
    select_witnesses,
    totally_positive_up_to,
)
from quadcert.contfrac import alpha, expand_sqrt
from quadcert.qarith import QuadElem, format_elem, succeq


def test_select_witnesses_default_schema(cert_m1):
    e = expand_sqrt(cert_m1.D, max_steps=10)
    ws = select_witnesses(e, 1)
    assert ws.indices == (1, 3)
    ws2 = select_witnesses(e, 2) if e.r >= 5 else None
    if ws2:
        assert ws2.indices == (1, 3, 5)


def test_select_witnesses_period_too_short():
    with pytest.raises(CertificateError):
        select_witnesses(expand_sqrt(13), 1)  # r = 2 < 3


def test_select_witnesses_validation():
    e = expand_sqrt(13)
    with pytest.raises(ValueError):
        select_witnesses(e, 1, indices=(1, 2), force=True)  # even index
    with pytest.raises(ValueError):
        select_witnesses(e, 1, indices=(3, 1), force=True)  # not ascending
    with pytest.raises(ValueError):
        select_witnesses(e, 1, indices=(1, 1), force=True)  # duplicate
    ws = select_witnesses(e, 1, indices=(1, 3), force=True)
    assert [w.is_totally_positive() for w in ws.witnesses] == [True, True]


def test_pair_refute_d13_example():
    e = expand_sqrt(13)
    a1, a3 = alpha(e, 1), alpha(e, 3)
    assert (a1, a3) == (QuadElem(13, 4, 1), QuadElem(13, 11, 3))
    pc = pair_refute(13, a1, a3)
    assert QuadElem(13, 3, 1, 2) in pc.violators  # c = (3+sqrt(13))/2
    c = QuadElem(13, 3, 1, 2)
    assert c * c == QuadElem(13, 11, 3, 2)
    assert succeq(4 * a1 * a3, c * c)
    assert pc.doubling_clean


def test_pair_refute_rational_case():
    one = QuadElem(5, 1, 0)
    pc = pair_refute(5, one, one)
    vs = set(pc.violators)
    for v in (QuadElem(5, 1, 0), QuadElem(5, -1, 0), QuadElem(5, 2, 0), QuadElem(5, -2, 0)):
        assert v in vs
    assert QuadElem(5, 0, 0) not in vs


def test_pair_refute_rejects_bad_inputs():
    with pytest.raises(ValueError):
        pair_refute(13, QuadElem(13, 1, 1), QuadElem(13, 4, 1))  # not totally positive


def test_pair_refute_clean_on_constructed_field(cert_m1):
    pc = cert_m1.pair_checks[0]
    assert (pc.i, pc.j) == (1, 3)
    assert pc.violators == ()
    assert pc.doubling_clean
    assert pc.candidates_tested >= 1


def test_certificate_m1(cert_m1):
    assert cert_m1.soundness == "proved"
    assert cert_m1.squarefree.proved
    assert cert_m1.excluded_rank_le == 1
    assert cert_m1.seq.values == (2, 8, 512, 134217728, 512, 8, 2)
    assert "rank <= 1" in cert_m1.conclusion_text()
    e = expand_sqrt(cert_m1.D, max_steps=10)
    assert e.k == cert_m1.k
    assert e.period == cert_m1.seq.values + (2 * cert_m1.k,)


def test_certificate_m2(cert_m2):
    assert cert_m2.soundness == "conditional"
    assert cert_m2.squarefree.verdict == "probably-squarefree"
    assert cert_m2.excluded_rank_le == 2
    assert len(cert_m2.pair_checks) == 3
    assert all(not p.violators for p in cert_m2.pair_checks)
    assert "conditional" in cert_m2.conclusion_text()


def test_certificate_refuted_d13(cert_refuted_13):
    assert cert_refuted_13.soundness == "refuted"
    assert cert_refuted_13.refuted
    viol = cert_refuted_13.pair_checks[0].violators
    assert QuadElem(13, 3, 1, 2) in viol


def test_certificate_json_roundtrip(cert_m1):
    obj = cert_m1.to_json()
    back = certificate_from_json(obj)
    assert back.D == cert_m1.D and back.k == cert_m1.k
    assert back.seq == cert_m1.seq
    assert back.witness_set.witnesses == cert_m1.witness_set.witnesses
    assert back.soundness == cert_m1.soundness
    # schema details: decimal strings everywhere
    assert isinstance(obj["D"], str) and isinstance(obj["k"], str)
    assert all(isinstance(u, str) for u in obj["sequence"])
    assert all(isinstance(w["p"], str) for w in obj["witnesses"])
    assert obj["conclusion"]["soundness"] == "proved"


# ---------------------------------------------------------------------------
# forms and the decider
# ---------------------------------------------------------------------------

def test_parse_form_deutsch():
    f = parse_form("x1^2 + x1 x2 + x2^2 + x3^2 + x3 x4 + x4^2", 5)
    assert f.n == 4
    assert f.coeff(1, 2) == QuadElem(5, 1, 0)
    assert f.coeff(1, 3) == QuadElem(5, 0, 0)
    assert f.is_totally_positive_definite()


def test_parse_form_coefficients():
    f = parse_form("2 x1^2 - x1 x2 + (1+1*sqrt(5))/2 x2^2", 5)
    assert f.coeff(1, 1) == QuadElem(5, 2, 0)
    assert f.coeff(1, 2) == QuadElem(5, -1, 0)
    assert f.coeff(2, 2) == QuadElem(5, 1, 1, 2)
    with pytest.raises(ValueError):
        parse_form("x1", 5)  # not quadratic
    with pytest.raises(ValueError):
        parse_form("", 5)


def test_positive_definiteness_check():
    assert parse_form("x1^2 + x2^2", 13).is_totally_positive_definite()
    assert not parse_form("x1^2 - x2^2", 13).is_totally_positive_definite()
    # 1+sqrt(13) is positive but not totally positive
    f = parse_form("(1+1*sqrt(13)) x1^2", 13)
    assert not f.is_totally_positive_definite()
    # indefinite form rejected by the decider
    with pytest.raises(ValueError):
        decide_represent(parse_form("x1^2 - x2^2", 13), QuadElem(13, 1, 0))


def test_form_evaluate():
    f = parse_form("x1^2 + x1 x2 + x2^2", 5)
    v = (QuadElem(5, 1, 1, 2), QuadElem(5, 1, 0))
    # phi^2 + phi + 1 where phi = (1+sqrt5)/2
    phi = QuadElem(5, 1, 1, 2)
    assert f.evaluate(v) == phi * phi + phi + 1


def test_decide_represent_found():
    f = parse_form("x1^2 + x1 x2 + x2^2 + x3^2 + x3 x4 + x4^2", 5)
    r = decide_represent(f, QuadElem(5, 1, 0))
    assert r.status == "found"
    assert f.evaluate(r.vector) == QuadElem(5, 1, 0)


def test_decide_represent_impossible_unary(cert_m1):
    e = expand_sqrt(cert_m1.D, max_steps=10)
    a3 = alpha(e, 3)
    r = decide_represent(parse_form("x1^2", cert_m1.D), a3)
    assert r.status == "impossible"


def test_decide_represent_sum_two_squares():
    f = parse_form("x1^2 + x2^2", 2)
    r = decide_represent(f, QuadElem(2, 4, 2))  # (1+sqrt2)^2 + 1^2 = 4+2sqrt2
    assert r.status == "found"
    assert f.evaluate(r.vector) == QuadElem(2, 4, 2)
    r2 = decide_represent(f, QuadElem(2, 3, -2))  # totally positive, norm 1
    assert r2.status in ("found", "impossible")  # decided either way, exactly
    if r2.status == "found":
        assert f.evaluate(r2.vector) == QuadElem(2, 3, -2)


def test_witness_blocks_low_rank_forms(cert_m1):
    """Theorem made executable: rank-1 forms miss at least one witness.

    Spot check over a corpus of random totally positive unary forms — the
    proved certificate promises every form of arity <= w-1 = 1 fails."""
    import random

    e = expand_sqrt(cert_m1.D, max_steps=10)
    witnesses = [alpha(e, 1), alpha(e, 3)]
    rng = random.Random(99)
    corpus = [QuadElem(cert_m1.D, rng.randrange(1, 50), 0) for _ in range(8)]
    corpus += [QuadElem(cert_m1.D, 1, 0), QuadElem(cert_m1.D, 2, 0)]
    for a11 in corpus:
        assert a11.is_totally_positive()
        f = QuadraticForm(D=cert_m1.D, n=1, coeffs=((1, 1, a11),))
        assert f.is_totally_positive_definite()
        assert any(
            decide_represent(f, w).status == "impossible" for w in witnesses
        ), a11


def test_totally_positive_up_to_examples():
    xs = totally_positive_up_to(5, 3)
    assert [format_elem(x) for x in xs] == [
        "1+0*sqrt(5)", "(3-1*sqrt(5))/2", "(3+1*sqrt(5))/2",
    ]
    assert [x.norm() for x in xs[1:]] == [1, 1]
    assert totally_positive_up_to(2, 2) == [QuadElem(2, 1, 0)]
    xs = totally_positive_up_to(2, 6)
    want = {
        QuadElem(2, 1, 0), QuadElem(2, 2, 0), QuadElem(2, 3, 0),
        QuadElem(2, 2, 1), QuadElem(2, 2, -1),
        QuadElem(2, 3, 1), QuadElem(2, 3, -1),
        QuadElem(2, 3, 2), QuadElem(2, 3, -2),
    }
    assert set(xs) == want
    for x in xs:
        assert x.is_totally_positive() and x.trace() <= 6


def test_build_certificate_thread_count_invariance():
    a = build_certificate(2, base="minimal", threads=1)
    b = build_certificate(2, base="minimal", threads=3)
    assert a.to_json() == b.to_json()
