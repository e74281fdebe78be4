from fractions import Fraction

import numpy as np
import pytest

from intsing.canonical import (
    CanonicalSpec,
    QuotientModelSpec,
    build_canonical,
    randomized_disguise,
    validate_quotient_spec,
    verify_periodicity,
)
from intsing.classify import is_nondegenerate, rank_at
from intsing.expr import parse
from intsing.groups import cyclic, trivial
from intsing.phasespace import check_commutation


def test_build_elliptic_2d():
    m = build_canonical(CanonicalSpec(0, 1, 0, 0))
    assert m.dim == 2
    assert m.components[0].normalized_equal(parse("(1/2)*(x1^2+y1^2)", m.coords))


def test_build_regular_hyperbolic():
    m = build_canonical(CanonicalSpec(1, 0, 1, 0))
    assert m.coords == ("lam1", "phi1", "x1", "y1")
    assert m.components[0].normalized_equal(parse("lam1", m.coords))
    assert m.components[1].normalized_equal(parse("x1*y1", m.coords))


def test_build_focus_pair():
    m = build_canonical(CanonicalSpec(0, 0, 0, 1))
    assert m.components[0].normalized_equal(parse("x1*y1+x2*y2", m.coords))
    assert m.components[1].normalized_equal(parse("x2*y1-y2*x1", m.coords))


def test_focus_bracket_vanishes_symbolically():
    m = build_canonical(CanonicalSpec(0, 0, 0, 1))
    br = m.structure.bracket(m.components[0], m.components[1])
    assert br.is_zero()


def test_commutation_exactly_zero():
    for spec in [CanonicalSpec(0, 2, 1, 0), CanonicalSpec(1, 0, 0, 1), CanonicalSpec(0, 0, 0, 2)]:
        report = check_commutation(build_canonical(spec), samples=25, tol=0.0)
        assert report.max_residual == 0.0


def test_classifier_recovers_spec_at_origin():
    for n in range(1, 5):
        for kf in range(n // 2 + 1):
            rest = n - 2 * kf
            for r in range(rest + 1):
                for ke in range(rest - r + 1):
                    spec = CanonicalSpec(r, ke, rest - r - ke, kf)
                    if spec.r == spec.n:
                        continue
                    m = build_canonical(spec)
                    origin = np.zeros(spec.dim)
                    assert rank_at(m, origin) == spec.r
                    v = is_nondegenerate(m, origin)
                    assert v.verdict == "nondegenerate"
                    assert v.williamson.triple == (spec.k_e, spec.k_h, spec.k_f)


def test_identity_disguise_keeps_model():
    m = build_canonical(CanonicalSpec(0, 1, 1, 0))
    d = randomized_disguise(m, seed=0, mix_components=False, translate_regular=False, shears=0)
    assert np.allclose(d.point.coordinates, 0.0)
    for a, b in zip(d.model.components, m.components):
        assert a.normalized_equal(b)


def test_mix_only_disguise_preserves_singular_set():
    m = build_canonical(CanonicalSpec(0, 1, 1, 0))
    d = randomized_disguise(m, seed=3, mix_components=True, translate_regular=False, shears=0)
    assert rank_at(d.model, np.zeros(4)) == 0
    v = is_nondegenerate(d.model, np.zeros(4))
    assert v.williamson.triple == (1, 1, 0)


def test_full_disguise_round_trip():
    m = build_canonical(CanonicalSpec(0, 1, 1, 0))
    d = randomized_disguise(m, seed=11)
    v = is_nondegenerate(d.model, d.point)
    assert v.williamson.triple == (1, 1, 0)


def test_disguise_symplectic_matrix():
    from intsing.canonical import symplectic_form_matrix

    d = randomized_disguise(build_canonical(CanonicalSpec(0, 0, 2, 0)), seed=2)
    O = symplectic_form_matrix(2)
    assert np.allclose(d.symplectic.T @ O @ d.symplectic, O, atol=1e-10)


def test_periodicity_elliptic():
    m = build_canonical(CanonicalSpec(0, 1, 1, 0))
    res = verify_periodicity(m, 0, tol=1e-9, n_points=5)
    assert res.passed and res.role == "elliptic"


def test_periodicity_focus_angular():
    m = build_canonical(CanonicalSpec(0, 0, 0, 1))
    res = verify_periodicity(m, 1, tol=1e-9, n_points=5)
    assert res.passed and res.role == "focus-angular"


def test_periodicity_rejects_hyperbolic():
    m = build_canonical(CanonicalSpec(0, 1, 1, 0))
    with pytest.raises(ValueError, match="not of periodic type"):
        verify_periodicity(m, 1)


def test_periodicity_rejects_focus_radial():
    m = build_canonical(CanonicalSpec(0, 0, 0, 1))
    with pytest.raises(ValueError, match="not of periodic type"):
        verify_periodicity(m, 0)


# -- local quotient models ----------------------------------------------------


def test_quotient_half_turn_with_flip_passes():
    q = QuotientModelSpec(
        r_o=0,
        r_c=1,
        disk_roles=["hyperbolic"],
        group=cyclic(2),
        translations={1: (Fraction(1, 2),)},
        signs={1: (-1,)},
    )
    res = validate_quotient_spec(q)
    assert res.passed, res.violations


def test_quotient_flip_without_translation_fails():
    q = QuotientModelSpec(
        r_o=0,
        r_c=1,
        disk_roles=["hyperbolic"],
        group=cyclic(2),
        translations={1: (Fraction(0),)},
        signs={1: (-1,)},
    )
    res = validate_quotient_spec(q)
    assert not res.passed
    assert any("not free" in v for v in res.violations)


def test_quotient_trivial_group_passes():
    q = QuotientModelSpec(r_o=1, r_c=0, disk_roles=["elliptic"], group=trivial())
    assert validate_quotient_spec(q).passed


def test_quotient_requires_effectiveness():
    q = QuotientModelSpec(
        r_o=0,
        r_c=1,
        disk_roles=["hyperbolic"],
        group=cyclic(2),
        translations={1: (Fraction(1, 2),)},
        signs={1: (1,)},
    )
    res = validate_quotient_spec(q)
    assert not res.passed
    assert any("not effective" in v for v in res.violations)


def test_quotient_homomorphism_enforced():
    q = QuotientModelSpec(
        r_o=0,
        r_c=1,
        disk_roles=["hyperbolic"],
        group=cyclic(4),
        translations={1: (Fraction(1, 2),), 2: (Fraction(1, 2),), 3: (Fraction(1, 2),)},
        signs={1: (-1,), 2: (1,), 3: (-1,)},
    )
    res = validate_quotient_spec(q)
    assert not res.passed
    assert any("homomorphism" in v for v in res.violations)
