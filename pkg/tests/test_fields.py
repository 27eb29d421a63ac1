import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freqlab.errors import DegeneratePointError, DomainError, FieldSpecError, ParameterError
from freqlab.fields import (
    SOLID_HARMONICS_3D,
    Affine,
    DriftExponential,
    HarmonicPolynomial,
    PRadial,
    eval_bundle,
    make_field,

    pde_residual,
)

coord = st.floats(-2.0, 2.0, allow_nan=False)


def harmonic_specs():
    specs = [(HarmonicPolynomial(k, b), 2) for k in range(0, 7) for b in ("cos", "sin") if not (k == 0 and b == "sin")]
    specs += [(HarmonicPolynomial(k, m), 3) for (k, m) in SOLID_HARMONICS_3D]
    return specs


# --- examples -------------------------------------------------------------


def test_harmonic_k2_is_x2_minus_y2():
    f = make_field(HarmonicPolynomial(2, "cos"), 2)
    x = np.array([[0.3, -0.7], [1.2, 0.4]])
    np.testing.assert_allclose(f.value(x), x[:, 0] ** 2 - x[:, 1] ** 2, rtol=0, atol=1e-15)


def test_pradial_p_equals_n_rejected():
    with pytest.raises(FieldSpecError):
        make_field(PRadial(2.0), 2)


def test_negative_degree_rejected():
    with pytest.raises(FieldSpecError):
        make_field(HarmonicPolynomial(-1, "cos"), 2)


def test_drift_exp_residual_vanishes():
    f = make_field(DriftExponential((1.0, 0.0)))
    assert pde_residual(f, (0.5, 0.2), "drift", b=(1.0, 0.0)) <= 1e-14


def test_eval_bundle_examples():
    u, g, lap = eval_bundle(make_field("harmonic:2d:k=2:cos"), (1.0, 1.0))
    assert u == 0 and lap == 0
    np.testing.assert_array_equal(g, [2.0, -2.0])

    u, g, lap = eval_bundle(make_field("drift-exp:b=1,0"), (0.3, 0.0))
    e = math.exp(0.3)
    assert abs(u - 1.3498588075760032) < 1e-15
    np.testing.assert_allclose(g, [e, 0.0], rtol=1e-15)
    assert abs(lap - e) < 1e-15

    _, _, lap = eval_bundle(make_field(Affine((1.0, 0.0))), (0.4, -2.0))
    assert lap == 0


def test_laplace_residual_of_x2_minus_y2():
    f = make_field("harmonic:2d:k=2:cos")
    assert pde_residual(f, (0.37, -1.1), "laplace") == 0


def test_plaplace_radial_residual():
    f = make_field("p-radial:p=3")
    assert pde_residual(f, (1.0, 0.0), "plaplace", p=3) <= 1e-10


def test_pradial_domain_excludes_origin():
    f = make_field(PRadial(3.0, r_min=0.1), 2)
    with pytest.raises(DomainError):
        eval_bundle(f, (0.0, 0.0))
    with pytest.raises(DomainError):
        eval_bundle(f, (0.05, 0.0))


def test_plaplace_residual_at_critical_point_needs_regularisation():
    f = make_field("harmonic:2d:k=2:cos")
    with pytest.raises(DegeneratePointError):
        pde_residual(f, (0.0, 0.0), "plaplace", p=3)
    assert math.isfinite(pde_residual(f, (0.0, 0.0), "plaplace", p=3, epsilon=1e-6))


@pytest.mark.parametrize(
    "text",
    ["harmonic:2d:k=3:cos", "harmonic:3d:k=2:m=-1", "drift-exp:b=2,0", "p-radial:p=3", "affine:a=1,2:l0=0.5",
     "const:c=5", "ramp:a=1,0", "2*harmonic:2d:k=1:cos + 0.1*harmonic:2d:k=2:cos"],
)
def test_catalog_strings_parse(text):
    f = make_field(text)
    assert f.n in (2, 3)


@pytest.mark.parametrize("text", ["harmonic:2d:k=x:cos", "nosuch:field", "harmonic:3d:k=5:m=0", "drift-exp:b=inf,0"])
def test_bad_catalog_strings(text):
    with pytest.raises(ParameterError):
        make_field(text)


def test_solid_harmonic_table_is_complete():
    for k in range(5):
        for m in range(-k, k + 1):
            assert (k, m) in SOLID_HARMONICS_3D


# --- properties -----------------------------------------------------------


@pytest.mark.parametrize("spec,n", harmonic_specs())
def test_harmonic_laplacian_vanishes_at_random_points(spec, n, rng):
    f = make_field(spec, n)
    X = rng.uniform(-1.5, 1.5, size=(1000, n))
    _, _, lap = f.evaluate(X)
    scale = max(1.0, float(np.max(np.abs(f.hessian(X)))))
    assert np.max(np.abs(lap)) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(b=st.lists(st.floats(-3, 3), min_size=2, max_size=3), x=st.lists(coord, min_size=3, max_size=3))
def test_drift_residual_vanishes_for_any_b(b, x):
    f = make_field(DriftExponential(tuple(b)))
    pt = x[: len(b)]
    u = float(f.value(np.array([pt]))[0])
    assert pde_residual(f, pt, "drift", b=b) <= 1e-12 * max(1.0, u * (1 + sum(t * t for t in b)))


@settings(max_examples=30, deadline=None)
@given(
    spec=st.sampled_from(["harmonic:2d:k=3:cos", "harmonic:3d:k=4:m=2", "drift-exp:b=1,-0.5", "p-radial:p=3",
                          "harmonic:2d:k=5:sin", "drift-exp:b=0.3,0.2,-1"]),
    x=st.lists(st.floats(0.3, 1.0), min_size=3, max_size=3),
)
def test_gradient_matches_central_differences_second_order(spec, x):
    f = make_field(spec)
    pt = np.array(x[: f.n])
    _, g, _ = eval_bundle(f, pt)
    errs = []
    for h in (1e-2, 1e-3):
        E = np.eye(f.n) * h
        fd = (f.value(pt + E) - f.value(pt - E)) / (2 * h)
        errs.append(np.max(np.abs(fd - g)))
    if errs[1] < 1e-11:  # third derivatives vanish or are tiny: FD is exact to round-off
        return
    assert math.log10(errs[0] / errs[1]) >= 1.9


@settings(max_examples=50, deadline=None)
@given(
    a=st.lists(st.floats(-2, 2), min_size=2, max_size=3).filter(lambda v: sum(t * t for t in v) > 1e-2),
    l0=st.floats(-1, 1),
    p=st.floats(1.1, 5),
    x=st.lists(coord, min_size=3, max_size=3),
)
def test_affine_is_p_harmonic(a, l0, p, x):
    f = make_field(Affine(tuple(a), l0))
    pt = x[: len(a)]
    assert eval_bundle(f, pt)[2] == 0
    assert pde_residual(f, pt, "plaplace", p=p) == 0
