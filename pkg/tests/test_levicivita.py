import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lcspectra.errors import DomainNotCovered, OriginOnGrid, ZeroField
from lcspectra.levicivita import (
    Chart,
    Field2D,
    PolarGrid,
    Spinor2D,
    angular_index,
    dirac_operator_residual,
    dirac_residual_rows,
    jacobian_weight,
    kg_operator_residual,
    lc_forward,
    lc_inverse,
    momentum_identity_residual,
    norm,
    p_minus,
    p_plus,
    polar_laplacian,
    pullback_scalar,
    pullback_spinor,
    pullback_spinor_regular,
    read_field,
    write_field,
)

# keep squares clear of underflow
coords = st.floats(-50, 50, allow_nan=False).filter(lambda v: v == 0 or abs(v) > 1e-150)


# -- the map ---------------------------------------------------------------------

@pytest.mark.parametrize("u, x", [((1, 0), (1, 0)), ((1, 1), (0, 2)), ((0, 1), (-1, 0))])
def test_forward(u, x):
    assert lc_forward(*u) == pytest.approx(x)


@pytest.mark.parametrize("x, u", [((0, 2), (1, 1)), ((-1, 0), (0, 1)), ((1, 0), (1, 0))])
def test_inverse_principal_branch(x, u):
    assert lc_inverse(*x) == pytest.approx(u, abs=1e-15)


def test_inverse_on_the_cut_uses_upper_half():
    u1, u2 = lc_inverse(-4.0, -0.0)
    assert (u1, u2) == (0.0, 2.0)


@given(coords, coords)
def test_radius_squares(u1, u2):
    x1, x2 = lc_forward(u1, u2)
    r = u1 * u1 + u2 * u2
    assert math.hypot(x1, x2) == pytest.approx(r, rel=4 * np.finfo(float).eps, abs=1e-300)


@given(coords, coords)
def test_round_trips(a, b):
    x = lc_forward(*lc_inverse(a, b))
    assert x == pytest.approx((a, b), rel=1e-12, abs=1e-12 * math.hypot(a, b) + 1e-300)
    u = lc_inverse(*lc_forward(a, b))
    same = np.allclose(u, (a, b), rtol=1e-12, atol=1e-12 * math.hypot(a, b))
    flipped = np.allclose(u, (-a, -b), rtol=1e-12, atol=1e-12 * math.hypot(a, b))
    assert same or flipped


# -- grids and fields ----------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(ValueError):
        PolarGrid(Chart.X, 1, 8, 1.0)
    with pytest.raises(ValueError):
        PolarGrid(Chart.X, 8, 7, 1.0)
    g = PolarGrid("u", 5, 8, 2.0)
    assert g.chart is Chart.U and g.has_origin
    assert g.thetas[-1] < 2 * np.pi


def test_field_rejects_nonfinite_and_bad_shape():
    g = PolarGrid(Chart.X, 4, 4, 1.0)
    with pytest.raises(ValueError):
        Field2D(g, np.full((4, 4), np.nan))
    with pytest.raises(ValueError):
        Field2D(g, np.zeros((3, 4)))
    with pytest.raises(ValueError):
        Spinor2D(Field2D(g, np.zeros((4, 4))), Field2D(PolarGrid(Chart.X, 4, 6, 1.0), np.zeros((4, 6))))


def test_jacobian_weight():
    g = PolarGrid(Chart.U, 3, 4, 2.0)
    assert jacobian_weight(g).ravel().tolist() == [0.0, 4.0, 16.0]


def test_serialization_round_trip(tmp_path):
    g = PolarGrid(Chart.U, 6, 8, 1.5, r_min=0.25)
    rng = np.random.default_rng(3)
    f = Field2D(g, rng.normal(size=(6, 8)) + 1j * rng.normal(size=(6, 8)))
    buf = io.StringIO()
    write_field(f, buf)
    text = buf.getvalue()
    assert text.splitlines()[0].startswith('{"chart": "u"')
    assert len(text.splitlines()) == 1 + 48
    back = read_field(io.StringIO(text))
    assert back.grid == g and np.array_equal(back.values, f.values)


# -- pullbacks --------------------------------------------------------------------

@pytest.fixture
def x_grid():
    return PolarGrid(Chart.X, 401, 256, 4.0)


@pytest.fixture
def u_grid():
    return PolarGrid(Chart.U, 101, 128, 2.0)


def test_pullback_constant(x_grid, u_grid):
    f = Field2D(x_grid, np.full((401, 256), 2.5 + 1j))
    assert np.allclose(pullback_scalar(f, u_grid).values, 2.5 + 1j, atol=1e-14)


def test_pullback_doubles_phase(x_grid, u_grid):
    f = Field2D.sample(lambda a, b: np.exp(1j * np.arctan2(b, a)), x_grid)
    g = pullback_scalar(f, u_grid)
    _, t = u_grid.mesh()
    # e^{i theta} is discontinuous at the origin; compare away from it
    far = slice(10, None)
    assert np.max(np.abs(g.values[far] - np.exp(2j * t[far]))) < 1e-3
    assert angular_index(g)[0] == 2


def test_pullback_of_complex_coordinate_is_square(u_grid):
    g = pullback_scalar(lambda a, b: a + 1j * b, u_grid)
    u1, u2 = u_grid.cartesian()
    assert np.allclose(g.values, (u1 + 1j * u2) ** 2, atol=1e-13)


def test_pullback_domain_check(x_grid):
    f = Field2D(x_grid, np.ones((401, 256)))
    with pytest.raises(DomainNotCovered):
        pullback_scalar(f, PolarGrid(Chart.U, 10, 8, 2.5))
    with pytest.raises(ValueError):
        pullback_scalar(f, x_grid)


def test_bilinear_pullback_is_second_order():
    f = lambda a, b: np.exp(-((a - 1) ** 2 + b ** 2))
    target = PolarGrid(Chart.U, 41, 32, 1.9)
    exact = pullback_scalar(f, target).values
    errs = []
    for n in (101, 201, 401):
        src = Field2D.sample(f, PolarGrid(Chart.X, n, 2 * (n - 1), 4.0))
        errs.append(np.max(np.abs(pullback_scalar(src, target).values - exact)))
    assert errs[0] / errs[1] > 3.0 and errs[1] / errs[2] > 3.0


def test_norm_doubles_on_full_u_plane():
    f = lambda a, b: np.exp(-((a - 1) ** 2 + b ** 2))
    x = Field2D.sample(f, PolarGrid(Chart.X, 1601, 256, 9.0))
    g = pullback_scalar(f, PolarGrid(Chart.U, 1601, 256, 3.0))
    assert norm(g, jacobian=True) ** 2 == pytest.approx(2 * norm(x) ** 2, rel=1e-4)


def test_spinor_pullback_examples():
    target = PolarGrid(Chart.U, 3, 4, 1.0, r_min=0.5)
    psi = (lambda a, b: 3.0 + a, lambda a, b: 5.0 - b)
    phi = pullback_spinor(psi, target)
    # ring 2 is u = 1; theta 0 -> u=(1,0), theta pi/2 -> u=(0,1)
    assert phi.upper.values[2, 0] == pytest.approx((3 + 1) / 2)
    assert phi.lower.values[2, 0] == pytest.approx(5.0)
    assert phi.upper.values[2, 1] == pytest.approx(1j * (3 - 1) / 2)


def test_spinor_pullback_of_constant():
    target = PolarGrid(Chart.U, 8, 16, 2.0, r_min=0.25)
    phi = pullback_spinor((lambda a, b: 2.0 + 0 * a, lambda a, b: 0 * a), target)
    u, t = target.mesh()
    assert np.allclose(phi.upper.values, 2.0 * np.exp(1j * t) / (2 * u))


def test_spinor_pullback_needs_origin_free_grid():
    with pytest.raises(OriginOnGrid):
        pullback_spinor((lambda a, b: a, lambda a, b: b), PolarGrid(Chart.U, 8, 8, 1.0))


@pytest.mark.parametrize("l, lp", [(0, 1), (1, 2), (-2, -1)])
def test_spinor_angular_shifts(l, lp):
    target = PolarGrid(Chart.U, 32, 64, 2.0, r_min=0.1)
    radial = lambda a, b: np.exp(-(a * a + b * b))
    psi = (lambda a, b: radial(a, b) * np.exp(1j * l * np.arctan2(b, a)),
           lambda a, b: radial(a, b) * np.exp(1j * lp * np.arctan2(b, a)))
    weighted = pullback_spinor(psi, target)
    assert angular_index(weighted.upper)[0] == 2 * l + 1
    assert angular_index(weighted.lower)[0] == 2 * lp
    regular = pullback_spinor_regular(psi, target)
    assert angular_index(regular.upper)[0] == 2 * l
    assert angular_index(regular.lower)[0] == 2 * lp - 1


# -- angular index ----------------------------------------------------------------

def test_angular_index_single_harmonic():
    g = PolarGrid(Chart.X, 16, 32, 1.0, r_min=0.05)
    f = Field2D.sample(lambda a, b: np.exp(3j * np.arctan2(b, a)) * np.exp(-(a * a + b * b)), g)
    l, purity = angular_index(f)
    assert l == 3 and purity == pytest.approx(1.0)


def test_angular_index_tie_break():
    g = PolarGrid(Chart.X, 8, 16, 1.0, r_min=0.1)
    f = Field2D.sample(lambda a, b: np.cos(np.arctan2(b, a)) + 0j, g)
    assert angular_index(f) == (1, pytest.approx(0.5))


def test_angular_index_zero_field():
    with pytest.raises(ZeroField):
        angular_index(Field2D(PolarGrid(Chart.X, 4, 4, 1.0), np.zeros((4, 4))))


# -- operators ----------------------------------------------------------------------

def test_laplacian_of_polynomials():
    g = PolarGrid(Chart.U, 64, 64, 2.0)
    x1, x2 = g.cartesian()
    lap = polar_laplacian(Field2D(g, x1 * x1 + 3 * x2 * x2))
    assert np.all(np.isnan(lap[0])) and np.all(np.isnan(lap[-1]))
    # r^2 is exact on the radial stencil; the angular part is O(dtheta^2)
    assert np.max(np.abs(lap[1:-1] - 8.0)) < 0.02


def test_momentum_operators_on_linear_fields():
    g = PolarGrid(Chart.U, 32, 64, 2.0, r_min=0.5)
    x1, x2 = g.cartesian()
    f = Field2D(g, x1 + 0j)
    assert np.allclose(p_minus(f)[1:-1], -1j, atol=2e-3)
    assert np.allclose(p_plus(f)[1:-1], -1j, atol=2e-3)
    f = Field2D(g, x2 + 0j)
    assert np.allclose(p_minus(f)[1:-1], -1, atol=2e-3)
    assert np.allclose(p_plus(f)[1:-1], 1, atol=2e-3)


def test_kg_residual_of_exact_oscillator_ground_state():
    # KG oscillator: -Lap g + a^2 u^2 g = (eps^2 - m^2) g with a^2 = m w^2 (m + eps) / 2,
    # ground state exp(-a u^2 / 2), eps^2 - m^2 = 2a
    m, omega, eps = 1.0, math.sqrt(1.5), 2.0
    a = math.sqrt(m * omega ** 2 * (m + eps) / 2)
    assert 2 * a == pytest.approx(eps ** 2 - m ** 2)
    res = []
    for n in (128, 256, 512):
        g = Field2D.sample(lambda x, y: np.exp(-a * (x * x + y * y) / 2) + 0j,
                           PolarGrid(Chart.U, n, 16, 6.0))
        res.append(kg_operator_residual(g, m, omega, eps))
    assert res[0] / res[1] > 3.5 and res[1] / res[2] > 3.5
    assert res[-1] < 5e-4


def test_kg_residual_grows_linearly_with_energy_shift():
    g = Field2D.sample(lambda x, y: np.exp(-(x * x + y * y)) + 0j, PolarGrid(Chart.U, 200, 16, 5.0))
    base = kg_operator_residual(g, 1.0, 1.0, 2.0)
    d1 = kg_operator_residual(g, 1.0, 1.0, 2.0 + 1e-3) - base
    d2 = kg_operator_residual(g, 1.0, 1.0, 2.0 + 2e-3) - base
    assert d2 / d1 == pytest.approx(2.0, rel=0.05)


def test_residuals_reject_zero_fields():
    g = PolarGrid(Chart.U, 8, 8, 1.0)
    z = Field2D(g, np.zeros((8, 8)))
    with pytest.raises(ZeroField):
        kg_operator_residual(z, 1, 1, 2)
    with pytest.raises(ZeroField):
        dirac_operator_residual(Spinor2D(z, z), 1, 1, 2)


def test_dirac_residual_direct():
    g = PolarGrid(Chart.U, 200, 32, 5.0, r_min=0.05)
    zero = Field2D(g, np.zeros((200, 32)))
    gauss = Field2D.sample(lambda x, y: np.exp(-((x - 1) ** 2 + y * y)) + 0j, g)
    rows = dirac_residual_rows(Spinor2D(zero, gauss), 1.0, 1.0, 2.0)
    assert rows.joint > 0
    assert rows.joint == pytest.approx(math.hypot(rows.upper_row, rows.lower_row))
    # lower row is -(m + eps) b: exactly 3 ||b|| / ||b||
    assert rows.lower_row == pytest.approx(3.0, rel=1e-12)


def test_dirac_residual_energy_shift():
    g = PolarGrid(Chart.U, 200, 32, 5.0, r_min=0.05)
    a = Field2D.sample(lambda x, y: np.exp(-(x * x + y * y)) + 0j, g)
    b = Field2D.sample(lambda x, y: 0.1 * (x + 1j * y) * np.exp(-(x * x + y * y)), g)
    phi = Spinor2D(a, b)
    r0 = dirac_residual_rows(phi, 1.0, 1.0, 2.0)
    r1 = dirac_residual_rows(phi, 1.0, 1.0, 3.0)
    # each row shifts by exactly -1 times its component
    assert r1.joint != r0.joint
    assert abs(r1.joint - r0.joint) <= 1.0 + 1e-12


# -- momentum identity ----------------------------------------------------------------

@pytest.mark.parametrize("f", [lambda a, b: a + 0j, lambda a, b: b + 0j])
def test_momentum_identity_exact_on_coordinates(f):
    assert momentum_identity_residual(f, 0.01) <= 1e-12


def test_momentum_identity_second_order():
    f = lambda a, b: np.exp(-((a - 2) ** 2 + b * b)) + 0j
    ratio = momentum_identity_residual(f, 0.02) / momentum_identity_residual(f, 0.01)
    assert 3.5 <= ratio <= 4.5
