"""Representation layer: transforms, products, inner products, export."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst
from numpy.testing import assert_allclose

from shbif import oracles
from shbif.errors import AliasingError, DomainMismatch
from shbif.spectral import (
    Domain,
    Mode,
    SpectralField,
    cube,
    grid_coords,
    inner,
    multiply,
    random_field,
    square,
    to_grid,
    to_spectral,
    translate,
    triple,
    write_csv_1d,
    write_pgm_2d,
)

D_DIR = Domain.make(1, math.pi, "dirichlet", grid_n=64, band=16)
D_DIR_HALF = Domain.make(1, math.pi / 2, "dirichlet", grid_n=64, band=16)
ALL_DOMAINS = [
    D_DIR,
    Domain.make(1, 2 * math.pi, "odd-periodic", grid_n=64, band=16),
    Domain.make(2, 2 * math.pi, "odd-periodic", grid_n=16, band=4),
    Domain.make(1, 2 * math.pi, "periodic", grid_n=64, band=16),
    Domain.make(2, 5.0, "periodic", grid_n=16, band=4),
    Domain.make(3, 2 * math.pi, "periodic", grid_n=8, band=2),
]


def test_single_mode_synthesis():
    f = SpectralField.from_modes(D_DIR, {1: 1.0})
    g = to_grid(f)
    x = grid_coords(D_DIR)[0]
    assert_allclose(g.values, math.sqrt(2 / math.pi) * np.sin(x), atol=1e-14)


def test_zero_field_transforms():
    f = SpectralField.zeros(D_DIR)
    assert np.all(to_grid(f).values == 0)
    assert to_spectral(to_grid(f)).norm() == 0.0
    assert np.all(cube(f).data == 0)


@pytest.mark.parametrize("domain", ALL_DOMAINS, ids=lambda d: f"{d.bc.value}-{d.dim}d")
def test_roundtrip_random_fields(domain, rng):
    for _ in range(10):
        f = random_field(domain, rng, 1.0, smooth=False)
        g = to_spectral(to_grid(f))
        assert np.max(np.abs(g.data - f.data)) <= 1e-12 * max(1.0, f.norm())


@pytest.mark.parametrize("domain", ALL_DOMAINS, ids=lambda d: f"{d.bc.value}-{d.dim}d")
def test_parseval(domain, rng):
    f = random_field(domain, rng, 1.0, smooth=False)
    assert abs(to_grid(f).norm() - f.norm()) <= 1e-10


def test_cube_sine_identity():
    # a sin(x) cubed: (3 a^3/4) sin(x) - (a^3/4) sin(3x)
    a = 1.3
    s = math.sqrt(2 / math.pi)
    f = SpectralField.from_modes(D_DIR, {1: a / s})
    c = cube(f)
    assert_allclose(c.coeff(1) * s, 3 * a**3 / 4, rtol=1e-13)
    assert_allclose(c.coeff(3) * s, -(a**3) / 4, rtol=1e-13)
    rest = [v for m, v in c.modes(1e-13).items() if m.k[0] not in (1, 3)]
    assert rest == []


@settings(max_examples=25, deadline=None)
@given(hst.data())
def test_cube_matches_convolution_oracle(data):
    domain = data.draw(hst.sampled_from(ALL_DOMAINS[:4]))
    probe = random_field(domain, np.random.default_rng(0), 1.0, smooth=False)
    modes = list(probe.modes(tol=-1.0).keys())
    chosen = data.draw(hst.lists(hst.sampled_from(modes), min_size=1, max_size=5,
                                 unique=True))
    amps = data.draw(hst.lists(
        hst.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
        min_size=len(chosen), max_size=len(chosen)))
    f = SpectralField.from_modes(domain, dict(zip(chosen, amps)))
    assert oracles.compare_coeffs(cube(f), oracles.cube_oracle(f)) <= 1e-12


def test_square_dirichlet_quadrature():
    # u = a sin(x) on (0, pi): even harmonics vanish, odd match quadrature
    a = 0.9
    s = math.sqrt(2 / math.pi)
    f = SpectralField.from_modes(D_DIR, {1: a / s})
    sq = square(f)
    assert abs(sq.coeff(2)) <= 1e-14
    assert abs(sq.coeff(4)) <= 1e-14
    for n in (1, 3, 5, 7):
        assert_allclose(sq.coeff(n), oracles.square_quadrature_oracle(f, n),
                        atol=1e-12)


def test_square_random_dirichlet_quadrature(rng):
    f = random_field(D_DIR_HALF, rng, 0.7, smooth=False)
    sq = square(f)
    for n in (1, 2, 3, 8):
        assert_allclose(sq.coeff(n), oracles.square_quadrature_oracle(f, n),
                        atol=1e-12)


def test_square_periodic_cos_identity():
    d = Domain.make(2, 2 * math.pi, "periodic", grid_n=32, band=8)
    f = SpectralField.from_modes(d, {("cos", (1, 0)): 1.0})
    sq = square(f)
    phys = math.sqrt(2 / d.volume)
    # cos^2 = 1/2 + cos(2 kappa x)/2 with the constant projected out
    assert_allclose(sq.coeff(("cos", (2, 0))) * phys, phys**2 / 2, rtol=1e-13)
    others = {m: v for m, v in sq.modes(1e-13).items() if m != Mode("cos", (2, 0))}
    assert others == {}


def test_square_odd_periodic_projects_to_zero(rng):
    d = Domain.make(2, 2 * math.pi, "odd-periodic", grid_n=16, band=4)
    f = random_field(d, rng, 1.0)
    assert np.max(np.abs(square(f).data)) == 0.0


def test_inner_orthonormality():
    f1 = SpectralField.from_modes(D_DIR, {1: 1.0})
    f2 = SpectralField.from_modes(D_DIR, {2: 1.0})
    assert_allclose(inner(f1, f1), 1.0, rtol=1e-14)
    assert abs(inner(f1, f2)) <= 1e-15


def test_inner_cube_value():
    # <phi1^3, phi1> = 3/(2L) = 3/pi at L = pi/2
    phi1 = SpectralField.from_modes(D_DIR_HALF, {1: 1.0})
    assert_allclose(inner(cube(phi1), phi1), 3 / math.pi, rtol=1e-13)
    ref = oracles.inner_quadrature_oracle(cube(phi1), phi1)
    assert_allclose(inner(cube(phi1), phi1), ref, rtol=1e-10)


def test_inner_domain_mismatch():
    f = SpectralField.from_modes(D_DIR, {1: 1.0})
    g = SpectralField.from_modes(D_DIR_HALF, {1: 1.0})
    with pytest.raises(DomainMismatch):
        inner(f, g)


def test_cube_odd_periodic_closure(rng):
    # cube of an odd-periodic field stays odd: antisymmetric grid values
    d = Domain.make(1, 2 * math.pi, "odd-periodic", grid_n=64, band=16)
    f = random_field(d, rng, 0.8)
    v = to_grid(cube(f)).values
    flipped = -np.concatenate(([v[0]], v[:0:-1]))  # u(-x) on the grid
    assert_allclose(v, flipped, atol=1e-13)
    assert np.max(np.abs(cube(f).data.real)) == 0.0


def test_multiply_bilinear(rng):
    d = Domain.make(1, 2 * math.pi, "periodic", grid_n=64, band=16)
    f, g, h = (random_field(d, rng, 0.5) for _ in range(3))
    lhs = multiply(f + g, h)
    rhs = multiply(f, h) + multiply(g, h)
    assert np.max(np.abs(lhs.data - rhs.data)) <= 1e-13


def test_triple_matches_cube(rng):
    d = Domain.make(1, 2 * math.pi, "odd-periodic", grid_n=64, band=16)
    f = random_field(d, rng, 0.7)
    assert np.max(np.abs(triple(f, f, f).data - cube(f).data)) <= 1e-14


def test_aliasing_error():
    d = Domain.make(1, math.pi, "dirichlet", grid_n=16, band=8)  # band > grid/4
    f = SpectralField.from_modes(d, {1: 1.0})
    with pytest.raises(AliasingError):
        cube(f)
    with pytest.raises(AliasingError):
        square(f)


def test_domain_validation():
    with pytest.raises(ValueError):
        Domain.make(2, 1.0, "dirichlet")
    with pytest.raises(ValueError):
        Domain.make(1, 1.0, "dirichlet", grid_n=48)  # not a power of two
    with pytest.raises(ValueError):
        Domain.make(1, -1.0, "dirichlet")
    with pytest.raises(ValueError):
        Domain.make(1, 1.0, "nonsense")


def test_mode_normalization():
    d = Domain.make(2, 2 * math.pi, "periodic", grid_n=16, band=4)
    f = SpectralField.from_modes(d, {("sin", (-1, 2)): 0.5})
    assert_allclose(f.coeff(("sin", (1, -2))), -0.5, rtol=1e-14)
    assert_allclose(f.coeff(("sin", (-1, 2))), 0.5, rtol=1e-14)
    with pytest.raises(ValueError):
        SpectralField.from_modes(d, {("sin", (0, 0)): 1.0})
    do = Domain.make(1, 2 * math.pi, "odd-periodic", grid_n=16, band=4)
    with pytest.raises(ValueError):
        SpectralField.from_modes(do, {("cos", (1,)): 1.0})


def test_translate_periodic(rng):
    d = Domain.make(1, 2 * math.pi, "periodic", grid_n=64, band=16)
    f = random_field(d, rng, 1.0)
    g = translate(f, (5,))
    assert abs(g.norm() - f.norm()) <= 1e-13
    # translated grid values equal rolled grid values
    assert_allclose(to_grid(g).values, np.roll(to_grid(f).values, 5), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(hst.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
       hst.floats(min_value=-2.0, max_value=2.0, allow_nan=False))
def test_field_arithmetic_parseval(a, b):
    f = SpectralField.from_modes(D_DIR, {1: a, 3: b})
    assert abs(f.norm() - math.hypot(a, b)) <= 1e-12 * (1 + math.hypot(a, b))
    g = -1.0 * f + 2.0 * f
    assert np.max(np.abs(g.data - f.data)) <= 1e-14


def test_snapshot_export(tmp_path, rng):
    f1 = random_field(D_DIR, rng, 1.0)
    p1 = tmp_path / "snap.csv"
    write_csv_1d(to_grid(f1), p1)
    lines = p1.read_text().strip().splitlines()
    assert lines[0] == "x,u"
    assert len(lines) == D_DIR.grid_n[0] + 1

    d2 = Domain.make(2, 2 * math.pi, "periodic", grid_n=16, band=4)
    f2 = random_field(d2, rng, 1.0)
    p2 = tmp_path / "snap.pgm"
    write_pgm_2d(to_grid(f2), p2)
    head = p2.read_text().splitlines()
    assert head[0] == "P2"
    assert head[1] == "16 16"
    vals = [int(v) for row in head[3:] for v in row.split()]
    assert min(vals) >= 0 and max(vals) <= 255
