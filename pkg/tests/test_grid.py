"""Grid geometry, field containers, calculus stencils and .fld round trips."""

import numpy as np
import pytest

from casimirlab import (
    FieldFormatError,
    ScalarField,
    VectorField2,
    boundary_trace,
    curl2d,
    divergence,
    gradient,
    inner,
    inner2,
    make_grid,
    norm,
    norm2,
    read_field,
    supnorm,
    velocity_from_streamfunction,
    write_field,
)
from casimirlab.demo import eigenfunction_field
from casimirlab.grid import padded


def test_make_grid_rejects_coarse():
    for bad in (0, 1, 7, -4):
        with pytest.raises(ValueError):
            make_grid(bad)


def test_grid_geometry(g16):
    assert g16.h == 1.0 / 17.0
    assert g16.shape == (16, 16)
    x, y = g16.nodes()
    assert x.shape == (16, 16)
    assert x[0, 0] == g16.h and y[0, 0] == g16.h
    assert abs(x[-1, 0] - (1.0 - g16.h)) < 1e-15
    # x varies along axis 0, y along axis 1
    assert np.all(np.diff(x[:, 0]) > 0)
    assert np.all(x[:, 0] == x[:, 5])


def test_field_shape_mismatch_rejected(g16):
    with pytest.raises(ValueError):
        ScalarField(g16, np.zeros((16, 15)))
    with pytest.raises(ValueError):
        VectorField2(g16, np.zeros((16, 16)), np.zeros((15, 16)))


def test_eigenfunction_unit_norm(g16, g32, g64):
    # sum_{i=1..n} sin^2(pi i h) = (n+1)/2 exactly, so the sampled
    # 2 sin(p pi x) sin(q pi y) has discrete L2 norm 1 for every mode
    for g in (g16, g32, g64):
        for p, q in ((1, 1), (2, 1), (3, 3)):
            assert abs(norm(eigenfunction_field(g, p, q)) - 1.0) < 1e-13


def test_eigenfunctions_orthogonal(g32):
    a = eigenfunction_field(g32, 1, 1)
    b = eigenfunction_field(g32, 2, 1)
    c = eigenfunction_field(g32, 1, 2)
    assert abs(inner(a, b)) < 1e-15
    assert abs(inner(a, c)) < 1e-15
    assert abs(inner(b, c)) < 1e-15


def test_inner_rejects_grid_mismatch(g16, g32):
    a = ScalarField(g16, np.ones(g16.shape))
    b = ScalarField(g32, np.ones(g32.shape))
    with pytest.raises(ValueError):
        inner(a, b)


def test_padded_zero_trace_frame(g16, random_field):
    p = padded(random_field(g16, seed=3))
    assert p.shape == (18, 18)
    assert np.all(p[0, :] == 0.0) and np.all(p[-1, :] == 0.0)
    assert np.all(p[:, 0] == 0.0) and np.all(p[:, -1] == 0.0)


def test_padded_extrapolation_exact_for_quadratics(g16):
    # one-sided quadratic extrapolation reproduces degree <= 2 exactly
    x, y = g16.nodes()
    f = ScalarField(g16, 1.0 + 2.0 * x - y + 0.5 * x * y + x**2, zero_trace=False)
    p = padded(f)
    h = g16.h
    xs = np.arange(0, g16.n + 2) * h  # wall at 0 and 1 included
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    exact = 1.0 + 2.0 * xx - yy + 0.5 * xx * yy + xx**2
    assert np.max(np.abs(p - exact)) < 1e-12


def test_boundary_trace_extrapolation_order(g16, g32):
    # extrapolated trace of a smooth zero-wall function converges ~h^3
    sups = []
    for g in (g16, g32):
        f = eigenfunction_field(g, 1, 1)
        f_free = ScalarField(g, f.values, zero_trace=False)
        sups.append(np.max(np.abs(boundary_trace(f_free))))
    assert sups[0] < 5e-2
    assert sups[0] / sups[1] > 6.0


def test_gradient_exact_on_affine(g16):
    x, y = g16.nodes()
    f = ScalarField(g16, 0.3 - 1.25 * x + 4.0 * y, zero_trace=False)
    gv = gradient(f)
    assert np.max(np.abs(gv.ux + 1.25)) < 1e-12
    assert np.max(np.abs(gv.uy - 4.0)) < 1e-12


def test_gradient_trig_identity(g32):
    # centred difference of a sampled sine scales it by sin(p pi h)/h
    phi = eigenfunction_field(g32, 2, 1)
    gv = gradient(phi)
    h = g32.h
    x, y = g32.nodes()
    exact = 2.0 * (np.sin(2 * np.pi * h) / h) * np.cos(2 * np.pi * x) * np.sin(np.pi * y)
    assert np.max(np.abs(gv.ux[1:-1, :] - exact[1:-1, :])) < 1e-12


def test_velocity_requires_zero_trace(g16):
    f = ScalarField(g16, np.ones(g16.shape), zero_trace=False)
    with pytest.raises(ValueError):
        velocity_from_streamfunction(f)


def test_velocity_is_rotated_gradient(g16, random_field):
    psi = random_field(g16, seed=11)
    gv = gradient(psi)
    u = velocity_from_streamfunction(psi)
    assert np.array_equal(u.ux, gv.uy)
    assert np.array_equal(u.uy, -gv.ux)


def test_divergence_of_streamfunction_velocity_second_order():
    sups = []
    for n in (16, 32, 64):
        g = make_grid(n)
        u = velocity_from_streamfunction(eigenfunction_field(g, 1, 1))
        sups.append(supnorm(divergence(u)))
    # interior rows are exactly zero; the boundary ring decays ~h^2
    assert sups[0] / sups[1] > 3.0
    assert sups[1] / sups[2] > 3.0


def test_divergence_rounding_level_at_interior(g32, random_field):
    # away from the extrapolated ring the two cross-derivative stencils
    # cancel up to regrouping of the same four corner samples
    psi = random_field(g32, seed=5)
    u = velocity_from_streamfunction(psi)
    d = divergence(u)
    cancel_tol = 50 * np.finfo(float).eps * supnorm(psi) / g32.h**2
    assert np.max(np.abs(d.values[2:-2, 2:-2])) < cancel_tol


def test_curl_of_streamfunction_velocity(g32):
    # curl(u) with u from a sampled sine equals the wide-stencil
    # eigenvalue (sin^2(p pi h) + sin^2(q pi h))/h^2 times the sine,
    # exactly away from the two extrapolated rings
    p, q = 2, 3
    phi = eigenfunction_field(g32, p, q)
    w = curl2d(velocity_from_streamfunction(phi))
    h = g32.h
    lam = (np.sin(p * np.pi * h) ** 2 + np.sin(q * np.pi * h) ** 2) / h**2
    err = w.values - lam * phi.values
    assert np.max(np.abs(err[2:-2, 2:-2])) < 1e-11


def test_vector_norms_consistent(g16, rng):
    u = VectorField2(g16, rng.standard_normal(g16.shape), rng.standard_normal(g16.shape))
    assert abs(norm2(u) ** 2 - inner2(u, u)) < 1e-14
    ax = ScalarField(g16, u.ux)
    ay = ScalarField(g16, u.uy)
    assert abs(inner2(u, u) - (inner(ax, ax) + inner(ay, ay))) < 1e-14


def test_supnorm(g16):
    v = np.zeros(g16.shape)
    v[3, 4] = -7.5
    assert supnorm(ScalarField(g16, v)) == 7.5


def test_field_round_trip_bitwise(tmp_path, g16, g32):
    for seed, g in enumerate((g16, g32, g16)):
        f = ScalarField(g, np.random.default_rng(seed).standard_normal(g.shape))
        path = tmp_path / f"f{seed}.fld"
        write_field(path, f)
        back = read_field(path, zero_trace=True)
        assert back.grid.n == g.n
        assert back.zero_trace
        assert np.array_equal(back.values, f.values)


def test_read_field_error_paths(tmp_path, g16):
    f = ScalarField(g16, np.zeros(g16.shape))
    good = tmp_path / "good.fld"
    write_field(good, f)
    raw = good.read_bytes()

    bad_magic = tmp_path / "magic.fld"
    bad_magic.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(FieldFormatError):
        read_field(bad_magic)

    bad_version = tmp_path / "version.fld"
    bad_version.write_bytes(raw[:4] + b"\x02\x00\x00\x00" + raw[8:])
    with pytest.raises(FieldFormatError):
        read_field(bad_version)

    short_header = tmp_path / "short.fld"
    short_header.write_bytes(raw[:10])
    with pytest.raises(FieldFormatError):
        read_field(short_header)

    short_data = tmp_path / "data.fld"
    short_data.write_bytes(raw[:-16])
    with pytest.raises(FieldFormatError):
        read_field(short_data)

    rect = tmp_path / "rect.fld"
    import struct

    rect.write_bytes(struct.pack("<4sIII4d", b"CASF", 1, 16, 15, 0.0, 1.0, 0.0, 1.0))
    with pytest.raises(FieldFormatError):
        read_field(rect)
