"""Rendering, graymap serialization, spectrum tables, figures."""

import numpy as np
import pytest

from ipfc.errors import ConfigError, DataError
from ipfc.field import SpectralField
from ipfc.lattice import ddqc_lattice, periodic_lattice
from ipfc.presets import ddqc_seed
from ipfc.reporting import (
    convergence_figure,
    energy_figure,
    physical_values,
    quantize,
    read_pgm,
    render_physical,
    spectrum_report,
    write_pgm,
)


def test_physical_values_constant_field():
    lat = periodic_lattice(2, (8, 8))
    f = SpectralField.from_modes(lat, {(0, 0): 1.25})
    vals = physical_values(f, (0.0, 1.0, 0.0, 1.0), (4, 4))
    assert vals.shape == (4, 4)
    assert np.allclose(vals, 1.25, atol=1e-14)


def test_physical_values_1d_cosine_at_pixel_centers():
    lat = periodic_lattice(1, (16,))
    f = SpectralField.from_modes(lat, {(1,): 0.5, (-1,): 0.5})
    vals = physical_values(f, (0.0, 2 * np.pi), (8,))
    x = (np.arange(8) + 0.5) * (2 * np.pi / 8)
    assert vals.shape == (1, 8)  # single raster row, ready for graymap output
    assert np.allclose(vals[0], np.cos(x), atol=1e-13)


def test_physical_values_row_zero_is_top():
    lat = periodic_lattice(2, (8, 8))
    # f = sin(y): grows upward, so the top rows must exceed the bottom rows
    f = SpectralField.from_modes(lat, {(0, 1): -0.5j, (0, -1): 0.5j})
    vals = physical_values(f, (0.0, np.pi, 0.0, np.pi), (4, 4))
    y_top = (4 - 0.5) * np.pi / 4  # row 0 center
    assert vals[0, 0] == pytest.approx(np.sin(y_top), abs=1e-13)
    assert vals[0, 0] > vals[-1, 0]


def test_physical_values_threshold_skips_weak_modes():
    lat = periodic_lattice(1, (16,))
    f = SpectralField.from_modes(lat, {(1,): 0.5, (-1,): 0.5,
                                       (3,): 1e-9, (-3,): 1e-9})
    full = physical_values(f, (0.0, 2 * np.pi), (8,))
    cut = physical_values(f, (0.0, 2 * np.pi), (8,), threshold=1e-6)
    x = (np.arange(8) + 0.5) * (2 * np.pi / 8)
    assert np.allclose(cut, np.cos(x), atol=1e-14)
    assert np.max(np.abs(full - cut)) > 1e-10


def test_physical_values_validation():
    lat = periodic_lattice(1, (16,))
    f = SpectralField.zeros(lat)
    with pytest.raises(ConfigError):
        physical_values(f, (0.0, 1.0, 0.0, 1.0), (8,))  # bbox length mismatch
    with pytest.raises(ConfigError):
        physical_values(f, (0.0, 1.0), (8, 8))
    with pytest.raises(ConfigError):
        physical_values(f, (0.0, 1.0), (1,))  # below minimum resolution


def test_quantize_range_and_constant():
    vals = np.array([[0.0, 1.0], [2.0, 4.0]])
    pixels, vmin, vmax = quantize(vals)
    assert pixels.dtype == np.uint8
    assert pixels[0, 0] == 0 and pixels[1, 1] == 255
    assert (vmin, vmax) == (0.0, 4.0)
    flat, lo, hi = quantize(np.full((3, 3), 7.5))
    assert np.all(flat == 0) and lo == hi == 7.5


def test_pgm_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    vals = rng.uniform(-3.0, 2.0, size=(6, 9))
    path = tmp_path / "img.pgm"
    write_pgm(path, vals)
    pixels, vmin, vmax = read_pgm(path)
    assert pixels.shape == (6, 9)
    assert vmin == vals.min() and vmax == vals.max()
    want, _, _ = quantize(vals)
    assert np.array_equal(pixels, want)
    head = path.read_bytes().split(b"\n")
    assert head[0] == b"P5"
    assert head[1].startswith(b"# min=")
    assert head[2] == b"9 6"
    assert head[3] == b"255"


def test_read_pgm_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P6\n# min=0 max=1\n2 2\n255\n\0\0\0\0")
    with pytest.raises(DataError):
        read_pgm(bad)
    bad.write_bytes(b"P5\n# min=0 max=1\n2 2\n255\n\0")  # payload too short
    with pytest.raises(DataError):
        read_pgm(bad)


def test_render_physical_writes_file(tmp_path):
    lat = ddqc_lattice((8, 8, 8, 8))
    f = ddqc_seed(lat, 0.3)
    path = tmp_path / "slice.pgm"
    span = 4 * np.pi
    vals = render_physical(f, (0.0, span, 0.0, span), (32, 32), 0.0, path)
    assert vals.shape == (32, 32)
    pixels, vmin, vmax = read_pgm(path)
    assert pixels.shape == (32, 32)
    assert vmin < vmax


def test_render_is_stable_across_dump_reload(tmp_path):
    from ipfc.field import read_dump, write_dump

    lat = ddqc_lattice((8, 8, 8, 8))
    f = ddqc_seed(lat, 0.3)
    dump = tmp_path / "state.ipfc"
    write_dump(f, dump)
    g = read_dump(dump, lat)
    a = physical_values(f, (0.0, 10.0, 0.0, 10.0), (16, 16))
    b = physical_values(g, (0.0, 10.0, 0.0, 10.0), (16, 16))
    assert np.array_equal(a, b)


def test_spectrum_report_orders_and_canonicalizes():
    lat = periodic_lattice(2, (16, 16))
    f = SpectralField.from_modes(lat, {
        (1, 0): 0.5, (-1, 0): 0.5,
        (0, 2): 0.3j, (0, -2): -0.3j,
        (2, 1): 0.1, (-2, -1): 0.1,
    })
    top = spectrum_report(f, 3)
    assert [e.index for e in top] == [(1, 0), (0, 2), (2, 1)]
    assert top[0].magnitude == pytest.approx(0.5)
    assert top[1].magnitude == pytest.approx(0.3)
    assert np.allclose(top[0].wavevector, lat.wavevector((1, 0)))
    # first nonzero component positive: (-1, 0) never appears
    for e in top:
        lead = next(c for c in e.index if c != 0)
        assert lead > 0


def test_spectrum_report_tie_break_is_lexicographic():
    lat = periodic_lattice(2, (16, 16))
    f = SpectralField.from_modes(lat, {
        (0, 3): 0.2, (0, -3): 0.2,
        (3, 0): 0.2, (-3, 0): 0.2,
    })
    top = spectrum_report(f, 2)
    assert [e.index for e in top] == [(0, 3), (3, 0)]


def test_spectrum_report_validates_top_k():
    lat = periodic_lattice(1, (8,))
    with pytest.raises(ConfigError):
        spectrum_report(SpectralField.zeros(lat), 0)


def test_figures_are_written(tmp_path):
    epath = tmp_path / "energy.png"
    energy_figure(epath, [0.0, 1.0, 2.0], [3.0, 2.5, 2.2], [3.0, 2.6, 2.3])
    assert epath.stat().st_size > 0
    cpath = tmp_path / "convergence.png"
    convergence_figure(cpath, [
        ("cn", 64, 0.2 / 64, 1e-3), ("cn", 128, 0.2 / 128, 2.5e-4),
        ("cn_sdc", 64, 0.2 / 64, 1e-5), ("cn_sdc", 128, 0.2 / 128, 6e-7),
    ])
    assert cpath.stat().st_size > 0
