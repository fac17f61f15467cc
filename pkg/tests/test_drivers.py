"""Evolution and convergence drivers: CSV artifacts, dumps, figures."""

import csv
import math

import numpy as np
import pytest

from ipfc.config import parse_config
from ipfc.drivers import (
    CSV_COLUMNS,
    coefficient_error,
    format_converge_table,
    run_converge,
    run_evolve,
)
from ipfc.errors import BlowupError, ConfigError
from ipfc.field import norm_ap, read_dump
from ipfc.lattice import periodic_lattice
from ipfc.presets import sine_seed
from ipfc.sdc import chebyshev_nodes


def evolve_cfg(tmp_path, **over):
    data = {
        "model": {"scales": [math.sqrt(2.0), math.sqrt(3.0)], "epsilon": 10.0,
                  "alpha": 4.0, "c1": 1e4},
        "lattice": {"preset": "periodic", "N": [32]},
        "time": {"scheme": "cn", "T": 0.2, "NT": 8},
        "init": {"preset": "sine", "amplitude": 1.0},
        "output": {"directory": str(tmp_path / "out"), "dump_every": 4},
    }
    for dotted, value in over.items():
        section, key = dotted.split("__")
        data.setdefault(section, {})[key] = value
    return parse_config(data)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_evolve_writes_csv_rows_per_step(tmp_path):
    cfg = evolve_cfg(tmp_path)
    result = run_evolve(cfg)
    rows = read_rows(result.csv_path)
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 1 + 9  # header + initial row + 8 steps
    for k, row in enumerate(rows[1:]):
        assert int(row[0]) == k
        float(row[1]), float(row[2]), float(row[3]), float(row[4])
        assert row[5] == "0"  # the mean mode never budges
    assert float(rows[1][1]) == 0.0
    assert float(rows[-1][1]) == pytest.approx(0.2, rel=1e-12)
    # energies in the log decrease for this strongly damped setup
    orig = [float(r[2]) for r in rows[1:]]
    mod = [float(r[3]) for r in rows[1:]]
    assert orig[-1] < orig[0]
    assert all(b <= a + 1e-10 * abs(a) for a, b in zip(mod, mod[1:]))


def test_evolve_dump_cadence_and_figure(tmp_path):
    cfg = evolve_cfg(tmp_path)
    result = run_evolve(cfg)
    names = sorted(p.name for p in result.dump_paths)
    # cadence 4 on 8 steps: steps 0, 4, 8; the final state is step 8
    assert names == ["state_000000.ipfc", "state_000004.ipfc", "state_000008.ipfc"]
    for p in result.dump_paths:
        assert p.exists()
    final = read_dump(result.dump_paths[-1], cfg.lattice)
    assert np.array_equal(final.coeffs, result.state.phi.coeffs)
    assert result.figure_path is not None and result.figure_path.exists()
    assert result.image_paths == []  # no render block configured


def test_evolve_renders_images_with_dumps(tmp_path):
    cfg = evolve_cfg(tmp_path, output__render={
        "bbox": [0.0, 2 * math.pi], "resolution": [64]})
    result = run_evolve(cfg)
    assert [p.name for p in result.image_paths] == [
        "state_000000.pgm", "state_000004.pgm", "state_000008.pgm"]
    for p in result.image_paths:
        assert p.read_bytes().startswith(b"P5\n# min=")


def test_evolve_without_figures_or_dumps(tmp_path):
    cfg = evolve_cfg(tmp_path, output__figures=False, output__dump_every=0)
    result = run_evolve(cfg)
    assert result.figure_path is None
    # final state is always preserved even with cadence off
    assert [p.name for p in result.dump_paths] == ["state_000008.ipfc"]


def test_evolve_blowup_keeps_partial_log_and_last_good_dump(tmp_path):
    cfg = evolve_cfg(tmp_path, model__scales=[1.0], model__epsilon=-5.0,
                     model__alpha=0.0, model__c1=1e16,
                     lattice__N=[16], time__T=4e120, time__NT=4)
    with pytest.raises(BlowupError):
        run_evolve(cfg)
    out = cfg.output.directory
    rows = read_rows(out / "energy.csv")
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) >= 2  # header plus at least the initial row
    dumps = sorted(out.glob("state_*.ipfc"))
    assert len(dumps) >= 1
    read_dump(dumps[-1], cfg.lattice)  # parseable, finite payload


def test_evolve_cn_sdc_rows_sit_on_chebyshev_nodes(tmp_path):
    cfg = evolve_cfg(tmp_path, time__scheme="cn_sdc", time__NT=8)
    result = run_evolve(cfg)
    rows = read_rows(result.csv_path)
    assert len(rows) == 1 + 9
    nodes = chebyshev_nodes(0.2, 8)
    got_t = [float(r[1]) for r in rows[1:]]
    assert np.allclose(got_t, nodes, rtol=0, atol=1e-15)
    assert all(r[5] == "0" for r in rows[1:])


def test_cn_sdc_endpoint_beats_cn_at_equal_steps(tmp_path):
    cn = run_evolve(evolve_cfg(tmp_path, output__directory=str(tmp_path / "a"),
                               output__figures=False))
    sdc = run_evolve(evolve_cfg(tmp_path, time__scheme="cn_sdc",
                                output__directory=str(tmp_path / "b"),
                                output__figures=False))
    from ipfc.model import ModelParams
    from ipfc.sav_cn import integrate_cn

    params = ModelParams(scales=(math.sqrt(2.0), math.sqrt(3.0)), epsilon=10.0,
                         alpha=4.0, c1=1e4)
    lat = periodic_lattice(1, (32,))
    oracle = integrate_cn(params, sine_seed(lat, 1.0), T=0.2, NT=3200).phi
    assert norm_ap(sdc.state.phi - oracle) < norm_ap(cn.state.phi - oracle)


def test_coefficient_error_scale():
    lat = periodic_lattice(1, (32,))
    a = sine_seed(lat, 1.0)
    b = sine_seed(lat, 0.5)
    # difference has two coefficients of modulus 1/4
    assert coefficient_error(a, b) == pytest.approx(32 * math.sqrt(2 * 0.25 ** 2),
                                                    rel=1e-13)


def converge_cfg(tmp_path, **over):
    cfg = evolve_cfg(tmp_path, **over)
    data = {
        "model": {"scales": [math.sqrt(2.0), math.sqrt(3.0)], "epsilon": 10.0,
                  "alpha": 4.0, "c1": 1e4},
        "lattice": {"preset": "periodic", "N": [32]},
        "time": {"scheme": "cn", "T": 0.2, "NT": 8},
        "init": {"preset": "sine", "amplitude": 1.0},
        "output": {"directory": str(tmp_path / "conv")},
        "converge": {"nts": [16, 32, 64], "reference_nt": 512},
    }
    return parse_config(data)


def test_run_converge_table_and_artifacts(tmp_path):
    cfg = converge_cfg(tmp_path)
    result = run_converge(cfg)
    by_scheme = {}
    for row in result.rows:
        by_scheme.setdefault(row.scheme, []).append(row)
    assert set(by_scheme) == {"cn", "cn_sdc"}
    for scheme, rows in by_scheme.items():
        assert [r.NT for r in rows] == [16, 32, 64]
        assert rows[0].rate is None
        errs = [r.error for r in rows]
        assert errs[0] > errs[1] > errs[2] > 0
        want_order = 2.0 if scheme == "cn" else 4.0
        for r in rows[1:]:
            assert r.rate == pytest.approx(want_order, abs=0.6)
    assert result.csv_path.exists()
    head = read_rows(result.csv_path)[0]
    assert head == ["scheme", "NT", "tau", "error", "rate"]
    assert result.figure_path is not None and result.figure_path.exists()
    table = format_converge_table(result)
    assert "cn_sdc" in table and "rate" in table


def test_run_converge_requires_section_and_headroom(tmp_path):
    plain = evolve_cfg(tmp_path)
    with pytest.raises(ConfigError):
        run_converge(plain)
    clashing = converge_cfg(tmp_path)
    object.__setattr__(clashing.converge, "nts", (16, 512))
    with pytest.raises(ConfigError):
        run_converge(clashing)
