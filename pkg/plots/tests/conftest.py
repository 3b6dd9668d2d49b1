"""Fixtures: externally produced field and diagnostics artifacts."""

import plotshelpers
import pytest


def pytest_terminal_summary(terminalreporter):
    if plotshelpers.acceptance_lines:
        terminalreporter.section("acceptance criteria (plots)")
        for line in plotshelpers.acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def demo_artifacts(tmp_path_factory):
    """Flat-band demo run: omega with a plateau at 1.3 and psi from the
    matching step generator (ramp fill), plus the plateau report."""
    out = tmp_path_factory.mktemp("demo")
    proc = plotshelpers.run_caslab([
        "casimir", "--omega", "plateau-demo", "--g", "plateau-demo",
        "--n", "64", "--out-dir", str(out),
    ])
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def smooth_artifacts(tmp_path_factory):
    """Same omega, but psi from a smooth (jump-free) generator, so the
    duality scatter must collapse onto a single monotone curve."""
    out = tmp_path_factory.mktemp("smooth")
    gpath = out / "smooth_g.txt"
    gpath.write_text(
        "knot 0.0 slope 0.0 intercept 0.0\n"
        "knot 1.1 slope 1.0 intercept -1.1\n"
    )
    proc = plotshelpers.run_caslab([
        "casimir", "--omega", "plateau-demo", "--g", str(gpath),
        "--n", "64", "--out-dir", str(out),
    ])
    assert (out / "omega.fld").exists() and (out / "psi.fld").exists(), proc.stderr
    return out


@pytest.fixture(scope="session")
def sim_artifacts(tmp_path_factory):
    """A short conservative run with one monitored Casimir, for drift plots."""
    out = tmp_path_factory.mktemp("sim")
    gpath = out / "quad_g.txt"
    gpath.write_text("knot 0.0 slope 1.0 intercept 0.0\n")
    proc = plotshelpers.run_caslab([
        "simulate", "--n", "24", "--dt", "0.01", "--t-end", "0.2",
        "--init", "eigenmix", "--diag-every", "2",
        "--casimir", str(gpath), "--out-dir", str(out),
    ])
    assert proc.returncode == 0, proc.stderr
    return out
