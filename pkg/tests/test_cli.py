"""CLI subcommands: exit codes, JSON documents and round-trips."""

import json

import numpy as np
import pytest

from casimirkit.builders import FlatTorus, sphere_octahedron
from casimirkit.cli import (EXIT_DIFFERENT, EXIT_INVALID, EXIT_NOT_SIMPLE,
                            EXIT_OK, main)
from casimirkit.meshio import write_off, write_oneform, write_scalars


@pytest.fixture(scope="module")
def torus_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    ft = FlatTorus(24)
    values = np.cos(ft.y) + 0.5 * np.cos(ft.x)
    write_off(d / "t.off", ft.surface)
    write_scalars(d / "t.field", values)
    write_oneform(d / "t.form", ft.closed_form_dx() + ft.closed_form_dy() * 0.5)
    write_oneform(d / "t2.form", ft.closed_form_dx() * 2.0)
    write_scalars(d / "bad.field", np.cos(ft.x))
    return d


def run(*argv):
    return main([str(a) for a in argv])


def test_analyze_ok(torus_files, tmp_path):
    out = tmp_path / "g.json"
    assert run("analyze", torus_files / "t.off", torus_files / "t.field",
               "-o", out) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["version"] == "casimir-kit/1"
    assert len(doc["nodes"]) == 4
    assert len(doc["arcs"]) == 4
    assert doc["betti1"] == 1


def test_analyze_not_simple(torus_files, capsys):
    code = run("analyze", torus_files / "t.off", torus_files / "bad.field")
    assert code == EXIT_NOT_SIMPLE
    assert "error" in capsys.readouterr().err


def test_analyze_missing_file(torus_files):
    assert run("analyze", torus_files / "nope.off",
               torus_files / "t.field") == EXIT_INVALID


def test_moments_roundtrip_reconstruct(torus_files, tmp_path, capsys):
    mdoc = tmp_path / "m.json"
    assert run("moments", torus_files / "t.off", torus_files / "t.field",
               "-o", mdoc) == EXIT_OK
    doc = json.loads(mdoc.read_text())
    assert all(entry["feasible"] for entry in doc["arcs"])
    arc = doc["arcs"][0]["id"]
    out = tmp_path / "w.csv"
    code = run("reconstruct", "--moments", mdoc, "--arc", arc, "-o", out)
    capsys.readouterr()
    assert code == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "lambda,w"
    assert len(lines) > 100


def test_circulation_document(torus_files, tmp_path):
    out = tmp_path / "c.json"
    assert run("circulation", torus_files / "t.off", torus_files / "t.field",
               torus_files / "t.form", "-o", out) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["residuals"]["newton_leibniz"] < 1e-8
    assert doc["residuals"]["kirchhoff"] < 1e-8
    for arc in doc["arcs"]:
        assert "c_tail" in arc and "c_head" in arc


def test_equiv_same(torus_files):
    assert run("equiv",
               torus_files / "t.off", torus_files / "t.field",
               torus_files / "t.form",
               torus_files / "t.off", torus_files / "t.field",
               torus_files / "t.form") == EXIT_OK


def test_equiv_different(torus_files, tmp_path):
    out = tmp_path / "verdict.json"
    code = run("equiv",
               torus_files / "t.off", torus_files / "t.field",
               torus_files / "t.form",
               torus_files / "t.off", torus_files / "t.field",
               torus_files / "t2.form", "-o", out)
    assert code == EXIT_DIFFERENT
    doc = json.loads(out.read_text())
    assert doc["same_orbit"] is False
    assert "witness" in doc


def test_simulate_trace(torus_files, tmp_path):
    init = tmp_path / "init.json"
    init.write_text(json.dumps(
        {"modes": [{"k": [0, 1], "amp": 1.0}, {"k": [1, 0], "amp": 0.5}]}))
    trace = tmp_path / "trace.json"
    code = run("simulate", "--n", 32, "--T", 0.1, "--init", init,
               "--moments", 4, "--trace", trace)
    assert code == EXIT_OK
    doc = json.loads(trace.read_text())
    assert max(doc["drift"]["moments"]) < 1e-8
    assert doc["drift"]["circulations"] < 1e-8


def test_deterministic_output(torus_files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("analyze", torus_files / "t.off", torus_files / "t.field", "-o", a)
    run("analyze", torus_files / "t.off", torus_files / "t.field", "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_usage_error_exit_code(capsys):
    assert run("analyze") == EXIT_INVALID
    capsys.readouterr()
