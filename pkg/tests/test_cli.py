import io
import json
import re

import pytest

from lemniscope.cli import main

E44 = {"p": {"roots": [[1, 0], [-1, 0], [2, 0], [-2, 0]]}}
E44_3 = {"p": {"roots": [[1, 0], [-1, 0], [2, 0], [-2, 0]], "leading": [1 / 3, 0]}}
RAT = {"p": {"coeffs": [[-1, 0], [0, 0], [1, 0]]}, "q": {"coeffs": [[1, 0], [0, 0], [1, 0]]}}
RAT2 = {"p": {"coeffs": [[-4, 0], [0, 0], [1, 0]]}, "q": {"coeffs": [[1, 0], [0, 0], [1, 0]]}}
QUAD = {"p": {"coeffs": [[-0.25, 0], [0, 0], [1, 0]]}}
CUBE = {"p": {"coeffs": [[0, 0], [0, 0], [0, 0], [1, 0]]}}
CONST = {"p": {"coeffs": [[3, 0]]}}


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def _run(tmp_path, *argv, data=None, out="out.txt"):
    args = list(argv)
    if data is not None:
        args += ["-i", _write(tmp_path, "in.json", data)]
    dest = tmp_path / out
    code = main(args + ["-o", str(dest)])
    return code, (dest.read_text() if dest.exists() else None)


def test_analyze_quartic(tmp_path):
    code, text = _run(tmp_path, "analyze", data=E44)
    rep = json.loads(text)
    assert code == 0 and rep["ok"]
    assert len(rep["critical_values"]) == 3
    assert rep["connectivity"]["predicate"] == "disconnected"
    assert rep["connectivity"]["traced_components"] == 3
    kinds = [f["kind"] for f in rep["domains"]["faces"]]
    assert kinds.count("circle") == 5 and kinds.count("ring") == 2
    assert all(t["ok"] for t in rep["teichmuller"])
    assert rep["provenance"]["tolerances"]["trace"] == 1e-8
    assert rep["input"] == E44


def test_analyze_rational_connected(tmp_path):
    code, text = _run(tmp_path, "analyze", data=RAT)
    assert code == 0 and json.loads(text)["connectivity"]["predicate"] == "connected"


def test_analyze_is_deterministic(tmp_path):
    _, a = _run(tmp_path, "analyze", data=E44, out="a.json")
    _, b = _run(tmp_path, "analyze", data=E44, out="b.json")
    assert a == b


def _svg_counts(svg):
    root = re.search(r"<svg [^>]*>", svg).group(0)
    return {k: int(v) for k, v in re.findall(r'data-([a-z-]+)="(\d+)"', root)}


@pytest.mark.parametrize(
    "data, counts",
    [
        (RAT, {"vertices": 2, "edges": 4, "components": 1, "circle-faces": 4, "ring-faces": 0}),
        (RAT2, {"vertices": 2, "edges": 4, "components": 2, "circle-faces": 4, "ring-faces": 1}),
        (E44, {"vertices": 3, "edges": 6, "components": 3, "circle-faces": 5, "ring-faces": 2}),
    ],
)
def test_render_counts(tmp_path, data, counts):
    code, svg = _run(tmp_path, "render", data=data, out="g.svg")
    assert code == 0 and svg.startswith("<?xml")
    assert _svg_counts(svg) == counts
    assert svg.count('class="edge"') == counts["edges"]


def test_render_level_overlay_is_deterministic(tmp_path):
    _, a = _run(tmp_path, "render", "--level", "1", data=E44_3, out="a.svg")
    _, b = _run(tmp_path, "render", "--level", "1", data=E44_3, out="b.svg")
    assert a == b
    assert a.count('class="level"') == 2  # ring-domain loop around {1, 2} and its mirror


def test_fingerprint_cube(tmp_path):
    code, text = _run(tmp_path, "fingerprint", data=CUBE)
    (entry,) = json.loads(text)["components"]
    assert code == 0 and entry["scope"] == "eks" and entry["report"]["residual"] < 1e-12


def test_fingerprint_ring_component(tmp_path):
    code, text = _run(tmp_path, "fingerprint", "--around", "1.5", "0", data=E44_3)
    (entry,) = json.loads(text)["components"]
    assert code == 0 and entry["scope"] == "thm3" and entry["report"]["residual"] <= 1e-3


def test_fingerprint_level_normalisation(tmp_path):
    code, text = _run(tmp_path, "fingerprint", "--level", "3", "--around", "1.5", "0", data=E44)
    (entry,) = json.loads(text)["components"]
    assert code == 0 and entry["normalized"] and entry["report"]["residual"] <= 1e-3


def test_verify_passes(tmp_path):
    code, text = _run(tmp_path, "verify", data=RAT2)
    rep = json.loads(text)
    assert code == 0 and rep["ok"] and all(c["ok"] for c in rep["checks"])


# exit-code matrix

@pytest.mark.parametrize(
    "argv, data, expected",
    [
        (["analyze"], E44, 0),
        (["analyze"], "{not json", 64),
        (["analyze"], CONST, 64),
        (["analyze"], {"p": {"coeffs": "x"}}, 64),
        (["analyze", "--bogus"], E44, 64),
        (["frobnicate"], E44, 64),
        (["fingerprint"], RAT, 64),
        (["fingerprint", "--level", "2.25"], E44, 64),  # critical level
        (["fingerprint", "--tol-fingerprint", "1e-30"], QUAD, 2),
        (["fingerprint", "--samples", "16"], QUAD, 1),
        (["verify"], E44, 0),
    ],
)
def test_exit_codes(tmp_path, argv, data, expected):
    args = argv + ["-i", _write(tmp_path, "in.json", data), "-o", str(tmp_path / "o")]
    try:
        code = main(args)
    except SystemExit as exc:  # argparse exits directly
        code = exc.code
    assert code == expected


def test_missing_input_file(tmp_path):
    assert main(["analyze", "-i", str(tmp_path / "nope.json")]) == 64


def test_stdin_input(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(QUAD)))
    assert main(["analyze"]) == 0
    assert json.loads(capsys.readouterr().out)["ok"]


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "lemniscope", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("lemniscope ")
