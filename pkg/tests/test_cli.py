import json
import subprocess
import sys

import pytest

from lieapp import catalog as cat
from lieapp import cli
from lieapp import io


def run(*argv):
    return cli.run(list(argv) + ["--quiet"])


def checks(doc):
    return {c["name"]: c for c in doc["checks"]}


@pytest.mark.parametrize("name", ["catenoid", "torus", "pseudosphere", "unduloid", "cylinder"])
def test_analyze_passes_on_catalog(name):
    code, doc = run("analyze", "--surface", name, "--grid", "32x32", "--strict")
    assert code == 0, [c for c in doc["checks"] if not c["pass"]] if doc else None
    assert all(c["pass"] for c in doc["checks"])
    for c in doc["checks"]:
        assert c["identity"] and c["threshold"] > 0


def test_report_and_mesh_files(tmp_path):
    out, mesh = tmp_path / "r.json", tmp_path / "m.obj"
    code, _ = run("calapso", "--surface", "catenoid", "--grid", "24x24", "--t", "0.1,0.3",
                  "--out", str(out), "--mesh", str(mesh))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["command"] == "calapso"
    assert {"checks", "results", "tables", "timings"} <= set(doc)
    assert (tmp_path / "m_t0.1.obj").exists() and (tmp_path / "m_t0.3.obj").exists()


def test_geometry_error_exit_code(tmp_path):
    assert run("analyze", "--surface", "sphere", "--grid", "16x16")[0] == cli.EXIT_GEOMETRY
    g = cat.sample(cat.catalog("catenoid"), 12, 12)
    doc = io.grid_to_dict(g)
    doc["fields"]["n"] = [2 * x for x in doc["fields"]["n"]]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    assert run("analyze", "--input", str(p))[0] == cli.EXIT_GEOMETRY


@pytest.mark.parametrize("argv", [
    ["analyze"],
    ["analyze", "--surface", "catenoid", "--grid", "4x4"],
    ["analyze", "--surface", "catenoid", "--grid", "12xa"],
    ["analyze", "--surface", "torus", "--params", "R=1,r=2"],
    ["analyze", "--surface", "catenoid", "--lw", "0,0,0"],
    ["analyze", "--surface", "cylinder", "--lw", "auto", "--grid", "16x16"],
    ["analyze", "--surface", "catenoid", "--tol.bogus=1"],
    ["darboux", "--surface", "catenoid", "--seed-mode", "free", "--seed-angles", "1,2"],
])
def test_config_error_exit_code(argv):
    assert run(*argv)[0] == cli.EXIT_CONFIG


def test_strict_failure_and_tolerance_override():
    code, doc = run("analyze", "--surface", "catenoid", "--grid", "16x16", "--strict", "--tol.isotropy=1e-30")
    assert code == cli.EXIT_STRICT
    assert not checks(doc)["isotropy"]["pass"]
    assert checks(doc)["isotropy"]["threshold"] == 1e-30
    code, doc = run("analyze", "--surface", "catenoid", "--grid", "16x16", "--tol.isotropy", "1e-30")
    assert code == 0 and checks(doc)["isotropy"]["threshold"] == 1e-30


def test_wrong_triple_fails_closedness():
    code, doc = run("analyze", "--surface", "catenoid", "--grid", "32x32", "--lw", "0,1,0.3", "--strict")
    assert code == cli.EXIT_STRICT
    assert not checks(doc)["closedness"]["pass"]


def test_auto_triple():
    code, doc = run("analyze", "--surface", "pseudosphere", "--grid", "24x24", "--lw", "auto")
    assert code == 0
    assert doc["results"]["lw_triple"] == pytest.approx([1.0, 0.0, 1.0], abs=1e-8)


def test_file_input_matches_catalog(tmp_path):
    g = cat.sample(cat.catalog("catenoid"), 24, 24)
    p = tmp_path / "g.json"
    io.save_grid(g, p)
    code, doc = run("analyze", "--input", str(p), "--lw", "0,1,0", "--strict")
    assert code == 0
    code, doc = run("classify", "--input", str(p), "--lw", "auto")
    assert code == 0 and doc["results"]["branch"] == "type1"


def test_classify():
    code, doc = run("classify", "--surface", "catenoid", "--grid", "24x24")
    assert code == 0
    assert doc["results"]["classes"] == {"p": "isothermic", "q": "l_isothermic"}
    code, doc = run("classify", "--surface", "torus", "--grid", "24x24")
    assert doc["results"]["branch"] == "tubular"


@pytest.mark.parametrize("mode", ["lw", "free", "constrained"])
def test_darboux_modes(mode, tmp_path):
    code, doc = run("darboux", "--surface", "catenoid", "--grid", "48x48", "--seed-mode", mode,
                    "--mesh", str(tmp_path / "d.obj"), "--strict")
    assert code == 0, [c for c in doc["checks"] if not c["pass"]]
    assert list(tmp_path.glob("d_seed*.obj"))


def test_convergence_command():
    code, doc = run("convergence", "--surface", "catenoid", "--grid", "16x16,32x32,64x64", "--strict")
    assert code == 0, [c for c in doc["checks"] if not c["pass"]]
    assert doc["tables"]


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "lieapp.cli", "classify", "--surface", "catenoid",
                          "--grid", "16x16"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "PASS" in res.stdout
