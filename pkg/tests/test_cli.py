import json
import subprocess
import sys

import pytest

from strongmult import __version__
from strongmult.cli import (
    COUNT_COLUMNS,
    DENSITY_COLUMNS,
    MAJORANT_COLUMNS,
    RunConfig,
    main,
    resolve_form,
    run,
    split_pair,
)
from strongmult.errors import ValidationError
from strongmult.forms import load_sequence, tau_sequence


def call(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_split_pair():
    assert split_pair("delta,e11") == ["delta", "e11"]
    assert split_pair("twist(delta,-4), e11") == ["twist(delta,-4)", "e11"]
    assert split_pair("twist(twist(e11,5),-4),cm32") == ["twist(twist(e11,5),-4)", "cm32"]
    for bad in ("delta", "a,b,c", "delta,"):
        with pytest.raises(ValidationError):
            split_pair(bad)


def test_resolve_form_variants(tmp_path):
    t = resolve_form("twist(delta,-4)", 200)
    assert t.descriptor.label == "twist(delta,-4)"
    with pytest.raises(ValidationError, match="unknown form"):
        resolve_form("nosuch", 100)
    path = tmp_path / "d.csv"
    path.write_text("# label=x weight=2 level=1 cm=0 bound=3\n2,1\n3,0\n")
    assert resolve_form(str(path), 3)[3] == 0
    with pytest.raises(ValidationError, match="only covers"):
        resolve_form(str(path), 100)


def test_gen_roundtrip(tmp_path, capsys):
    out = tmp_path / "delta.csv"
    code, _, _ = call(["gen", "--form", "delta", "--bound", "1000", "--out", str(out)], capsys)
    assert code == 0
    text = out.read_text()
    assert text.startswith("# label=delta weight=12 level=1 cm=0 bound=1000\n2,-24\n3,252\n")
    assert load_sequence(out) == tau_sequence(1000)
    out2 = tmp_path / "again.csv"
    assert main(["gen", "--form", str(out), "--bound", "1000", "--out", str(out2)]) == 0
    assert out2.read_bytes() == out.read_bytes()


def test_count_json(capsys):
    code, out, _ = call(["count", "--pair", "delta,e11", "--grid", "1e3,1e4", "--M", "10"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["version"] == __version__
    assert doc["invariants_passed"] and all(i["passed"] for i in doc["invariants"])
    assert doc["report"]["x_grid"] == [1000, 10000]
    assert doc["report"]["params"]["M"] == 10
    assert "constants" in doc and doc["constants"]["Wa-thm(iii)"] == 0.4


def test_count_csv_columns(capsys):
    code, out, _ = call(["count", "--pair", "delta,cm32", "--grid", "500", "--M", "5", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(COUNT_COLUMNS) and len(lines) == 2


def test_count_table(capsys):
    code, out, _ = call(["count", "--pair", "delta,e11", "--grid", "200", "--format", "table"], capsys)
    assert code == 0 and "n_square_equal" in out.splitlines()[0]


def test_densities(capsys):
    code, out, _ = call(["densities", "--pair", "delta,e11", "--X", "5000", "--selector", "S_0"], capsys)
    assert code == 0
    est = json.loads(out)["estimate"]
    assert est["selector"] == "S_0" and len(est["ratios"]) == 4
    code, out, _ = call(["densities", "--pair", "delta,e11", "--X", "5000", "--schedule", "1.3,1.2",
                         "--format", "csv"], capsys)
    assert code == 0 and out.splitlines()[0] == ",".join(DENSITY_COLUMNS)


def test_sato_tate(capsys):
    code, out, _ = call(["sato-tate", "--pair", "delta,e11", "--x", "2000", "--m-max", "2"], capsys)
    assert code == 0
    assert set(json.loads(out)["sato_tate"]) == {"1,1", "1,2", "2,1", "2,2"}


def test_majorant_check_csv(capsys):
    code, out, _ = call(["majorant-check", "--M", "1-3", "--delta", "default,0.05"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(MAJORANT_COLUMNS)
    assert len(lines) == 1 + 3 * 2 * 6
    assert all(line.endswith(",1") for line in lines[1:])


def test_bounds_single(capsys):
    code, out, _ = call(["bounds", "--theorem", "lD_S*", "--case", "nondihedral,nondihedral"], capsys)
    assert code == 0 and out.startswith("1/10.76 = ")
    code, out, _ = call(["bounds", "--theorem", "Main-dist", "--alpha", "3.141592653589793"], capsys)
    assert out.startswith("1/(6+2cos 2a-8cos a) = 0.0625")


def test_bounds_full_table(capsys):
    code, out, _ = call(["bounds", "--case", "dihedral,dihedral", "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert {"theorem": "lD_S*", "case": "", "value": 0.125, "formula": "1/8"} in rows


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--pair", "delta,nosuch", "--grid", "100"],
        ["count", "--pair", "delta,e11", "--grid", "100", "--delta", "1.5"],
        ["count", "--pair", "delta,e11", "--grid", "100", "--M", "0"],
        ["count", "--pair", "delta,e11", "--grid", "1000,100"],
        ["count", "--pair", "delta,e11", "--grid", "2e6"],
        ["gen", "--form", "twist(delta,-1)", "--bound", "100"],
        ["gen", "--form", "delta", "--bound", "abc"],
        ["densities", "--pair", "delta,e11", "--X", "100", "--selector", "S_bad"],
        ["bounds", "--theorem", "Wa-thm"],
        ["bounds", "--theorem", "nope", "--case", "dihedral,dihedral"],
        ["bounds", "--case", "maybe,dihedral"],
        ["nosuchcommand"],
    ],
)
def test_validation_exit_one(argv, capsys):
    code, _, err = call(argv, capsys)
    assert code == 1
    assert err.strip()


def test_cap_message_is_actionable(capsys):
    code, _, err = call(["count", "--pair", "delta,e11", "--grid", "2e6"], capsys)
    assert code == 1 and "--allow-large" in err


def test_malformed_file_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("# label=x weight=2 level=1 cm=0\n2,1\n4,5\n")
    code, _, err = call(["count", "--pair", f"{bad},e11", "--grid", "3"], capsys)
    assert code == 1 and "index not prime, line 3" in err


def test_invariant_failure_exit_two(monkeypatch, capsys):
    import strongmult.cli as cli

    real = cli.build_count_report

    def broken(*args, **kwargs):
        rep = real(*args, **kwargs)
        rep.invariants.append({"name": "forced", "x": 0, "passed": False})
        return rep

    monkeypatch.setattr(cli, "build_count_report", broken)
    code, out, err = call(["count", "--pair", "delta,e11", "--grid", "100"], capsys)
    assert code == 2 and "invariant" in err
    assert json.loads(out)["invariants_passed"] is False


def test_run_config_direct(tmp_path):
    out = tmp_path / "r.json"
    cfg = RunConfig("count", forms=["delta", "e11"], grid=[300], M=[4], out=str(out))
    assert run(cfg) == 0
    assert json.loads(out.read_text())["report"]["params"]["M"] == 4


def test_byte_identical_reruns(tmp_path):
    paths = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        assert main(["count", "--pair", "delta,e11", "--grid", "1e3,5e3", "--M", "7", "--out", str(p)]) == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "c.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "strongmult.cli", "gen", "--form", "cm32", "--bound", "100", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().splitlines()[1] == "3,0"
