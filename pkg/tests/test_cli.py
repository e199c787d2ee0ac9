import io
import json
import subprocess
import sys

import pytest

from qloop.cli import UsageError, parse_config, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_qchar_kr_a1_l2():
    code, out, _ = call("qchar", "kr", "--preset", "A1", "--i", "1", "--k", "0", "--l", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "monomial\tcoefficient\tv"
    assert lines[1:] == [
        "Y[1,-1] * Y[1,1]\t1\t0",
        "Y[1,-1] * Y[1,3]^-1\t1\t[1,2]:1",
        "Y[1,1]^-1 * Y[1,3]^-1\t1\t[1,0]:1,[1,2]:1",
    ]


def test_qchar_json_schema():
    code, out, _ = call("qchar", "kr", "--preset", "A2", "--i", "1", "--l", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["schema_version"] == 1 and data["command"] == "qchar" and data["ok"]
    assert [r["monomial"] for r in data["rows"]] == ["Y[1,0]", "Y[1,2]^-1 * Y[2,1]", "Y[2,3]^-1"]
    assert data["rows"][2]["dims"] == [[1, 1, 1], [2, 2, 1]]


def test_qchar_support_only_b2():
    code, out, _ = call("qchar", "kr", "--preset", "B2", "--i", "2", "--l", "1", "--support-only")
    assert code == 0 and len(out.splitlines()) == 1 + 4


def test_qchar_pref():
    code, out, _ = call("qchar", "pref", "--preset", "A1", "--i", "1", "--depth", "2")
    assert code == 0 and len(out.splitlines()) == 1 + 3


def test_relations_example():
    code, out, err = call("relations", "--preset", "A1", "--w", "1", "--vmax", "2", "--modes", "2", "--shifted")
    assert code == 0, err
    statuses = [line.split("\t")[-1] for line in out.splitlines()[1:]]
    assert statuses and set(statuses) == {"pass"}


def test_grassmann_projective_chain():
    code, out, _ = call("grassmann", "--preset", "A1", "--i", "1", "--l", "2")
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()[1:]]
    assert [r[0] for r in rows] == ["0", "[1,2]:1", "[1,0]:1,[1,2]:1"]
    assert all(r[-1] == "1" for r in rows)


def test_limit_a1():
    code, out, _ = call("limit", "--preset", "A1", "--i", "1", "--k", "4", "--lmax", "4", "--depth", "2")
    assert code == 0
    assert "# stabilization index 3" in out


def test_central():
    code, out, _ = call("central", "--w", "1", "--vmax", "1")
    assert code == 0
    assert out.splitlines()[1].split("\t")[:3] == ["1", "0", "0"]


def test_validate_preset():
    code, out, _ = call("validate", "--preset", "B2")
    assert code == 0 and "lacing\t2" in out


def test_validate_bad_cartan_file(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("cartan = [[1]]\nsymmetrizer = [1]\n")
    code, _, err = call("validate", "--cartan-file", str(bad))
    assert code == 2 and "NotCartan" in err


def test_validate_cartan_file(tmp_path):
    good = tmp_path / "b2.txt"
    good.write_text('# B2, long root first\ncartan = [[2,-1],[-2,2]]\nsymmetrizer = [2,1]\norientation = [[1,2]]\n')
    code, out, _ = call("validate", "--cartan-file", str(good))
    assert code == 0 and "b\t[[4, -2], [-2, 2]]" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        [],
        ["qchar", "kr", "--preset", "A1", "--i", "1"],
        ["qchar", "kr", "--preset", "A1", "--i", "3", "--l", "1"],
        ["qchar", "pref", "--preset", "A1", "--i", "1"],
        ["validate"],
        ["validate", "--preset", "A1", "--cartan-file", "x"],
        ["validate", "--cartan-file", "/nonexistent/file"],
        ["relations", "--w", "-1"],
        ["central", "--w", "1", "--jobs", "0"],
    ],
)
def test_usage_errors_exit_1(argv):
    code, _, err = call(*argv)
    assert code == 1 and err


def test_env_jobs(monkeypatch):
    monkeypatch.setenv("QLOOP_JOBS", "many")
    assert call("central", "--w", "1")[0] == 1
    monkeypatch.setenv("QLOOP_JOBS", "2")
    assert call("central", "--w", "1")[0] == 0


def test_parse_config_grammar():
    cd = parse_config('preset = "G2"')
    assert cd.lacing == 3
    for text in ("cartan [[2]]", "colour = 3", "cartan = [[2]", 'preset = "A2"\ncartan = [[2]]', "cartan = [[2]]"):
        with pytest.raises(UsageError):
            parse_config(text)


@pytest.mark.parametrize(
    "argv",
    [
        ["grassmann", "--preset", "D4", "--i", "2", "--l", "1"],
        ["qchar", "kr", "--preset", "B2", "--i", "1", "--l", "1", "--format", "json"],
        ["relations", "--w", "1", "2", "--vmax", "2", "--modes", "1", "--shifted", "--unshifted"],
    ],
)
def test_output_independent_of_jobs(argv):
    one = call(*argv, "--jobs", "1")
    many = call(*argv, "--jobs", "8")
    assert one == many and one[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qloop", "validate", "--preset", "A1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("field\tvalue")
