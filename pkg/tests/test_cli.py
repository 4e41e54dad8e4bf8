import json

from click.testing import CliRunner

from tensorwick.cli import main

DIPOLE = "3 1 | 0-1 ; 0-1 ; 0-1"
MELON = "3 2 | 0-1,2-3 ; 0-2,1-3 ; 0-1,2-3"
SIX_CYCLIC = "3 3 | 0-1,2-3,4-5 ; 1-2,3-4,0-5 ; 0-2,1-4,3-5"


def run(*args, **kwargs):
    return CliRunner().invoke(main, list(args), **kwargs)


def test_gen_is_deterministic_and_echoes_seed():
    a = run("gen", "--melonic", "--insertions", "2", "--seed", "7")
    b = run("gen", "--melonic", "--insertions", "2", "--seed", "7")
    assert a.exit_code == 0
    assert a.stdout == b.stdout  # byte identical
    doc = json.loads(a.stdout)
    assert doc["config"]["seed"] == 7
    assert doc["command"] == "gen"
    assert doc["vertices"] == 6
    c = run("gen", "--melonic", "--insertions", "2", "--seed", "8")
    assert c.stdout != a.stdout


def test_gen_pipes_into_analysis_commands():
    gen = run("gen", "--melonic", "--insertions", "2", "--seed", "3")
    for cmd in (
        ["melonic"],
        ["scaling", "--threads", "1"],
        ["expect"],
        ["cumulant"],
        ["euler3"],
        ["factorize"],
        ["faces", "--pairing", "0-1,2-3,4-5"],
        ["boundary", "--pairs", "0-1"],
        ["mc-moment", "--dim", "2", "--samples", "200"],
        ["invariance", "--dim", "2"],
    ):
        res = run(*cmd, "--graph", "-", input=gen.stdout)
        assert res.exit_code == 0, (cmd, res.stderr)
        json.loads(res.stdout)  # structured output parses


def test_scaling_report_shape():
    res = run("scaling", "--inline", MELON, "--threads", "1")
    doc = json.loads(res.stdout)
    assert doc["F_max"] == 5
    assert doc["num_optimal"] == 1
    assert doc["omega_min"] == 0
    assert doc["witness"] == [[0, 1], [2, 3]]


def test_expect_polynomial_triples():
    res = run("expect", "--inline", DIPOLE, "--nu", "2")
    doc = json.loads(res.stdout)
    assert doc["polynomial"] == [[1, 1, 1]]
    assert doc["nu"] == "2"
    res = run("cumulant", "--inline", MELON, "--nu", "2")
    assert json.loads(res.stdout)["polynomial"] == [[1, 1, 1], [0, 1, 1], [-1, 1, 1]]


def test_verdict_exit_codes():
    assert run("melonic", "--inline", MELON).exit_code == 0
    assert run("melonic", "--inline", SIX_CYCLIC).exit_code == 1
    assert run("euler3", "--inline", MELON).exit_code == 0
    assert run("euler3", "--inline", SIX_CYCLIC).exit_code == 1
    assert run("factorize", "--inline", MELON).exit_code == 0
    assert (
        run("subadd", "--inline", DIPOLE, "--inline", DIPOLE).exit_code == 0
    )


def test_input_errors_exit_2():
    assert run("scaling", "--inline", "garbage").exit_code == 2
    assert run("scaling").exit_code == 2  # neither --graph nor --inline
    assert run("scaling", "--graph", "/no/such/file").exit_code == 2
    assert run("nonsense").exit_code == 2
    bad_color = "3 2 | 0-1,2-3 ; 0-2,1-3 ; 0-1"
    res = run("melonic", "--inline", bad_color)
    assert res.exit_code == 2
    assert "color 3" in res.stderr
    # histogram budget refusal
    res = run("expect", "--inline", MELON, "--budget", "1")
    assert res.exit_code == 2


def test_faces_and_boundary():
    res = run("faces", "--inline", MELON, "--pairing", "0-1,2-3")
    doc = json.loads(res.stdout)
    assert doc["total"] == 5 and doc["omega"] == 0
    res = run("boundary", "--inline", MELON, "--pairs", "0-1")
    doc = json.loads(res.stdout)
    assert doc["vertices"] == 2
    assert doc["vertex_map"] == [2, 3]


def test_subadd_report():
    res = run("subadd", "--inline", MELON, "--inline", MELON)
    doc = json.loads(res.stdout)
    assert doc["lhs"] == 7 and doc["rhs"] == 10
    assert doc["strict_subadditive"] is True
    assert doc["self_pairing_bound"] == 6


def test_mc_commands():
    res = run("mc-cycles", "--n", "2")
    doc = json.loads(res.stdout)
    assert doc["face_histogram"] == {"1": 2, "2": 1}
    res = run("mc-cycles", "--n", "3", "--samples", "500", "--seed", "4")
    assert json.loads(res.stdout)["total"] == 500

    res = run("mc-bound", "--n", "2", "--m", "4")
    doc = json.loads(res.stdout)
    assert doc["value_exact"] == "8" and doc["bound"] == 10 and doc["holds"]

    res = run("thresholds", "--d", "3", "--epsilon", "0.01")
    doc = json.loads(res.stdout)
    assert doc["n_epsilon"] == 18

    res = run("search", "--d", "3", "--n", "2", "--trials", "10", "--seed", "1")
    doc = json.loads(res.stdout)
    assert sum(doc["f_max_histogram"].values()) == 10
    assert doc["component_envelope_ok"] is True

    res = run(
        "mc-moment", "--inline", DIPOLE, "--dim", "2", "--nu", "2",
        "--samples", "20000", "--seed", "5",
    )
    doc = json.loads(res.stdout)
    assert abs(doc["mean"] - 2.0) < 5 * doc["standard_error"]
    assert doc["config"]["seed"] == 5

    res = run("invariance", "--inline", MELON, "--dim", "3", "--seed", "2")
    assert json.loads(res.stdout)["relative_deviation"] < 1e-9


def test_out_file(tmp_path):
    target = tmp_path / "report.json"
    res = run("scaling", "--inline", DIPOLE, "--threads", "1", "--out", str(target))
    assert res.exit_code == 0
    assert res.stdout == ""
    doc = json.loads(target.read_text())
    assert doc["F_max"] == 3


def test_search_csv_export(tmp_path):
    target = tmp_path / "fmax.csv"
    res = run(
        "search", "--d", "3", "--n", "2", "--trials", "12", "--seed", "0",
        "--csv", str(target),
    )
    assert res.exit_code == 0
    lines = target.read_text().strip().split("\n")
    assert lines[0] == "F_max,count"
    assert sum(int(l.split(",")[1]) for l in lines[1:]) == 12


def test_env_var_override():
    plain = run("gen", "--melonic", "--seed", "0")
    overridden = run(
        "gen", "--melonic",
        env={"TENSORWICK_GEN_SEED": "7"},
        auto_envvar_prefix="TENSORWICK",
    )
    explicit = run("gen", "--melonic", "--seed", "7")
    assert overridden.stdout == explicit.stdout
    assert overridden.stdout != plain.stdout
