import json
import math

import pytest

from sgve import bench
from sgve.cli import main
from sgve.errors import GameSpecError
from sgve.gamefile import (game_spec_from_document, load_game_document,
                           monotone_map_from_document)

CONSTANT_GAME = {
    "states": 2,
    "actions": {"x": [[0.0, 1.0]], "y": [[0.0, 1.0]]},
    "payoff": ["0.5", "0.5"],
    "transition": [["1", "0"], ["0", "1"]],
}


# ---------------------------------------------------------------------------
# document parsing
# ---------------------------------------------------------------------------

def test_builtin_pseudo_paths():
    doc = load_game_document("bench:exshap")
    spec, kind = game_spec_from_document(doc)
    assert spec.states == 2
    assert kind == "general"
    with pytest.raises(GameSpecError):
        load_game_document("bench:unheard-of")


def test_document_round_trip(tmp_path):
    path = tmp_path / "game.json"
    path.write_text(json.dumps(bench.exshap_game_file()))
    spec, _ = game_spec_from_document(load_game_document(str(path)))
    assert spec.states == 2
    assert spec.x_vars == ("x",)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("states"),
    lambda d: d.update(states=0),
    lambda d: d.update(actions={"x": [[0, 1]]}),
    lambda d: d.update(payoff=["0"]),
    lambda d: d.update(transition=[["1"]]),
    lambda d: d.update(payoff=["0", "1 + unknown_name"]),
    lambda d: d.update(payoff=["0", "1 + * 2"]),
    lambda d: d.update(controller=["p3", None]),
    lambda d: d.update(kind="bogus"),
])
def test_document_validation_errors(mutate):
    doc = json.loads(json.dumps(bench.exshap_game_file()))
    mutate(doc)
    with pytest.raises(GameSpecError):
        game_spec_from_document(doc)


def test_monotone_map_documents():
    T = monotone_map_from_document(
        {"d": 2, "kind": "minLinear", "weights": [[[2.0, 0.0]], [[0.0, 3.0]]]})
    assert T.kind == "minLinear"
    T = monotone_map_from_document(
        {"d": 2, "kind": "explicitExpr", "exprs": ["f1", "f1 + f2"]})
    assert T.kind == "explicitExpr"
    for bad in (
        {"d": 2, "kind": "minLinear", "weights": [[[0.0, 0.0]], [[1.0, 0.0]]]},
        {"d": 2, "kind": "other"},
        {"d": "x", "kind": "minLinear", "weights": []},
        {"d": 2, "kind": "explicitExpr", "exprs": ["f1"]},
    ):
        with pytest.raises(GameSpecError):
            monotone_map_from_document(bad)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def test_solve_discounted_benchmark(capsys):
    code = main(["solve", "bench:exshap", "--lambda", "0.5",
                 "--resolution", "51", "--eps", "1e-6"])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    values = {int(l.split()[1].rstrip(":")): float(l.split()[-1])
              for l in lines if l.startswith("state")}
    assert values[0] == 0.0
    assert abs(values[1] - (math.exp(0.25) - 1)) <= 1e-3
    assert any(l.startswith("fixed-point residual:") for l in lines)
    assert any(l.startswith("max duality gap:") for l in lines)


def test_solve_n_stage_constant_game(tmp_path, capsys):
    path = tmp_path / "const.json"
    path.write_text(json.dumps(CONSTANT_GAME))
    code = main(["solve", str(path), "--n", "100", "--resolution", "3"])
    out = capsys.readouterr().out
    assert code == 0
    for line in out.strip().splitlines():
        if line.startswith("state"):
            assert float(line.split()[-1]) == pytest.approx(0.5, abs=1e-9)


def test_solve_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["solve", str(path), "--n", "1"]) == 2
    assert "error:" in capsys.readouterr().err


def test_solve_missing_file(capsys):
    assert main(["solve", "/no/such/file.json", "--n", "1"]) == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "bench:exshap"])  # neither --lambda nor --n
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--suite", "unknown"])
    assert exc.value.code == 2


def test_curve_n_grid_row_count(tmp_path, capsys):
    path = tmp_path / "const.json"
    path.write_text(json.dumps(CONSTANT_GAME))
    code = main(["curve", str(path), "--n-grid", "1,2,4", "--resolution", "3"])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,v0,v1,iterations"
    assert len(lines) == 4
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[1]) == pytest.approx(0.5, abs=1e-9)
        assert float(cells[2]) == pytest.approx(0.5, abs=1e-9)


def test_curve_lambda_grid_monotone_benchmark(tmp_path):
    out_path = tmp_path / "curve.csv"
    code = main(["curve", "bench:exshap", "--lambda-grid", "0.1,0.3,0.5,0.7",
                 "--resolution", "51", "--eps", "1e-6", "--out", str(out_path)])
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "lambda,v0,v1,iterations,residual"
    second = [float(l.split(",")[2]) for l in lines[1:]]
    # the closed form lam (e^{(1-lam)/2} - 1)/(1-lam) increases in lam
    assert second == sorted(second)


def test_curve_stdout_byte_identical(tmp_path, capsys):
    path = tmp_path / "const.json"
    path.write_text(json.dumps(CONSTANT_GAME))
    argv = ["curve", str(path), "--lambda-grid", "0.5,0.25", "--resolution", "3"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    second = capsys.readouterr().out
    assert first == second


def test_curve_unwritable_output(tmp_path, capsys):
    path = tmp_path / "const.json"
    path.write_text(json.dumps(CONSTANT_GAME))
    code = main(["curve", str(path), "--n-grid", "1", "--resolution", "3",
                 "--out", str(tmp_path / "missing-dir" / "x.csv")])
    assert code == 2


def test_growth_diagonal_map(tmp_path, capsys):
    path = tmp_path / "map.json"
    path.write_text(json.dumps(
        {"d": 2, "kind": "minLinear", "weights": [[[2.0, 0.0]], [[0.0, 3.0]]]}))
    code = main(["growth", str(path), "--n", "64"])
    out = capsys.readouterr().out
    assert code == 0
    rates = [float(tok) for tok in out.splitlines()[0].split()[2:]]
    assert rates == pytest.approx([2.0, 3.0], abs=1e-12)
    assert "cauchy difference" in out


def test_growth_invalid_map_exits_2(tmp_path, capsys):
    path = tmp_path / "map.json"
    path.write_text(json.dumps(
        {"d": 1, "kind": "minLinear", "weights": [[[0.0]]]}))
    assert main(["growth", str(path)]) == 2


def test_growth_runtime_positivity_exits_3(tmp_path, capsys):
    path = tmp_path / "map.json"
    path.write_text(json.dumps(
        {"d": 1, "kind": "explicitExpr", "exprs": ["f1 - 10"]}))
    assert main(["growth", str(path), "--n", "4"]) == 3


def test_bench_suite_runs(capsys):
    code = main(["bench", "--suite", "mckinsey"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("[PASS]") == 2
    assert "all 2 criteria passed" in out
