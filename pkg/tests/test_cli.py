import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from corrclust.affinity import build, load_matrix, save_matrix
from corrclust.cli import RECORD_FIELDS, main
from corrclust.partition import cc_energy, load_labels, potts_energy, purity


def _run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _parse_kv(line):
    return dict(part.split("=", 1) for part in line.split())


@pytest.fixture
def planted(tmp_path, capsys):
    mtx, gt = tmp_path / "w.mtx", tmp_path / "gt.txt"
    code, _, _ = _run(
        ["synth", "--n", 60, "--k", 3, "--sparsity", 0.5, "--noise", 0.0, "--seed", 1,
         "--out-matrix", mtx, "--out-gt", gt],
        capsys,
    )
    assert code == 0
    return mtx, gt


@pytest.mark.parametrize("algo", ["swap", "expand", "icm"])
def test_solve_all_positive(tmp_path, capsys, algo):
    path = tmp_path / "w.mtx"
    save_matrix(path, build(3, [(0, 1, 1.0), (1, 2, 0.5), (0, 2, 2.0)]))
    code, out, _ = _run(["solve", "--input", path, "--algo", algo, "--seed", 0], capsys)
    assert code == 0
    fields = _parse_kv(out.strip())
    assert fields["k"] == "1"
    assert float(fields["cc_energy"]) == -3.5
    assert float(fields["potts_energy"]) == 0.0
    assert float(fields["time"]) >= 0.0


def test_solve_missing_file(tmp_path, capsys):
    code, _, err = _run(["solve", "--input", tmp_path / "nope", "--algo", "swap"], capsys)
    assert code == 1 and "error" in err


def test_solve_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.mtx"
    path.write_text("3 3 1\n1 1 2.0\n")
    code, _, _ = _run(["solve", "--input", path, "--algo", "swap"], capsys)
    assert code == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--input", "x", "--algo", "bp"],
        ["solve", "--algo", "swap"],
        ["solve", "--input", "x", "--algo", "swap", "--max-sweeps", "0"],
        ["frobnicate"],
        [],
    ],
)
def test_invalid_flags_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_solve_planted_recovers_truth(tmp_path, capsys, planted):
    mtx, gt = planted
    out_labels, trace = tmp_path / "l.txt", tmp_path / "trace.csv"
    code, out, _ = _run(
        ["solve", "--input", mtx, "--algo", "swap", "--seed", 3, "--output", out_labels,
         "--trace", trace],
        capsys,
    )
    assert code == 0
    labels = load_labels(out_labels)
    assert purity(labels, load_labels(gt)) == 1.0
    assert _parse_kv(out)["k"] == "3"
    with open(trace, newline="") as fh:
        rows = list(csv.DictReader(fh))
    energies = [float(r["potts_energy"]) for r in rows]
    assert rows[0]["move"] == "init"
    assert all(b <= a for a, b in zip(energies, energies[1:]))
    W = load_matrix(mtx)
    assert energies[-1] == pytest.approx(potts_energy(W, labels), abs=1e-9)


def test_synth_header_and_consistency(planted):
    mtx, gt = planted
    lines = mtx.read_text().splitlines()
    assert lines[0].startswith("%%MatrixMarket")
    params = json.loads(lines[1].lstrip("% "))
    assert params["n"] == 60 and params["noise"] == 0.0 and params["seed"] == 1
    W, truth = load_matrix(mtx), load_labels(gt)
    assert np.array_equal(W.weights > 0, truth[W.rows] == truth[W.cols])


def test_synth_infeasible(tmp_path, capsys):
    code, _, err = _run(
        ["synth", "--within-frac", 1.5, "--out-matrix", tmp_path / "a", "--out-gt", tmp_path / "b"],
        capsys,
    )
    assert code == 2 and "within_frac" in err


def test_synth_unwritable(tmp_path, capsys):
    code, _, _ = _run(
        ["synth", "--n", 20, "--k", 2, "--out-matrix", tmp_path / "no" / "a", "--out-gt", tmp_path / "b"],
        capsys,
    )
    assert code == 1


def _bench(tmp_path, capsys, name, *extra):
    path = tmp_path / name
    code, out, _ = _run(
        ["bench", "--n", 40, "--k", 3, "--csv", path, *extra], capsys
    )
    assert code == 0
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh)), path, out


def test_bench_single_row(tmp_path, capsys):
    rows, _, out = _bench(
        tmp_path, capsys, "b.csv", "--algos", "icm", "--sparsities", 0.3, "--repeats", 1
    )
    assert len(rows) == 1
    assert tuple(rows[0]) == RECORD_FIELDS
    assert "±" in out
    assert json.loads(out.splitlines()[0])["repeats"] == 1


def _without_wall_time(path):
    rows = list(csv.reader(io.StringIO(path.read_text())))
    col = rows[0].index("wall_time")
    return [r[:col] + r[col + 1:] for r in rows]


def test_bench_deterministic(tmp_path, capsys):
    args = ("--algos", "swap", "icm", "--sparsities", 0.2, 0.4, "--repeats", 2, "--seed", 5)
    _, a, _ = _bench(tmp_path, capsys, "a.csv", *args)
    _, b, _ = _bench(tmp_path, capsys, "b.csv", *args)
    _, c, _ = _bench(tmp_path, capsys, "c.csv", *args, "--jobs", 2)
    assert _without_wall_time(a) == _without_wall_time(b) == _without_wall_time(c)


def test_bench_rows_recheckable(tmp_path, capsys):
    save = tmp_path / "runs"
    rows, _, _ = _bench(
        tmp_path, capsys, "b.csv", "--algos", "swap", "expand", "icm", "--sparsities", 0.3,
        "--repeats", 2, "--save-dir", save,
    )
    assert len(rows) == 6
    for row in rows:
        stem = save / f"{row['algorithm']}_s0_r{row['repeat']}"
        W = load_matrix(stem.with_suffix(".mtx"))
        labels = load_labels(stem.with_suffix(".labels"))
        assert float(row["cc_energy"]) == pytest.approx(cc_energy(W, labels), abs=1e-9)
        assert float(row["potts_energy"]) == pytest.approx(potts_energy(W, labels), abs=1e-9)
        assert int(row["k"]) == len(set(labels.tolist()))
        truth = load_labels(stem.with_suffix(".gt"))
        assert float(row["purity"]) == pytest.approx(purity(labels, truth))


def test_bench_runtime_grows_with_n(tmp_path, capsys):
    times = []
    for n in (20, 80, 240):
        path = tmp_path / f"n{n}.csv"
        code, _, _ = _run(
            ["bench", "--n", n, "--k", 3, "--algos", "swap", "--sparsities", 0.3,
             "--repeats", 1, "--csv", path],
            capsys,
        )
        assert code == 0
        with open(path, newline="") as fh:
            times.append(float(next(csv.DictReader(fh))["wall_time"]))
    assert times[0] < times[1] < times[2]


def test_bench_infeasible(tmp_path, capsys):
    code, _, _ = _run(
        ["bench", "--noise", 2.0, "--csv", tmp_path / "x.csv", "--repeats", 1], capsys
    )
    assert code == 2


def test_prior_n1(tmp_path, capsys):
    path = tmp_path / "p.csv"
    assert _run(["prior", "--n", 1, "--csv", path], capsys)[0] == 0
    assert path.read_text() == "k,neg_log_prob\n1,0\n"


def test_prior_rows(tmp_path, capsys):
    path = tmp_path / "p.csv"
    assert _run(["prior", "--n", 40, "--csv", path], capsys)[0] == 0
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["k"]) for r in rows] == list(range(1, 41))
    values = np.array([float(r["neg_log_prob"]) for r in rows])
    assert np.exp(-values).sum() == pytest.approx(1.0, abs=1e-9)
    code, out, _ = _run(["prior", "--n", 4], capsys)
    assert float(out.splitlines()[2].split(",")[1]) == pytest.approx(math.log(15) - math.log(7))


def test_prior_rejects_zero(capsys):
    assert _run(["prior", "--n", 0], capsys)[0] == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "corrclust", "prior", "--n", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "k,neg_log_prob"
