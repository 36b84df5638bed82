"""
명령줄 테스트: 종료 코드, JSON 보고서, 호 CSV, 결정성
"""

import json
import math

import pytest

from qh_gromov.cli import EXIT_ERROR, EXIT_OK, dispatch
from qh_gromov.curve import write_points_csv
from qh_gromov.domain import Point2


def _load(path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture
def collinear_prefixes(tmp_path):
    a = write_points_csv([Point2(0.0, math.exp(i)) for i in range(1, 5)], tmp_path / "a.csv")
    b = write_points_csv([Point2(0.0, math.exp(-i)) for i in range(1, 5)], tmp_path / "b.csv")
    return a, b


# ========== 기본 명령 ==========

def test_distance_writes_report(tmp_path, capsys):
    out = tmp_path / "dist.json"
    code = dispatch(["distance", "--domain", "half_plane", "--from", "0,1", "--to", "0,2.718281828459045",
                     "--tol", "0.01", "--out", str(out)])
    assert code == EXIT_OK
    report = _load(out)
    assert report["command"] == "distance"
    assert report["passed"] is True
    assert report["error"] is None
    assert report["result"]["method"] == "segment"
    assert report["result"]["upper"] == pytest.approx(1.0, abs=1e-6)
    assert report["config"]["domain"]["kind"] == "half_plane"
    assert report["config"]["params"]["x"] == [0.0, 1.0]
    assert "[결과] distance: 통과" in capsys.readouterr().out


def test_arc_writes_csv(tmp_path):
    out = tmp_path / "arc.json"
    code = dispatch(["arc", "--domain", "half_plane", "--from", "0,1", "--to", "0,3", "--h", "0.1", "--out", str(out)])
    assert code == EXIT_OK
    report = _load(out)
    assert report["checks"] == {"h_short": True}
    csv_path = tmp_path / "arc.arc.csv"
    assert report["artifacts"] == [str(csv_path)]
    assert csv_path.read_text(encoding="utf-8").startswith("x,y\n")


def test_product_reports_bounds(tmp_path):
    out = tmp_path / "product.json"
    code = dispatch(["product", "--domain", "half_plane", "--x", "0,4", "--y", "0,0.25", "--w", "0,1",
                     "--out", str(out)])
    assert code == EXIT_OK
    result = _load(out)["result"]
    assert result["value"] == pytest.approx(0.0, abs=0.01)
    assert result["upper_bound"] >= result["value"]


def test_delta_from_csv(tmp_path):
    points = write_points_csv([Point2(0.0, math.exp(i)) for i in range(4)], tmp_path / "pts.csv")
    out = tmp_path / "delta.json"
    assert dispatch(["delta", "--domain", "half_plane", "--points", str(points), "--out", str(out)]) == EXIT_OK
    result = _load(out)["result"]
    assert result["exhaustive"] is True
    assert result["delta_hat"] <= result["slack"]


def test_sequence_with_second_prefix(tmp_path, collinear_prefixes):
    a, b = collinear_prefixes
    out = tmp_path / "seq.json"
    code = dispatch(["sequence", "--domain", "half_plane", "--prefix", str(a), "--basepoint", "0,1",
                     "--prefix-b", str(b), "--scale", "1", "--out", str(out)])
    assert code == EXIT_OK
    result = _load(out)["result"]
    assert result["growth"] == pytest.approx([1, 2, 3, 4], abs=0.05)
    assert result["equivalence"]["equivalent"] is False


# ========== 오류 ==========

@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["unknown"],
        ["distance", "--domain", "half_plane", "--from", "0,1"],
        ["distance", "--domain", "half_plane", "--from", "a,b", "--to", "0,2"],
    ],
)
def test_bad_arguments_exit_one(argv):
    assert dispatch(argv) == EXIT_ERROR


def test_outside_point_writes_error_report(tmp_path, capsys):
    out = tmp_path / "bad.json"
    code = dispatch(["distance", "--domain", "half_plane", "--from", "0,1", "--to=0,-1", "--out", str(out)])
    assert code == EXIT_ERROR
    report = _load(out)
    assert report["passed"] is False
    assert report["error"].startswith("PointOutsideDomain")
    assert "PointOutsideDomain" in capsys.readouterr().err


def test_unknown_domain(tmp_path):
    assert dispatch(["distance", "--domain", "no_such_domain", "--from", "0,1", "--to", "0,2"]) == EXIT_ERROR


def test_non_positive_tol(tmp_path):
    out = tmp_path / "tol.json"
    assert dispatch(["distance", "--domain", "half_plane", "--from", "0,1", "--to", "0,2",
                     "--tol", "0", "--out", str(out)]) == EXIT_ERROR


# ========== 구성 실행 ==========

def test_lemma31_collinear(tmp_path, collinear_prefixes):
    a, _ = collinear_prefixes
    out = tmp_path / "lemma.json"
    code = dispatch(["lemma31", "--domain", "half_plane", "--basepoint", "0,1", "--prefix", str(a),
                     "--mmax", "3", "--out", str(out)])
    assert code == EXIT_OK
    report = _load(out)
    assert all(report["checks"].values())
    assert (tmp_path / "lemma.beta_3.csv").exists()


def test_theorem13_is_deterministic(tmp_path, collinear_prefixes):
    a, b = collinear_prefixes
    out = tmp_path / "theorem.json"
    argv = ["theorem13", "--domain", "half_plane", "--basepoint", "0,1", "--prefix-a", str(a),
            "--prefix-b", str(b), "--h", "0.1", "--imax", "3", "--seed", "5", "--out", str(out)]

    assert dispatch(argv) == EXIT_OK
    first = out.read_bytes()
    report = json.loads(first)
    assert report["passed"] is True
    assert report["config"]["seed"] == 5
    assert len(report["artifacts"]) == 9

    assert dispatch(argv) == EXIT_OK
    assert out.read_bytes() == first
