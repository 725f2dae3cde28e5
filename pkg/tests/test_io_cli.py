import math
from pathlib import Path

import numpy as np
import pytest

from calabiflow import cli, io
from calabiflow.errors import InadmissibleMetric, NonTriangleFace, ParseError
from calabiflow.flow import TraceRecord, run_flow
from calabiflow.geometry import curvature, delaunay_margins
from calabiflow.surfaces import genus2_octagon_surface, grid_torus

DATA = Path(__file__).parent / "data"

TETRA_OBJ = """\
v 0 0 0
v 1 0 0
v 0.5 {h} 0
v 0.5 {c} {z}
f 1 2 3
f 1 2 4
f 2 3 4
f 1 3 4
""".format(h=math.sqrt(3) / 2, c=math.sqrt(3) / 6, z=math.sqrt(2 / 3))

CUBE_OBJ = """\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
"""


class TestMetricFile:
    def test_read_tetrahedron(self):
        tri, m = io.read_metric(DATA / "tetra.metric")
        assert (tri.n_vertices, tri.n_edges, tri.euler_characteristic()) == (4, 6, 2)
        np.testing.assert_array_equal(m.lengths, 1.0)

    def test_negative_length(self):
        text = (DATA / "tetra.metric").read_text().replace("e 0 1\n", "e 0 -1.0\n")
        with pytest.raises(ParseError, match="line 4"):
            io.parse_metric(text)

    def test_inadmissible_lists_both_faces(self):
        with pytest.raises(InadmissibleMetric) as info:
            io.read_metric(DATA / "torus_inadmissible.metric")
        assert info.value.details["faces"] == [0, 1]

    @pytest.mark.parametrize(
        "text, line",
        [
            ("geometry spherical\n", 1),
            ("geometry euclidean\nnv x\n", 2),
            ("geometry euclidean\nnv 1\nq 1\n", 3),
            ("geometry euclidean\nnv 1\ne 0 nan\n", 3),
            ("geometry euclidean\nnv 1\ne 0 1\ne 0 1\n", 4),
            ("geometry euclidean\nnv 1\nf 0 0 0 0 1\n", 3),
        ],
    )
    def test_line_numbers(self, text, line):
        with pytest.raises(ParseError) as info:
            io.parse_metric(text)
        assert info.value.line == line

    def test_missing_lengths(self):
        with pytest.raises(ParseError):
            io.parse_metric("geometry euclidean\nnv 1\ne 0 1\nf 0 0 0 0 1 2\nf 0 0 0 0 1 2\n")

    @pytest.mark.parametrize("surface", [grid_torus, genus2_octagon_surface])
    def test_round_trip(self, surface, tmp_path, rng):
        tri, m = surface()
        m.lengths *= np.exp(rng.uniform(-0.05, 0.05, tri.n_edges))
        path = tmp_path / "m.metric"
        io.write_metric(path, tri, m)
        tri2, m2 = io.read_metric(path)
        np.testing.assert_array_equal(m2.lengths, m.lengths)
        np.testing.assert_array_equal(tri2.face_vertices, tri.face_vertices)
        np.testing.assert_array_equal(tri2.face_edges, tri.face_edges)
        assert m2.kind == m.kind

    def test_atomic_write_leaves_no_temp(self, tmp_path):
        io.atomic_write(tmp_path / "a.txt", "x")
        assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]


class TestOtherFiles:
    def test_target(self, tmp_path):
        path = tmp_path / "t"
        path.write_text("# partial\nk 2 1.5\n")
        K = io.read_target(path, 3)
        assert np.isnan(K[0]) and np.isnan(K[1]) and K[2] == 1.5

    @pytest.mark.parametrize("text", ["k 5 1.0\n", "k 0 1\nk 0 2\n", "x 0 1\n", "k 0 inf\n"])
    def test_target_errors(self, text, tmp_path):
        path = tmp_path / "t"
        path.write_text(text)
        with pytest.raises(ParseError):
            io.read_target(path, 3)

    def test_u_round_trip(self, tmp_path):
        u = np.array([0.1, -1 / 3, 2e-17])
        io.write_u(tmp_path / "u", u)
        np.testing.assert_array_equal(io.read_u(tmp_path / "u"), u)

    def test_trace_round_trip(self, tmp_path):
        trace = [TraceRecord(0.0, 0.0, 1.5, 0.7, 2, 2, 0.0), TraceRecord(0.01, 0.01, 1 / 3, 0.5, 0, 2, -1e-17)]
        io.write_trace(tmp_path / "t.csv", trace)
        assert (tmp_path / "t.csv").read_text().splitlines()[0] == ",".join(io.TRACE_COLUMNS)
        assert io.read_trace(tmp_path / "t.csv") == trace

    def test_trace_bad_header(self, tmp_path):
        (tmp_path / "t.csv").write_text("a,b\n")
        with pytest.raises(ParseError):
            io.read_trace(tmp_path / "t.csv")


class TestObj:
    def test_tetrahedron(self, tmp_path):
        (tmp_path / "t.obj").write_text(TETRA_OBJ)
        tri, m = io.import_obj(tmp_path / "t.obj")
        assert tri.euler_characteristic() == 2
        np.testing.assert_allclose(m.lengths, 1.0, atol=1e-12)

    def test_quad_face(self, tmp_path):
        (tmp_path / "q.obj").write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        with pytest.raises(NonTriangleFace):
            io.import_obj(tmp_path / "q.obj")

    def test_cube(self, tmp_path):
        (tmp_path / "c.obj").write_text(CUBE_OBJ)
        tri, m = io.import_obj(tmp_path / "c.obj")
        assert (tri.n_vertices, tri.n_faces, tri.euler_characteristic()) == (8, 12, 2)
        assert sorted(set(np.round(m.lengths, 12))) == [1.0, round(math.sqrt(2), 12)]
        assert np.sum(np.isclose(m.lengths, 1.0)) == 12


def run_cli(capsys, *argv):
    status = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return status, out, err


class TestCli:
    def test_validate(self, capsys):
        status, out, _ = run_cli(capsys, "validate", DATA / "tetra.metric")
        assert status == 0
        assert "chi 2" in out

    def test_curvature(self, capsys):
        status, out, _ = run_cli(capsys, "curvature", DATA / "pillow_hyp.metric")
        assert status == 0
        values = [float(line.split()[2]) for line in out.splitlines() if line.startswith("k ")]
        np.testing.assert_allclose(values, 4.4455895628235317, rtol=1e-14)

    def test_bad_file_exit_1(self, capsys):
        status, _, err = run_cli(capsys, "validate", DATA / "torus_inadmissible.metric")
        assert status == 1
        assert err.startswith("error: inadmissible_metric")

    def test_missing_file_exit_1(self, capsys, tmp_path):
        status, _, err = run_cli(capsys, "validate", tmp_path / "nope")
        assert status == 1

    def test_delaunay(self, capsys, tmp_path):
        status, out, _ = run_cli(capsys, "delaunay", DATA / "skewed_torus.metric")
        assert status == 0
        assert out.startswith("non_delaunay 2 ")
        status, out, _ = run_cli(
            capsys, "delaunay", DATA / "skewed_torus.metric", "--fix", "--out", tmp_path / "fixed.metric"
        )
        assert "flips 1" in out
        tri, m = io.read_metric(tmp_path / "fixed.metric")
        assert np.all(delaunay_margins(tri, m) >= -1e-12)

    def test_delaunay_fix_needs_out(self, capsys):
        status, _, err = run_cli(capsys, "delaunay", DATA / "skewed_torus.metric", "--fix")
        assert status == 1 and "--out" in err

    def test_flow_constant(self, capsys, tmp_path):
        trace, out_metric = tmp_path / "trace.csv", tmp_path / "out.metric"
        status, out, _ = run_cli(
            capsys, "flow", DATA / "tetra_perturbed.metric", "--constant", "--tol", "1e-10",
            "--trace", trace, "--out", out_metric,
        )
        assert status == 0
        assert "converged true" in out
        records = io.read_trace(trace)
        assert records[-1].max_abs_curv_err < 1e-10
        energies = [r.calabi_energy for r in records]
        assert all(b <= a for a, b in zip(energies, energies[1:]))
        tri, m = io.read_metric(out_metric)
        err = np.abs(curvature(tri, m) - math.pi).max()
        assert err == pytest.approx(records[-1].max_abs_curv_err, abs=1e-12)
        u = io.read_u(f"{out_metric}.u")
        np.testing.assert_allclose(u, -np.array([0.3, -0.1, -0.1, -0.1]), atol=1e-6)

    def test_flow_target_file(self, capsys, tmp_path):
        status, out, _ = run_cli(
            capsys, "flow", DATA / "pillow_hyp.metric", "--target", DATA / "k_all_4.5.target",
            "--trace", tmp_path / "t.csv",
        )
        assert status == 0
        assert io.read_trace(tmp_path / "t.csv")[-1].max_abs_curv_err < 1e-10

    def test_flow_partial_euclidean_target(self, capsys, tmp_path):
        target = tmp_path / "k"
        target.write_text(f"k 0 {math.pi + 0.4}\n")
        status, out, _ = run_cli(capsys, "flow", DATA / "tetra.metric", "--target", target, "--out", tmp_path / "o")
        assert status == 0
        tri, m = io.read_metric(tmp_path / "o")
        np.testing.assert_allclose(curvature(tri, m), [math.pi + 0.4] + [math.pi - 0.4 / 3] * 3, atol=1e-10)

    def test_flow_inadmissible_target(self, capsys, tmp_path):
        target = tmp_path / "k"
        target.write_text("k 0 4\nk 1 4\nk 2 4\n")
        status, _, err = run_cli(capsys, "flow", DATA / "pillow_hyp.metric", "--target", target)
        assert status == 1 and "inadmissible_target" in err

    def test_flow_constant_hyperbolic_sphere(self, capsys):
        status, _, err = run_cli(capsys, "flow", DATA / "pillow_hyp.metric", "--constant")
        assert status == 1

    def test_flow_not_converged_exit_2(self, capsys, tmp_path):
        status, out, err = run_cli(
            capsys, "flow", DATA / "tetra_perturbed.metric", "--constant", "--t-max", "0.01",
            "--trace", tmp_path / "t.csv",
        )
        assert status == 2
        assert "not_converged" in err
        assert (tmp_path / "t.csv").exists()

    def test_decay(self, capsys, tmp_path):
        run_cli(capsys, "flow", DATA / "tetra_perturbed.metric", "--constant", "--trace", tmp_path / "t.csv")
        status, out, _ = run_cli(capsys, "decay", tmp_path / "t.csv")
        assert status == 0
        rate = float(out.split()[1])
        assert rate < 0

    def test_import_obj(self, capsys, tmp_path):
        (tmp_path / "c.obj").write_text(CUBE_OBJ)
        status, out, _ = run_cli(capsys, "import-obj", tmp_path / "c.obj", "--out", tmp_path / "c.metric")
        assert status == 0 and "chi 2" in out
        result = run_flow(*io.read_metric(tmp_path / "c.metric"), [math.pi / 2] * 8)
        assert result.converged

    def test_usage_error(self, capsys):
        assert cli.main(["flow", str(DATA / "tetra.metric")]) == 1
        assert cli.main(["--help"]) == 0
