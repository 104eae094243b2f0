import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from surfcr.analysis import (ErrorReport, LevelResult, StudyConfig, emit_report, error_norms,
                             run_study, solve_level)
from surfcr.cr import DiscreteField
from surfcr.eoc import eoc
from surfcr.level_surface import Sphere
from surfcr.mesh import build_sphere_mesh, read_off
from surfcr.tangential import sphere_spec, zero_spec


def synthetic(errors_l2, errors_h1, h):
    cfg = StudyConfig(levels=(0, len(h) - 1))
    rows = [LevelResult(level=k, h=hk, n_dofs=10, l2_error=a, h1_error=b, h1_seminorm=b,
                        l2_full=a, cg_iterations=1, cg_residual=0.0, symmetry_error=0.0,
                        galerkin_defect=0.0)
            for k, (hk, a, b) in enumerate(zip(h, errors_l2, errors_h1))]
    return ErrorReport(cfg, rows)


class TestEOC:
    @given(st.floats(0.5, 3.0), st.floats(1e-3, 10), st.floats(1.2, 4.0))
    @settings(max_examples=50, deadline=None)
    def test_exact_power(self, p, c, ratio):
        h = 0.5 / ratio ** np.arange(4)
        np.testing.assert_allclose(eoc(c * h ** p, h), p, rtol=1e-10)

    def test_formula(self):
        assert eoc([4e-2, 1e-2], [0.2, 0.1])[0] == pytest.approx(2.0)
        assert eoc([1.0, 0.5, 0.2], [1.0, 0.5, 0.25]) == pytest.approx(
            [1.0, np.log(2.5) / np.log(2)])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            eoc([1.0, 2.0], [1.0])


class TestReport:
    def test_csv_two_levels(self):
        text = emit_report(synthetic([4e-2, 1e-2], [0.3, 0.15], [0.2, 0.1]), format="csv")
        lines = text.splitlines()
        assert lines == ["h,l2_error,l2_order,h1_error,h1_order",
                         "0.2,0.04,,0.3,",
                         "0.1,0.01,2.000000,0.15,1.000000"]

    def test_six_significant_digits(self):
        text = emit_report(synthetic([0.0123456789], [1.23456789], [0.324919696]))
        assert text.splitlines()[1] == "0.32492,0.0123457,,1.23457,"

    def test_single_level(self):
        rep = synthetic([1e-2], [0.1], [0.3])
        assert len(rep.l2_orders) == 0
        assert emit_report(rep).splitlines()[1].split(",")[2] == ""

    def test_json_round_trip(self, tmp_path):
        rep = synthetic([4e-2, 1e-2], [0.3, 0.15], [0.2, 0.1])
        path = tmp_path / "r.json"
        text = emit_report(rep, path, "json")
        data = json.loads(path.read_text())
        assert json.loads(text) == data
        assert data["config"]["surface"] == "sphere"
        assert data["levels"][0]["l2_order"] is None
        assert data["levels"][1]["l2_order"] == pytest.approx(2.0)
        assert "timings" in data["levels"][0] and "h1_seminorm" in data["levels"][0]


class TestConfig:
    def test_defaults(self):
        c = StudyConfig(surface="torus", levels=(1, 5))
        assert c.solution == "torus_eq" and c.mass_coefficient == 0.1

    @pytest.mark.parametrize("kwargs", [
        {"surface": "cube"},
        {"surface": "torus", "solution": "sphere_eq"},
        {"solution": "nope"},
        {"levels": (3, 2)},
        {"format": "xml"},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            StudyConfig(**kwargs)


class TestErrorNorms:
    def test_zero_solution(self):
        m = build_sphere_mesh(1)
        spec = zero_spec(Sphere())
        n = error_norms(m, DiscreteField(m, np.zeros(2 * m.n_edges)), spec, edges=True)
        assert n.l2_projected == 0 and n.energy == 0 and n.edge_projected == 0

    def test_quadrature_saturation(self):
        m = build_sphere_mesh(2)
        spec = sphere_spec()
        u_h, _, _ = solve_level(m, spec)
        e4, e6 = error_norms(m, u_h, spec, 4), error_norms(m, u_h, spec, 6)
        assert abs(e4.l2_projected - e6.l2_projected) < 0.005 * e6.l2_projected
        assert abs(e4.energy - e6.energy) < 0.005 * e6.energy

    def test_norm_relations(self):
        m = build_sphere_mesh(2)
        spec = sphere_spec()
        u_h, _, _ = solve_level(m, spec)
        n = error_norms(m, u_h, spec)
        assert n.l2_projected <= n.l2 + 1e-15
        assert n.energy == pytest.approx(np.hypot(n.h1_seminorm, n.l2))


class TestStudy:
    def test_small_study(self, tmp_path):
        cfg = StudyConfig(levels=(1, 3), export_mesh=str(tmp_path / "m.off"),
                          dump_matrix=str(tmp_path / "A.mtx"))
        rep = run_study(cfg)
        assert [r.level for r in rep.levels] == [1, 2, 3]
        assert np.all(np.diff(rep.h) < 0)
        assert rep.l2_orders[-1] > 1.7 and rep.h1_orders[-1] > 0.9
        for r in rep.levels:
            assert r.cg_residual < 1e-12 and r.symmetry_error < 1e-12
            assert r.galerkin_defect < 1e-10
        assert read_off(tmp_path / "m.off", Sphere()).n_triangles == 20 * 4 ** 3
        assert (tmp_path / "A.mtx").read_text().startswith("%%MatrixMarket")

    def test_deterministic_csv(self):
        cfg = StudyConfig(surface="torus", levels=(0, 1))
        assert emit_report(run_study(cfg)) == emit_report(run_study(cfg))

    def test_failure_names_level(self):
        with pytest.raises(RuntimeError, match="level 1"):
            run_study(StudyConfig(levels=(1, 2), cg_tol=1e-30))
