"""Error norms, convergence studies and report output."""
import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .assembly import assemble, solve_cg, symmetry_error, write_matrix_market
from .cr import DiscreteField, build_dof_map, interpolate_componentwise, interpolate_tan
from .eoc import eoc
from .geometry import edge_points
from .level_surface import projector
from .mesh import build_sphere_mesh, build_torus_mesh, refine, torus_resolution, write_off
from .quadrature import triangle_rule
from .tangential import SPECS, exact_with_jacobian

logger = logging.getLogger(__name__)


@dataclass
class ErrorNorms:
    l2_projected: float   # ||P_h (u~ - v)||_{L2(G_h)}
    l2: float             # ||u~ - v||_{L2(G_h)}
    l2_surface_projected: float  # ||P (u~ - v)||_{L2(G_h)}
    h1_seminorm: float    # broken ||grad_Gh (u~ - v)||
    edge_projected: Optional[float] = None          # ||P_h (u~ - v)|| over all edges
    edge_surface_projected: Optional[float] = None  # ||P (u~ - v)|| over all edges

    @property
    def energy(self):
        """||u~ - v||_h with unit-weight L2 part."""
        return float(np.sqrt(self.h1_seminorm ** 2 + self.l2 ** 2))


def _exact_on(spec, x):
    """u~ and grad(u~) = DU(p(x)) J_p(x) at ambient points near the surface."""
    surf = spec.surface
    cp = surf.closest_point(x)
    u, ju = exact_with_jacobian(spec, cp.position)
    return u, ju @ surf.closest_point_jacobian(x), projector(cp.normal)


def error_norms(mesh, field, spec, quad_degree=4, edges=False, n_gauss=5):
    """Broken norms of u~ - field over the triangulation."""
    fr = mesh.frames
    rule = triangle_rule(quad_degree)
    x = fr.points(rule.points)
    u, gu, P = _exact_on(spec, x)
    ph = fr.projector
    e = u - field.values(rule.points)
    grad_e = ph[:, None] @ gu @ ph[:, None] - field.surface_gradient()[:, None]
    wk = fr.area[:, None] * rule.weights[None, :]

    def integrate(sq):
        return float(np.sqrt(np.sum(wk * sq)))

    norms = ErrorNorms(
        l2_projected=integrate(np.sum(np.einsum("fij,fqj->fqi", ph, e) ** 2, -1)),
        l2=integrate(np.sum(e ** 2, -1)),
        l2_surface_projected=integrate(np.sum(np.einsum("fqij,fqj->fqi", P, e) ** 2, -1)),
        h1_seminorm=integrate(np.sum(grad_e ** 2, axis=(-2, -1))),
    )
    if edges:
        norms.edge_projected, norms.edge_surface_projected = _edge_norms(
            mesh, field, spec, n_gauss)
    return norms


def _edge_norms(mesh, field, spec, n_gauss):
    fr = mesh.frames
    pts, w = edge_points(fr, n_gauss)
    t = np.polynomial.legendre.leggauss(n_gauss)[0] * 0.5 + 0.5
    u, _, P = _exact_on(spec, pts)
    vals = np.empty_like(pts)
    for i in range(3):
        bary = np.zeros((len(t), 3))
        bary[:, i] = 1.0 - t
        bary[:, (i + 1) % 3] = t
        vals[:, i] = field.values(bary)
    e = u - vals
    weights = fr.edge_lengths[:, :, None] * w
    ph_e = np.einsum("fij,fegj->fegi", fr.projector, e)
    p_e = np.einsum("fegij,fegj->fegi", P, e)
    return (float(np.sqrt(np.sum(weights * np.sum(ph_e ** 2, -1)))),
            float(np.sqrt(np.sum(weights * np.sum(p_e ** 2, -1)))))


INTERPOLATION_QUANTITIES = ("H1est", "L2est", "L2estPur", "L2estPh", "L2estPurPh", "int_vec")


def interpolation_errors(spec, mesh, quad_degree=4):
    """Error norms of the tangential edge-mean interpolant."""
    pi = interpolate_tan(spec, mesh)
    n = error_norms(mesh, pi, spec, quad_degree, edges=True)
    return {
        "H1est": n.h1_seminorm,
        "L2est": n.l2_surface_projected,
        "L2estPur": n.edge_surface_projected,
        "L2estPh": n.l2_projected,
        "L2estPurPh": n.edge_projected,
        "int_vec": n.energy,
    }


def coefficient_defect(spec, mesh):
    """max over element edges of |P_h (alpha_i - alpha_i^tan)|, the componentwise
    minus the tangential interpolation coefficients."""
    comp = interpolate_componentwise(spec, mesh).vectors
    tan = interpolate_tan(spec, mesh).vectors
    d = np.einsum("fij,fkj->fki", mesh.frames.projector, comp - tan)
    return float(np.max(np.linalg.norm(d, axis=-1)))


# convergence studies

@dataclass
class StudyConfig:
    surface: str = "sphere"
    solution: Optional[str] = None
    mass_coefficient: float = 0.1
    levels: tuple = (2, 6)
    quad_degree: int = 4
    error_quad_degree: int = 4
    cg_tol: float = 1e-12
    out: Optional[str] = None
    format: str = "csv"
    export_mesh: Optional[str] = None
    dump_matrix: Optional[str] = None

    def __post_init__(self):
        if self.surface not in ("sphere", "torus"):
            raise ValueError(f"unknown surface {self.surface!r}")
        if self.solution is None:
            self.solution = f"{self.surface}_eq"
        if self.solution not in SPECS:
            raise ValueError(f"unknown solution {self.solution!r}")
        if not self.solution.startswith(self.surface):
            raise ValueError(f"solution {self.solution!r} does not live on {self.surface!r}")
        self.levels = tuple(int(v) for v in self.levels)
        if len(self.levels) != 2 or self.levels[0] > self.levels[1]:
            raise ValueError(f"bad level range {self.levels}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")

    def make_spec(self):
        return SPECS[self.solution](self.mass_coefficient)

    def meshes(self, surface):
        lo, hi = self.levels
        if self.surface == "sphere":
            mesh = build_sphere_mesh(lo, surface)
            for level in range(lo, hi + 1):
                yield level, mesh
                if level < hi:
                    mesh = refine(mesh)
        else:
            for k in range(lo, hi + 1):
                yield k, build_torus_mesh(*torus_resolution(k), surface)


@dataclass
class LevelResult:
    level: int
    h: float
    n_dofs: int
    l2_error: float
    h1_error: float
    h1_seminorm: float
    l2_full: float
    cg_iterations: int
    cg_residual: float
    symmetry_error: float
    galerkin_defect: float
    timings: dict = field(default_factory=dict)


@dataclass
class ErrorReport:
    config: StudyConfig
    levels: list = field(default_factory=list)

    @property
    def h(self):
        return np.array([r.h for r in self.levels])

    @property
    def l2_errors(self):
        return np.array([r.l2_error for r in self.levels])

    @property
    def h1_errors(self):
        return np.array([r.h1_error for r in self.levels])

    @property
    def l2_orders(self):
        return eoc(self.l2_errors, self.h)

    @property
    def h1_orders(self):
        return eoc(self.h1_errors, self.h)


def solve_level(mesh, spec, quad_degree=4, cg_tol=1e-12):
    """Assemble and solve on one mesh; returns (field, system, cg info)."""
    dofmap = build_dof_map(mesh)
    system = assemble(mesh, spec, dofmap, quad_degree)
    x, info = solve_cg(system, tol=cg_tol, return_info=True)
    return DiscreteField(mesh, x, dofmap), system, info


def run_study(config):
    spec = config.make_spec()
    report = ErrorReport(config)
    mesh = None
    for level, mesh in config.meshes(spec.surface):
        try:
            t0 = time.perf_counter()
            dofmap = build_dof_map(mesh)
            system = assemble(mesh, spec, dofmap, config.quad_degree)
            t1 = time.perf_counter()
            x, info = solve_cg(system, tol=config.cg_tol, return_info=True)
            t2 = time.perf_counter()
            norms = error_norms(mesh, DiscreteField(mesh, x, dofmap), spec,
                                config.error_quad_degree)
            t3 = time.perf_counter()
        except Exception as exc:
            raise RuntimeError(f"study aborted at level {level}: {exc}") from exc
        load = float(system.rhs @ x)
        energy = system.energy(x)
        report.levels.append(LevelResult(
            level=level, h=mesh.h, n_dofs=system.n_dofs,
            l2_error=norms.l2_projected, h1_error=norms.energy,
            h1_seminorm=norms.h1_seminorm, l2_full=norms.l2,
            cg_iterations=info["iterations"], cg_residual=info["residual"],
            symmetry_error=symmetry_error(system.matrix),
            galerkin_defect=abs(energy - load) / abs(load) if load else 0.0,
            timings={"assemble": t1 - t0, "solve": t2 - t1, "errors": t3 - t2},
        ))
        logger.info("level %d: h=%.4g dofs=%d L2=%.4e H1=%.4e (%d CG its)", level, mesh.h,
                    system.n_dofs, norms.l2_projected, norms.energy, info["iterations"])
        if config.dump_matrix and level == config.levels[1]:
            write_matrix_market(system.matrix, config.dump_matrix)
    if config.export_mesh and mesh is not None:
        write_off(mesh, config.export_mesh)
    return report


def _fmt(v):
    return f"{v:.6g}"


def report_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["h", "l2_error", "l2_order", "h1_error", "h1_order"])
    l2o, h1o = report.l2_orders, report.h1_orders
    for k, r in enumerate(report.levels):
        w.writerow([_fmt(r.h), _fmt(r.l2_error), "" if k == 0 else f"{l2o[k - 1]:.6f}",
                    _fmt(r.h1_error), "" if k == 0 else f"{h1o[k - 1]:.6f}"])
    return buf.getvalue()


def report_json(report):
    cfg = asdict(report.config)
    cfg["levels"] = list(cfg["levels"])
    rows = []
    l2o, h1o = report.l2_orders, report.h1_orders
    for k, r in enumerate(report.levels):
        row = asdict(r)
        row["l2_order"] = None if k == 0 else float(l2o[k - 1])
        row["h1_order"] = None if k == 0 else float(h1o[k - 1])
        rows.append(row)
    return json.dumps({"config": cfg, "levels": rows}, indent=2)


def emit_report(report, path=None, format="csv"):
    """Write the report as CSV or JSON; returns the text."""
    text = report_csv(report) if format == "csv" else report_json(report)
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
