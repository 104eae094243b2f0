"""
Convergence on the unit sphere
==============================

Solve -lap_G u + u/10 = f on the unit sphere with the tangential
Crouzeix-Raviart element and watch the errors fall as the icosphere is
refined.  The exact solution is the tangential part of
(sin(x2 x3), -sin(x1 x3), cos(x3^2)).
"""
import sys

from surfcr import StudyConfig, emit_report, run_study

# Levels 2..5 take a few seconds; pass "6" on the command line for the
# full range (about half a minute).
finest = int(sys.argv[1]) if len(sys.argv) > 1 else 5
config = StudyConfig(surface="sphere", levels=(2, finest), mass_coefficient=0.1)
report = run_study(config)

# The CSV holds h, the L2 error of P_h(u - u_h), the energy-norm error and
# the observed orders between consecutive levels.
print(emit_report(report, format="csv"))

# Expect orders close to 2 in L2 and 1 in the energy norm.
print("L2 orders:", report.l2_orders.round(3))
print("H1 orders:", report.h1_orders.round(3))

# Solver diagnostics per level
for r in report.levels:
    print(f"level {r.level}: {r.n_dofs:7d} dofs, {r.cg_iterations:4d} CG iterations, "
          f"residual {r.cg_residual:.1e}, Galerkin defect {r.galerkin_defect:.1e}")
