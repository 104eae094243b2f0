"""
Convergence on the torus
========================

The same problem on the torus with major radius 1 and minor radius 1/2.
Mesh k is a (16 2^k) x (8 2^k) parametric grid, each quad split along
its shorter diagonal.
"""
import sys

from surfcr import StudyConfig, run_study

finest = int(sys.argv[1]) if len(sys.argv) > 1 else 4
report = run_study(StudyConfig(surface="torus", levels=(1, finest)))

print(f"{'h':>8} {'L2 error':>11} {'order':>6} {'H1 error':>11} {'order':>6}")
for k, r in enumerate(report.levels):
    l2o = f"{report.l2_orders[k - 1]:6.2f}" if k else "      "
    h1o = f"{report.h1_orders[k - 1]:6.2f}" if k else "      "
    print(f"{r.h:8.4f} {r.l2_error:11.3e} {l2o} {r.h1_error:11.3e} {h1o}")

# The JSON report also carries the broken H1 seminorm on its own
for r in report.levels:
    print(f"k={r.level}: seminorm {r.h1_seminorm:.3e}, full L2 {r.l2_full:.3e}")
