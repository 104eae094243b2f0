"""Command line driver: ``surfcr --surface sphere --levels 2..6 --out sphere.csv``."""
import argparse
import logging
import sys
from dataclasses import fields

from .analysis import StudyConfig, emit_report, run_study
from .verify import run_verification

EXIT_OK, EXIT_ERROR, EXIT_VERIFY = 0, 1, 2

# config-file keys that differ from the StudyConfig field names
_ALIASES = {"mass_coeff": "mass_coefficient", "c": "mass_coefficient"}
_FLOATS = {"mass_coefficient", "cg_tol"}
_INTS = {"quad_degree", "error_quad_degree"}


def parse_levels(text):
    """'2..6' -> (2, 6); a single integer gives a one-level range."""
    parts = str(text).split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise ValueError(f"bad level range {text!r}, expected a..b") from None
    if lo > hi:
        raise ValueError(f"bad level range {text!r}: {lo} > {hi}")
    return lo, hi


def _convert(key, value):
    if key == "levels":
        return parse_levels(value)
    if key in _FLOATS:
        return float(value)
    if key in _INTS:
        return int(value)
    return value


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    known = {f.name for f in fields(StudyConfig)}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = _ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _convert(key, value)
    return values


def build_parser():
    p = argparse.ArgumentParser(
        prog="surfcr",
        description="Tangential Crouzeix-Raviart convergence studies for the "
                    "vector Laplace problem on the sphere and the torus.")
    p.add_argument("--config", help="key = value file; command line flags take precedence")
    p.add_argument("--surface", choices=["sphere", "torus"])
    p.add_argument("--solution", choices=["sphere_eq", "torus_eq"])
    p.add_argument("--levels", help="level range a..b (sphere refinements or torus k)")
    p.add_argument("--mass-coeff", type=float, dest="mass_coefficient")
    p.add_argument("--quad-degree", type=int, dest="quad_degree",
                   help="quadrature degree for the load vector")
    p.add_argument("--error-quad-degree", type=int, dest="error_quad_degree")
    p.add_argument("--cg-tol", type=float, dest="cg_tol")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--export-mesh", dest="export_mesh", help="write the finest mesh as OFF")
    p.add_argument("--dump-matrix", dest="dump_matrix",
                   help="write the finest system matrix in MatrixMarket format")
    p.add_argument("--verify", choices=["geometry", "interpolation", "jumps", "all"],
                   help="run a property suite instead of a study")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    values = read_config(args.config) if args.config else {}
    for f in fields(StudyConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = _convert(f.name, v)
    return StudyConfig(**values)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        if args.verify:
            checks = run_verification(args.verify)
            for c in checks:
                print(c.line())
            return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY
        config = config_from_args(args)
        report = run_study(config)
        text = emit_report(report, config.out, config.format)
        if config.out is None:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return EXIT_OK
    except Exception as exc:   # reported, not re-raised: the exit code carries it
        print(f"surfcr: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
