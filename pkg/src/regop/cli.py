"""Command-line front end.

Subcommands::

    ztf      z-transform calculus suite and the uniqueness experiment
    qplane   restriction experiment and regularity pipeline, quantum plane
    crossed  restriction experiment and regularity pipeline, crossed product
    hilsum   fiber discontinuity scan (CSV by default)
    probe    regularity pipeline for --model {quantum_plane,crossed_product,hilsum}

Exit status: 0 when every check passes, 2 when a check fails, 1 on a usage
error.
"""
import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

from . import algebras as alg
from . import experiments as ex
from . import hilsum

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

CSV_HELP = (
    "CSV columns: hilsum scans write t,M,norm_distance,hermitian_residual "
    "(one row per t); other commands write experiment,check,residual,tolerance,pass.")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    q: float = 0.5
    J: int = 32
    N: int = 16
    M: int = 64
    t_grid: list = field(default_factory=list)
    seed: int = 0
    tol: float = 1e-8
    output_path: str = None
    format: str = "report-tree"
    model: str = "quantum_plane"
    element: str = None

    def validate(self):
        if not 0.0 < self.q < 1.0:
            raise UsageError(f"--q must lie in (0, 1), got {self.q}")
        for name in ("J", "N", "M"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name} must be a positive integer")
        if self.N > self.J:
            raise UsageError(f"--N ({self.N}) must not exceed --J ({self.J})")
        if any(not 0.0 <= t <= 1.0 for t in self.t_grid):
            raise UsageError("--t-grid values must lie in [0, 1]")
        if self.command == "hilsum" and any(t == 0.0 for t in self.t_grid):
            raise UsageError("--t-grid for a scan must exclude t = 0 (the reference fiber)")
        if self.tol <= 0:
            raise UsageError("--tol must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _t_grid(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def build_parser():
    parser = _Parser(prog="regop", description=__doc__.split("\n\n")[0], epilog=CSV_HELP)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--q", type=float, default=0.5, help="deformation parameter in (0, 1)")
    common.add_argument("--J", type=int, default=32, help="coefficient window half-width")
    common.add_argument("--N", type=int, default=16, help="matrix truncation half-width")
    common.add_argument("--M", type=int, default=64, help="Fourier truncation half-width")
    common.add_argument("--t-grid", type=_t_grid, default=None,
                        help="comma-separated fiber parameters in [0, 1]")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--output", dest="output_path", default=None,
                        help="write the report here (atomically) instead of stdout")
    common.add_argument("--format", choices=("report-tree", "csv"), default=None)
    for name, text in (("ztf", "z-transform calculus suite"),
                       ("qplane", "quantum plane experiments"),
                       ("crossed", "crossed product experiments"),
                       ("hilsum", "fiber discontinuity scan"),
                       ("probe", "regularity pipeline for one model")):
        p = sub.add_parser(name, parents=[common], help=text, description=text,
                           epilog=CSV_HELP)
        if name == "probe":
            p.add_argument("--model", choices=ex.MODELS, default="quantum_plane")
        if name in ("qplane", "crossed"):
            p.add_argument("--element", default=None,
                           help="text fixture of an extra element to push through the quotient")
    return parser


def parse_config(argv):
    ns = build_parser().parse_args(argv)
    fmt = ns.format or ("csv" if ns.command == "hilsum" else "report-tree")
    grid = ns.t_grid
    if grid is None:
        grid = [0.04, 0.02, 0.01] if ns.command == "hilsum" else []
    cfg = RunConfig(ns.command, ns.q, ns.J, ns.N, ns.M, grid, ns.seed, ns.tol,
                    ns.output_path, fmt, getattr(ns, "model", "quantum_plane"),
                    getattr(ns, "element", None))
    cfg.validate()
    return cfg


def _fixture_report(cfg, flavor):
    try:
        with open(cfg.element) as fh:
            x = alg.loads(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read --element: {exc}")
    except alg.AlgebraError as exc:
        raise UsageError(f"bad --element file: {exc}")
    if x.flavor != flavor:
        raise UsageError(f"--element has flavor {x.flavor}, expected {flavor}")
    rep = ex.ResidualReport("fixture", {"path": cfg.element, "J": x.J})
    phi = alg.quotient_plane if flavor == alg.QUANTUM_PLANE else alg.quotient_crossed
    y = x * alg.star(x)
    if flavor == alg.QUANTUM_PLANE:
        ok = phi(y) == phi(x) * phi(x).conjugate()
        zero = phi(x) == 0
    else:
        ok = phi(y) == phi(x) * phi(x).star()
        zero = phi(x).is_zero()
    rep.add("quotient_multiplicative", 0 if ok else 1, 0, "phi(x x^*) = phi(x) phi(x)^*")
    rep.add("kernel_is_ideal", 0 if zero == alg.in_ideal(x) else 1, 0,
            "phi(x) = 0 iff x is compact")
    return rep


def run(cfg):
    """Run the configured command; returns a list of reports or scan rows."""
    if cfg.command == "ztf":
        return [ex.run_ztf_suite(seed=cfg.seed, tol=cfg.tol),
                ex.run_uniqueness_experiment(seed=cfg.seed, tol=cfg.tol)]
    if cfg.command in ("qplane", "crossed"):
        model = "quantum_plane" if cfg.command == "qplane" else "crossed_product"
        reports = [
            ex.run_restriction_experiment(model, seed=cfg.seed, q=cfg.q, J=cfg.J, N=cfg.N,
                                          tol=cfg.tol),
            ex.run_theorem_pipeline(model, q=cfg.q, J=cfg.J, N=cfg.N, seed=cfg.seed,
                                    tol=cfg.tol),
        ]
        if cfg.element:
            reports.append(_fixture_report(cfg, model))
        return reports
    if cfg.command == "hilsum":
        return hilsum.discontinuity_scan(cfg.t_grid, cfg.M)
    if cfg.command == "probe":
        grid = cfg.t_grid or None
        return [ex.run_theorem_pipeline(cfg.model, q=cfg.q, J=cfg.J, N=cfg.N, M=cfg.M,
                                        t_grid=grid, seed=cfg.seed, tol=cfg.tol)]
    raise UsageError(f"unknown command {cfg.command!r}")


def _scan_passed(rows):
    return all(r.hermitian_residual <= 1e-9 and r.z_norm < 1.0 for r in rows)


def render(cfg, result):
    if cfg.command == "hilsum":
        if cfg.format == "csv":
            return hilsum.scan_to_csv(result)
        tree = {"experiment_name": "hilsum_scan", "parameters": {"M": cfg.M},
                "rows": [dict(zip(hilsum.CSV_COLUMNS, (r.t, r.M, r.norm_distance,
                                                        r.hermitian_residual)))
                         for r in result],
                "passed": _scan_passed(result)}
        return json.dumps(tree, indent=2, sort_keys=True) + "\n"
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["experiment", "check", "residual", "tolerance", "pass"])
        for rep in result:
            for c in rep.checks:
                w.writerow([rep.experiment_name, c.name, repr(c.residual),
                            repr(c.tolerance), c.passed])
        return buf.getvalue()
    tree = {"reports": [rep.to_dict() for rep in result],
            "passed": all(rep.passed for rep in result)}
    return json.dumps(tree, indent=2, sort_keys=True) + "\n"


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".regop-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None):
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        result = run(cfg)
        text = render(cfg, result)
    except UsageError as exc:
        print(f"regop: error: {exc}", file=sys.stderr)
        print("usage: regop {ztf,qplane,crossed,hilsum,probe} [options]; see --help",
              file=sys.stderr)
        return EXIT_USAGE
    if cfg.output_path:
        write_atomic(cfg.output_path, text)
    else:
        sys.stdout.write(text)
    if cfg.command == "hilsum":
        passed = _scan_passed(result)
    else:
        passed = all(rep.passed for rep in result)
        for rep in result:
            for line in rep.summary_lines():
                print(line, file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
