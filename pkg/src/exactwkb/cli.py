"""Command-line reports: spectra, zeta values, identity checks, Ritz, angle summands.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 an identity check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .constants import dynamical_constants
from .determinant import PoleError, RadiusError, harmonic_det, zeta_prime_zero, zeta_value
from .identities import IdentityReport, default_grid, verify_all
from .spectrum import (
    DEFAULT_CUTOFF,
    BracketError,
    HorizonError,
    Parity,
    iterate_spectrum,
    subtended_angle,
)
from .variational import DEFAULT_SIZES, JacobiError, ritz_spectrum

SCHEMA_VERSION = 1
COMMANDS = ("spectrum", "zeta", "verify", "ritz", "angles")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IDENTITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    N: int
    parity: Optional[Parity] = None
    K: int = DEFAULT_CUTOFF
    eps: float = 1e-9
    levels: int = 5
    grid: Optional[tuple[int, int]] = None
    output: str = "json"
    out_path: Optional[Path] = None
    lam: Optional[float] = None
    sizes: tuple[int, ...] = DEFAULT_SIZES
    orders: int = 4

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.N < 1:
            raise UsageError("--degree must be >= 1")
        if self.K < 4:
            raise UsageError("--cutoff must be >= 4")
        if not self.eps > 0:
            raise UsageError("--eps must be > 0")
        if self.levels < 1:
            raise UsageError("--levels must be >= 1")
        if self.output not in ("json", "csv"):
            raise UsageError("--format must be json or csv")
        if self.command == "angles" and self.lam is None:
            raise UsageError("angles needs --lambda")
        if self.command in ("angles",) and self.parity is None:
            raise UsageError("angles needs --parity")


# -- serialization ---------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats written to 17 significant digits."""
    pad, pad_in = "  " * indent, "  " * (indent + 1)
    if obj is None or (isinstance(obj, float) and not math.isfinite(obj)):
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad_in}{json.dumps(str(k))}: {_to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_to_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad_in + _to_json(v, indent + 1) for v in seq) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------------


def _parities(cfg: RunConfig) -> list[Parity]:
    return [cfg.parity] if cfg.parity is not None else [Parity.EVEN, Parity.ODD]


def _spectra(cfg: RunConfig, parities=None):
    out = {}
    for p in parities or _parities(cfg):
        spec, stats = iterate_spectrum(cfg.N, p, K=cfg.K, eps=cfg.eps)
        out[p] = (spec, stats)
    return out


def _cmd_spectrum(cfg: RunConfig):
    results, rows, ok = {}, [], True
    for p, (spec, stats) in _spectra(cfg).items():
        n = min(cfg.levels, spec.levels.size)
        results[p.value] = {
            "labels": spec.labels[:n].tolist(),
            "levels": spec.levels[:n].tolist(),
            "converged": spec.converged,
            "cutoff": spec.K,
            "tolerance": spec.tol,
            "tail_coefficients": list(spec.tail_coeffs),
            "convergence": stats.as_dict(),
        }
        rows += [(p.value, int(k), float(v)) for k, v in zip(spec.labels[:n], spec.levels[:n])]
        ok &= spec.converged
    return (EXIT_OK if ok else EXIT_NUMERICAL), results, (("parity", "label", "level"), rows)


def _cmd_zeta(cfg: RunConfig):
    results, rows = {}, []
    for p, (spec, _) in _spectra(cfg).items():
        vals = {}
        for n in range(1, cfg.orders + 1):
            try:
                v = zeta_value(spec, n).value
            except PoleError:
                v = None
            vals[str(n)] = v
            rows.append((p.value, f"Z({n})", v if v is not None else ""))
        zp = zeta_prime_zero(spec)
        rows.append((p.value, "Z'(0)", zp))
        results[p.value] = {"zeta": vals, "zeta_prime_zero": zp, "determinant_at_zero": math.exp(-zp)}
    return EXIT_OK, results, (("parity", "quantity", "value"), rows)


def _harmonic_reports(spectra) -> list[IdentityReport]:
    out = []
    for p, (spec, _) in spectra.items():
        closed = harmonic_det(p, 0.0).real
        spectral = math.exp(-zeta_prime_zero(spec))
        res = abs(spectral - closed)
        out.append(
            IdentityReport(
                identity_id=f"harmonic-log-det-{p.value}",
                N=2,
                sample_points=(0j,),
                max_abs_residual=res,
                max_rel_residual=res / abs(closed),
                passed=res / abs(closed) <= 1e-12,
                threshold=1e-12,
            )
        )
    return out


def _cmd_verify(cfg: RunConfig):
    sp = _spectra(cfg, [Parity.EVEN, Parity.ODD])
    if cfg.N == 2:
        reports = _harmonic_reports(sp)
    else:
        pair = (sp[Parity.EVEN][0], sp[Parity.ODD][0])
        grid = None if cfg.grid is None else default_grid(pair, *cfg.grid)
        reports = verify_all(cfg.N, pair, grid)
    results = {"reports": [r.as_dict() for r in reports], "all_passed": all(r.passed for r in reports)}
    rows = [(r.identity_id, r.max_abs_residual, r.max_rel_residual, r.threshold, r.passed) for r in reports]
    code = EXIT_OK if results["all_passed"] else EXIT_IDENTITY
    return code, results, (("identity_id", "max_abs_residual", "max_rel_residual", "threshold", "passed"), rows)


def _cmd_ritz(cfg: RunConfig):
    results, rows = {}, []
    sp = _spectra(cfg)
    for p, (spec, _) in sp.items():
        rr = ritz_spectrum(cfg.N, p, cfg.sizes)
        n = min(cfg.levels, rr.best.size, spec.levels.size)
        diff = []
        for i in range(n):
            d = float(rr.best[i] - spec.levels[i])
            diff.append({"label": int(spec.labels[i]), "ritz": float(rr.best[i]), "fixed_point": float(spec.levels[i]), "difference": d})
            rows.append((p.value, int(spec.labels[i]), float(rr.best[i]), float(spec.levels[i]), d))
        results[p.value] = {"ritz": rr.as_dict(), "comparison": diff}
    return EXIT_OK, results, (("parity", "label", "ritz", "fixed_point", "difference"), rows)


def _cmd_angles(cfg: RunConfig):
    p = cfg.parity
    spec, _ = _spectra(cfg, [p])[p]
    c = dynamical_constants(cfg.N)
    n = min(cfg.levels, spec.levels.size)
    ang = np.atleast_1d(subtended_angle(cfg.lam, spec.levels[:n], c.phi))
    rows = [(int(k), float(v), float(a)) for k, v, a in zip(spec.labels[:n], spec.levels[:n], ang)]
    results = {
        "parity": p.value,
        "lambda": cfg.lam,
        "phi": c.phi,
        "labels": spec.labels[:n].tolist(),
        "levels": spec.levels[:n].tolist(),
        "angles": ang.tolist(),
    }
    return EXIT_OK, results, (("label", "level", "angle"), rows)


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "zeta": _cmd_zeta,
    "verify": _cmd_verify,
    "ritz": _cmd_ritz,
    "angles": _cmd_angles,
}


def run(cfg: RunConfig) -> tuple[int, Optional[str], Optional[str]]:
    """Execute one command.

    Returns (exit code, rendered report or None, error message or None).
    """
    try:
        cfg.validate()
    except UsageError as exc:
        return EXIT_USAGE, None, f"usage error: {exc}"
    try:
        code, results, (header, rows) = _DISPATCH[cfg.command](cfg)
    except (RadiusError, HorizonError, BracketError, JacobiError, PoleError, ArithmeticError) as exc:
        return EXIT_NUMERICAL, None, f"numerical failure: {exc}"
    except ValueError as exc:
        return EXIT_USAGE, None, f"usage error: {exc}"
    if cfg.output == "csv":
        return code, _to_csv(header, rows), None
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "degree": cfg.N,
        "constants": dynamical_constants(cfg.N).as_dict(),
        "results": results,
    }
    return code, _to_json(doc) + "\n", None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _grid(text: str) -> tuple[int, int]:
    vals = _int_list(text)
    if len(vals) not in (1, 2) or min(vals) < 1:
        raise argparse.ArgumentTypeError("--grid takes REAL[,CIRCLE] point counts")
    return (vals[0], vals[1] if len(vals) == 2 else 8)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", "-N", type=int, required=True, help="degree N of |q|^N")
    common.add_argument("--parity", choices=[p.value for p in Parity], help="parity sector (default: both)")
    common.add_argument("--levels", type=int, default=5, help="number of levels to report")
    common.add_argument("--eps", type=float, default=1e-9, help="relative convergence tolerance")
    common.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF, help="iterated window K")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="exactwkb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues by exact quantization")
    z = sub.add_parser("zeta", parents=[common], help="spectral zeta values Z(n) and Z'(0)")
    z.add_argument("--orders", type=int, default=4, help="largest integer n for Z(n)")
    v = sub.add_parser("verify", parents=[common], help="residuals of all applicable identities")
    v.add_argument("--grid", type=_grid, help="REAL[,CIRCLE]: points on [0, lambda_4] and on |lambda| = 1")
    r = sub.add_parser("ritz", parents=[common], help="Rayleigh-Ritz comparison")
    r.add_argument("--sizes", type=_int_list, default=DEFAULT_SIZES, help="ascending basis sizes, e.g. 20,30,40")
    a = sub.add_parser("angles", parents=[common], help="angle summands at one lambda")
    a.add_argument("--lambda", dest="lam", type=float, required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cfg = RunConfig(
        command=ns.command,
        N=ns.degree,
        parity=Parity(ns.parity) if ns.parity else None,
        K=ns.cutoff,
        eps=ns.eps,
        levels=ns.levels,
        grid=getattr(ns, "grid", None),
        output=ns.format or ("csv" if ns.command == "angles" else "json"),
        out_path=ns.out,
        lam=getattr(ns, "lam", None),
        sizes=getattr(ns, "sizes", DEFAULT_SIZES),
        orders=getattr(ns, "orders", 4),
    )
    code, text, error = run(cfg)
    if error is not None:
        sys.stderr.write(error + "\n")
        return code
    if cfg.out_path is not None:
        cfg.out_path.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
