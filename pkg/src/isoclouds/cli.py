"""Command-line front end.

    isoclouds invariant <file> [--full] [--wmi] [--json]
    isoclouds dist <a> <b> --metric {sm,lac,emd} --orientation {rigid,full} [--witness] [--json]
    isoclouds matrix <dir> --metric ... [--output {csv,json}]

Exit codes: 0 success, 2 parse error, 3 input mismatch, 4 cloud not
principally generic (``--metric sm`` and ``invariant --pcm`` only).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidInput, NotGeneric, ParseError
from .geometry import PointCloud, center, covariance, eigen_sym
from .metrics import FlowMatrix, MetricReport, emd_isometry_report, emd_wmi, lac, lac_isometry_report
from .pci import GENERIC_REL_TOL, is_principally_generic, pcm, sm_matrices_witness
from .wmi import DEP_TOL, QUANTUM, WMIDistribution, wmi

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_MISMATCH = 3
EXIT_NOT_GENERIC = 4

SCHEMA = 1
ISOMETRIC_REL_TOL = 1e-9
CLOUD_SUFFIXES = (".csv", ".xyz")


class InputMismatch(InvalidInput):
    """Clouds that cannot be compared under the requested metric."""


# ---------------------------------------------------------------- file parsing


def _parse_float(token: str, path, line: int) -> float:
    try:
        x = float(token)
    except ValueError:
        raise ParseError(path, line, f"not a number: {token!r}") from None
    if not math.isfinite(x):
        raise ParseError(path, line, f"non-finite coordinate: {token!r}")
    return x


def parse_csv(text: str, path="<csv>") -> PointCloud:
    """One point per line, comma-separated; the first data line fixes the dimension."""
    rows = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row = [_parse_float(t.strip(), path, lineno) for t in line.split(",")]
        if n is None:
            n = len(row)
        elif len(row) != n:
            raise ParseError(path, lineno, f"expected {n} coordinates, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ParseError(path, 0, "no points found")
    return PointCloud(np.array(rows))


def parse_xyz(text: str, path="<xyz>") -> PointCloud:
    """XYZ format: atom count, comment line, then ``element x y z`` per atom."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(path, 1 if lines else 0, "missing atom count")
    try:
        count = int(lines[0].split()[0])
    except ValueError:
        raise ParseError(path, 1, f"bad atom count: {lines[0].strip()!r}") from None
    if count < 1:
        raise ParseError(path, 1, f"atom count must be positive, got {count}")
    body = lines[2:]
    rows = []
    for offset, raw in enumerate(body[:count]):
        lineno = offset + 3
        tokens = raw.split()
        if len(tokens) < 4:
            raise ParseError(path, lineno, "expected 'element x y z'")
        rows.append([_parse_float(t, path, lineno) for t in tokens[1:4]])
    if len(rows) < count:
        raise ParseError(path, len(lines) + 1, f"expected {count} atoms, found {len(rows)}")
    return PointCloud(np.array(rows))


def read_cloud(path) -> PointCloud:
    path = Path(path)
    try:
        text = path.read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(path, 0, f"cannot read file: {exc}") from None
    if path.suffix.lower() == ".xyz":
        return parse_xyz(text, path)
    return parse_csv(text, path)


# ---------------------------------------------------------------- computation


@dataclass(frozen=True)
class RunConfig:
    metric: str = "lac"
    orientation: str = "full"
    rel_tol: float = GENERIC_REL_TOL
    quantum: float = QUANTUM
    tau_dep: float = DEP_TOL


@dataclass(frozen=True, eq=False)
class Prepared:
    """Per-cloud data reused across pairs: WMI for lac/emd, PCM for sm."""

    cloud: PointCloud
    radius: float
    invariant: object


def prepare(cloud: PointCloud, cfg: RunConfig) -> Prepared:
    c = center(cloud)
    if cfg.metric == "sm":
        return Prepared(cloud, c.radius, pcm(c, rel_tol=cfg.rel_tol))
    return Prepared(cloud, c.radius, wmi(c, cfg.quantum, cfg.tau_dep))


def check_pair(a: Prepared, b: Prepared, cfg: RunConfig, names=("A", "B")):
    if a.cloud.n != b.cloud.n:
        raise InputMismatch(f"dimension mismatch: {names[0]} has n={a.cloud.n}, {names[1]} has n={b.cloud.n}")
    if cfg.metric in ("sm", "lac") and a.cloud.m != b.cloud.m:
        raise InputMismatch(
            f"--metric {cfg.metric} needs equal point counts: {names[0]} has m={a.cloud.m}, "
            f"{names[1]} has m={b.cloud.m}"
        )


def pair_report(a: Prepared, b: Prepared, cfg: RunConfig) -> MetricReport:
    """Distance between two prepared clouds; ``full`` orientation also allows reflections."""
    if cfg.metric == "sm":
        value, signs = sm_matrices_witness(a.invariant, b.invariant, cfg.orientation)
        return MetricReport(value, signs, np.zeros((0, 0)))
    WA: WMIDistribution = a.invariant
    WB: WMIDistribution = b.invariant
    if cfg.metric == "lac":
        return lac_isometry_report(WA, WB) if cfg.orientation == "full" else lac(WA, WB)
    if cfg.metric == "emd":
        return emd_isometry_report(WA, WB) if cfg.orientation == "full" else emd_wmi(WA, WB)
    raise InvalidInput(f"unknown metric {cfg.metric!r}")


def is_isometric(value: float, a: Prepared, b: Prepared) -> bool:
    return value == 0.0 or value <= ISOMETRIC_REL_TOL * max(a.radius, b.radius)


# ---------------------------------------------------------------- output helpers


def _fmt(x: float) -> str:
    return repr(float(x))


def _matrix_lines(M, indent="  ") -> list[str]:
    return [indent + " ".join(f"{x:.12g}" for x in row) for row in np.asarray(M)]


def _witness_json(report: MetricReport, metric: str):
    w = report.witness
    if metric == "sm":
        return {"signs": [int(s) for s in w]}
    if isinstance(w, FlowMatrix):
        return {
            "flow": [[str(f) for f in row] for row in w.fractions()],
            "mirrored": report.mirrored,
        }
    rows = report.extra["row_entries"]
    cols = report.extra["col_entries"]
    return {
        "assignment": [[int(rows[i]), int(cols[j])] for i, j in enumerate(np.asarray(w))],
        "mirrored": report.mirrored,
    }


def _witness_lines(report: MetricReport, metric: str) -> list[str]:
    data = _witness_json(report, metric)
    if metric == "sm":
        return ["witness signs: " + " ".join(f"{s:+d}" for s in data["signs"])]
    lines = [f"witness mirrored: {str(data['mirrored']).lower()}"]
    if "flow" in data:
        lines.append("witness flow:")
        lines += ["  " + " ".join(row) for row in data["flow"]]
    else:
        lines.append("witness assignment (entry of A -> entry of B):")
        lines += [f"  {i} -> {j}" for i, j in data["assignment"]]
    return lines


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


# ---------------------------------------------------------------- commands


def cmd_invariant(args, out) -> int:
    cloud = read_cloud(args.file)
    c = center(cloud)
    spec = eigen_sym(covariance(c))
    report = is_principally_generic(spec, args.rel_tol)
    if args.pcm and not report.is_generic:
        raise NotGeneric(f"{args.file}: cloud is not principally generic; drop --pcm to get the WMI")
    pcm_matrix = pcm(c, spec, args.rel_tol).matrix if report.is_generic else None
    show_wmi = args.wmi or not report.is_generic
    W = wmi(c, args.quantum, args.tau_dep) if show_wmi else None

    if args.json:
        doc = {
            "schema": SCHEMA,
            "file": str(args.file),
            "m": cloud.m,
            "n": cloud.n,
            "radius": c.radius,
            "eigenvalues": spec.eigenvalues.tolist(),
            "generic": report.is_generic,
            "gap": report.gap,
            "threshold": report.threshold_used,
            "pcm": pcm_matrix.tolist() if pcm_matrix is not None else None,
        }
        if W is not None:
            doc["wmi"] = {
                "sequences": W.sequences,
                "quantum": W.quantum,
                "entries": [
                    {"weight": str(e.weight), "count": e.count, "matrix": e.matrix.tolist()}
                    for e in W.entries
                ],
            }
        out.write(_dumps(doc) + "\n")
        return EXIT_OK

    lines = [
        f"file: {args.file}",
        f"points: {cloud.m}",
        f"dimension: {cloud.n}",
        "eigenvalues: " + " ".join(f"{x:.12g}" for x in spec.eigenvalues),
        f"generic: {str(report.is_generic).lower()}",
        f"gap: {report.gap:.6g} (threshold {report.threshold_used:.3g})",
    ]
    if pcm_matrix is not None:
        lines.append("pcm:")
        lines += _matrix_lines(pcm_matrix)
    if W is not None:
        lines.append(f"wmi entries: {len(W)} (from {W.sequences} sequences)")
        for k, e in enumerate(W.entries):
            lines.append(f"  entry {k}: weight {e.weight} (count {e.count})")
            if args.full:
                lines += _matrix_lines(e.matrix, indent="    ")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def _config(args) -> RunConfig:
    return RunConfig(args.metric, args.orientation, args.rel_tol, args.quantum, args.tau_dep)


def cmd_dist(args, out) -> int:
    cfg = _config(args)
    A, B = read_cloud(args.a), read_cloud(args.b)
    names = (str(args.a), str(args.b))
    if A.n != B.n or (cfg.metric in ("sm", "lac") and A.m != B.m):
        # check before building invariants, which may be expensive
        check_pair(Prepared(A, 0.0, None), Prepared(B, 0.0, None), cfg, names)
    a, b = prepare(A, cfg), prepare(B, cfg)
    report = pair_report(a, b, cfg)
    iso = is_isometric(report.value, a, b)
    if args.json:
        doc = {
            "schema": SCHEMA,
            "a": names[0],
            "b": names[1],
            "metric": cfg.metric,
            "orientation": cfg.orientation,
            "value": report.value,
            "isometric": iso,
        }
        if args.witness:
            doc["witness"] = _witness_json(report, cfg.metric)
        out.write(_dumps(doc) + "\n")
        return EXIT_OK
    lines = [
        f"metric: {cfg.metric}",
        f"orientation: {cfg.orientation}",
        f"value: {_fmt(report.value)}",
        f"isometric: {str(iso).lower()}",
    ]
    if args.witness:
        lines += _witness_lines(report, cfg.metric)
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def _thread_count(cells: int) -> int:
    raw = os.environ.get("ISOCLOUDS_THREADS", "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        raise InvalidInput(f"ISOCLOUDS_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(cap, cells))


def distance_matrix(paths, cfg: RunConfig) -> np.ndarray:
    """Symmetric matrix of pair distances; cells are computed independently."""
    clouds = [read_cloud(p) for p in paths]
    n0 = clouds[0].n
    for p, c in zip(paths, clouds):
        if c.n != n0:
            raise InputMismatch(f"{p}: dimension {c.n} differs from {paths[0]} (dimension {n0})")
        if cfg.metric in ("sm", "lac") and c.m != clouds[0].m:
            raise InputMismatch(f"{p}: {c.m} points, {paths[0]} has {clouds[0].m}; --metric {cfg.metric} needs equal counts")
    prepared = [prepare(c, cfg) for c in clouds]
    k = len(prepared)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    D = np.zeros((k, k))
    if pairs:
        with ThreadPoolExecutor(max_workers=_thread_count(len(pairs))) as pool:
            values = pool.map(lambda ij: pair_report(prepared[ij[0]], prepared[ij[1]], cfg).value, pairs)
            for (i, j), v in zip(pairs, values):
                D[i, j] = D[j, i] = v
    return D


def cmd_matrix(args, out) -> int:
    cfg = _config(args)
    directory = Path(args.dir)
    if not directory.is_dir():
        raise ParseError(directory, 0, "not a directory")
    paths = sorted(p for p in directory.iterdir() if p.suffix.lower() in CLOUD_SUFFIXES)
    if not paths:
        raise ParseError(directory, 0, "no .csv or .xyz files found")
    D = distance_matrix(paths, cfg)
    labels = [p.name for p in paths]
    if args.output == "json":
        doc = {
            "schema": SCHEMA,
            "metric": cfg.metric,
            "orientation": cfg.orientation,
            "labels": labels,
            "matrix": D.tolist(),
        }
        out.write(_dumps(doc) + "\n")
    else:
        buf = io.StringIO()
        buf.write("," + ",".join(labels) + "\n")
        for name, row in zip(labels, D):
            buf.write(name + "," + ",".join(_fmt(x) for x in row) + "\n")
        out.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def _add_tolerances(p: argparse.ArgumentParser):
    p.add_argument("--rel-tol", type=float, default=GENERIC_REL_TOL,
                   help="relative eigenvalue separation for genericity (default %(default)g)")
    p.add_argument("--quantum", type=float, default=QUANTUM,
                   help="quantization step for matrix equality (default %(default)g)")
    p.add_argument("--tau-dep", type=float, default=DEP_TOL,
                   help="relative threshold for degenerate point sequences (default %(default)g)")


def _add_metric(p: argparse.ArgumentParser):
    p.add_argument("--metric", choices=("sm", "lac", "emd"), default="lac")
    p.add_argument("--orientation", choices=("rigid", "full"), default="full",
                   help="rigid: rotations and translations only; full: reflections too")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoclouds", description="Isometry invariants of point clouds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariant", help="genericity report with PCM or WMI")
    p.add_argument("file")
    p.add_argument("--full", action="store_true", help="print every WMI matrix")
    p.add_argument("--wmi", action="store_true", help="show the WMI even for generic clouds")
    p.add_argument("--pcm", action="store_true", help="require a PCM (exit 4 if not generic)")
    p.add_argument("--json", action="store_true")
    _add_tolerances(p)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("dist", help="distance between two clouds")
    p.add_argument("a")
    p.add_argument("b")
    _add_metric(p)
    p.add_argument("--witness", action="store_true", help="print the optimal assignment, flow or signs")
    p.add_argument("--json", action="store_true")
    _add_tolerances(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("matrix", help="pairwise distance matrix of a directory of clouds")
    p.add_argument("dir")
    _add_metric(p)
    p.add_argument("--output", choices=("csv", "json"), default="csv")
    _add_tolerances(p)
    p.set_defaults(func=cmd_matrix)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except NotGeneric as exc:
        err.write(f"error: {exc}\n")
        return EXIT_NOT_GENERIC
    except InvalidInput as exc:
        err.write(f"error: {exc}\n")
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
