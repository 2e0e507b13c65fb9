"""Command-line front end: ``lcaft {estimate,verify,report}``.

Exit codes: 0 when every selected check passes, 1 when a check fails (the
report is still written), 2 for parse, validation and I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _validation as V
from . import verify
from .exceptions import GroupSpecError, LCAFTError, ValidationError
from .functions import BanachSpec, OperatorSpec, conjugate_exponent
from .ftype import estimate_constant
from .groups import GroupModel, Lattice, make_group, parse_group, parse_points, subgroup

COMMANDS = ("estimate", "verify", "report")


@dataclass(frozen=True)
class RunConfig:
    command: str
    group: str = "Z4"
    subgroup: str | None = None
    op: str = "id:1:q=2"
    p: float = 1.5
    seed: int = 0
    restarts: int = 32
    tol: float = 1e-9
    checks: tuple = ("all",)
    out: str | None = None
    format: str = "json"
    witnesses: int = 20

    def to_json(self):
        d = asdict(self)
        d["checks"] = list(self.checks)
        return d


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError("argv", message)


def _build_parser():
    parser = _Parser(prog="lcaft", description="Fourier-type estimates and checks on LCA group models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--group", default="Z4", help='group spec, e.g. "Z4", "Z2 x Z3"')
        sp.add_argument("--subgroup", default=None, help='subgroup generators, e.g. "2" or "1,0;0,1"')
        sp.add_argument("--op", default="id:1:q=2", help="id:<dim>:q=<q> | zero:<dim> | file:<path> | JSON rows")
        sp.add_argument("--p", default="1.5")
        sp.add_argument("--seed", default="0")
        sp.add_argument("--restarts", type=int, default=32)
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--check", action="append", dest="checks", choices=("all",) + verify.CHECKS)
        sp.add_argument("--witnesses", type=int, default=20)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def parse_args(argv=None) -> RunConfig:
    """Validate ``argv`` into a :class:`RunConfig`; raises on bad input."""
    ns = _build_parser().parse_args(argv)
    p = V.check_exponent(ns.p)
    parse_group(ns.group)
    parse_operator(ns.op)
    seed = V.check_seed(ns.seed)
    V.check_positive_int("restarts", ns.restarts)
    V.check_positive_int("witnesses", ns.witnesses)
    V.check_tolerance(ns.tol)
    if ns.subgroup is not None:
        parse_points(ns.subgroup, parse_group(ns.group))
    checks = tuple(ns.checks) if ns.checks else ("all",)
    return RunConfig(ns.command, ns.group, ns.subgroup, ns.op, p, seed, ns.restarts, ns.tol, checks,
                     ns.out, ns.format, ns.witnesses)


def parse_operator(text: str) -> OperatorSpec:
    """``id:<dim>:q=<q>``, ``zero:<dim>``, ``file:<path>[:qx=..][:qy=..]`` or an inline JSON matrix."""
    text = text.strip()
    if text.startswith("["):
        return _matrix_operator(_load_matrix(json.loads(text)), {})
    kind, _, rest = text.partition(":")
    opts, args = {}, []
    if kind == "file":
        path, *tail = rest.split(":")
        args = [path]
    else:
        tail = rest.split(":") if rest else []
    for tok in tail:
        if "=" in tok:
            k, v = tok.split("=", 1)
            opts[k.strip()] = float(v)
        elif kind != "file":
            args.append(tok)
    if kind in ("id", "zero"):
        if len(args) != 1:
            raise ValidationError("op", f"expected {kind}:<dim>, got {text!r}")
        dim = V.check_positive_int("op dim", int(args[0]))
        q = opts.get("q", 2.0)
        space = BanachSpec(dim, q)
        return OperatorSpec(np.eye(dim) if kind == "id" else np.zeros((dim, dim)), space, space)
    if kind == "file":
        try:
            with open(args[0], encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read operator file {args[0]!r}: {exc.strerror}") from exc
        return _matrix_operator(_load_matrix(data), opts)
    raise ValidationError("op", f"unknown operator syntax {text!r}")


def _load_matrix(data):
    try:
        return np.array([[complex(float(re), float(im)) for re, im in row] for row in data], dtype=complex)
    except (TypeError, ValueError):
        raise ValidationError("op", "matrix must be a JSON array of rows of [re, im] pairs") from None


def _matrix_operator(m, opts):
    q = opts.get("q", 2.0)
    return OperatorSpec.from_matrix(m, opts.get("qx", q), opts.get("qy", q))


def default_subgroup(g: GroupModel):
    """Generators of the default subgroup used by the subgroup checks."""
    orders = g.orders
    if len(orders) >= 2:
        return [tuple(1 if i == 0 else 0 for i in range(len(orders)))]
    n = orders[0]
    spf = next((k for k in range(2, n + 1) if n % k == 0), n)
    return [(spf,)] if spf < n else []


def _finite_base(g):
    return GroupModel(tuple(a for a in g.axes if not isinstance(a, Lattice))) if any(
        not isinstance(a, Lattice) for a in g.axes) else None


def _run_checks(cfg: RunConfig, g: GroupModel, T: OperatorSpec):
    names = verify.CHECKS if "all" in cfg.checks else tuple(dict.fromkeys(cfg.checks))
    seeds = [cfg.seed + i for i in range(cfg.witnesses)]
    few = seeds[: max(1, min(len(seeds), 10))]
    reports = []
    H = None
    if g.is_finite:
        gens = parse_points(cfg.subgroup, g) if cfg.subgroup else default_subgroup(g)
        H = subgroup(g, gens)
    for name in names:
        if name == "sinc_sum":
            pc = conjugate_exponent(cfg.p)
            reports.append(verify.check_sinc_sum(pc, verify.default_sinc_samples(50, cfg.seed)))
            continue
        if not g.is_finite:
            raise ValidationError("group", f"check {name!r} needs a finite group")
        if name == "parseval":
            reports.append(verify.check_parseval(g, seeds, dim=T.domain.dim))
        elif name == "weil":
            reports.append(verify.check_weil(g, H, seeds, p=cfg.p, dim=T.domain.dim, q=T.domain.q))
        elif name == "open_subgroup":
            reports.append(verify.check_open_subgroup(g, H, T, cfg.p, seeds, restarts=cfg.restarts, seed=cfg.seed))
        elif name == "fcc":
            reports.append(verify.check_fcc(g, H, T, cfg.p, seeds, restarts=cfg.restarts, seed=cfg.seed))
        elif name == "duality":
            reports.append(verify.check_duality(g, T, cfg.p, restarts=cfg.restarts, tol=cfg.tol, seed=cfg.seed))
        elif name == "eqrz":
            reports.append(verify.check_eqrz(g, T, cfg.p, seeds, restarts=min(cfg.restarts, 8), seed=cfg.seed))
        elif name == "zng":
            reports.append(verify.check_zng(g, T, cfg.p, few))
    return reports


def _estimate(cfg, g, T):
    threads = os.environ.get("LFT_THREADS")
    n_jobs = int(threads) if threads else None
    return estimate_constant(g, T, cfg.p, restarts=cfg.restarts, tol=cfg.tol, seed=cfg.seed, n_jobs=n_jobs)


def build_report(cfg: RunConfig):
    """Run the configured command; returns ``(document, exit_code)``."""
    g = make_group(cfg.group)
    T = parse_operator(cfg.op)
    doc = {"command": cfg.command, "config": cfg.to_json()}
    code = 0
    if cfg.command in ("estimate", "report"):
        doc["estimate"] = _estimate(cfg, g, T).to_json()
    if cfg.command in ("verify", "report"):
        reports = _run_checks(cfg, g, T)
        doc["checks"] = [r.to_json() for r in reports]
        doc["verdict"] = "pass" if all(r.passed for r in reports) else "fail"
        code = 0 if doc["verdict"] == "pass" else 1
    return doc, code


def _csv_rows(doc):
    rows = []
    if "estimate" in doc:
        e = doc["estimate"]
        rows.append({"id": "estimate", "verdict": "", "margin": "", "budget": e["error"],
                     "witnesses": e["restarts"], "bound": e["bound"], "p": e["p"]})
    for c in doc.get("checks", []):
        rows.append({"id": c["id"], "verdict": c["verdict"], "margin": c["margin"], "budget": c["budget"],
                     "witnesses": c["witnesses"], "bound": "", "p": c["params"].get("p", "")})
    return rows


def render(doc, fmt="json") -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    fields = ["id", "verdict", "margin", "budget", "witnesses", "bound", "p"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for row in _csv_rows(doc):
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def write_atomic(path: str, text: str):
    """Write via a temporary file in the target directory and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".lcaft-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: RunConfig) -> int:
    doc, code = build_report(cfg)
    text = render(doc, cfg.format)
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    return code


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except GroupSpecError as exc:
        print(f"lcaft: group spec error: {exc}", file=sys.stderr)
        return 2
    except (LCAFTError, ValueError, OSError) as exc:
        print(f"lcaft: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except OSError as exc:
        print(f"lcaft: I/O error: {exc}", file=sys.stderr)
        return 2
    except (LCAFTError, ValueError) as exc:
        print(f"lcaft: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
