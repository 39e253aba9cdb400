"""Command-line front end.

    ellint verify   --identity main --n 1 --m 0 --seeds 1..20 --tol 1e-8
    ellint converge --identity dixon-eval --n 1 --seeds 3 --max-level 5
    ellint converge --identity bh1 --n 1 --m 1 --seeds 3 --study plimit

Exit status: 0 all passed, 1 an identity failed with converged quadrature,
2 configuration error, 3 infeasible sampling, 4 quadrature did not
converge, 130 interrupted (completed reports are still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import EllintError, Infeasible, NoConvergence
from .identities import (
    QuadratureSettings,
    bh1_limit_probe,
    grid_study,
    sides_for,
    verify,
)
from .quadrature import default_workers
from .sampling import (
    BHParams1,
    IdentityKind,
    check_admissible,
    from_flat,
    sample_for,
)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NOCONV, EXIT_INTERRUPT = 0, 1, 2, 3, 4, 130

REPORT_FIELDS = ("identity", "n", "m", "k", "seed", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                 "rel_err", "passed", "wall_ms", "history")

ALL_DEFAULT_DIMS = {
    IdentityKind.DixonTransform: (1, 1),
    IdentityKind.DixonEval: (1, 0),
    IdentityKind.SelbergEval: (1, 0),
    IdentityKind.SelbergTransform: (1, 0),
    IdentityKind.MainTheorem: (1, 1),
    IdentityKind.LemmaSym: (2, 0),
    IdentityKind.BH1: (1, 1),
    IdentityKind.BH2: (1, 1),
    IdentityKind.BH3: (1, 1),
    IdentityKind.ClassicalEuler: (1, 0),
    IdentityKind.ClassicalContiguous: (1, 0),
    IdentityKind.GammaLimitP0: (0, 0),
}


class ConfigError(EllintError):
    """Invalid command-line configuration or parameter file."""


@dataclass
class RunConfig:
    identity: object  # IdentityKind or "all"
    n: int = 1
    m: int = 0
    k: int | None = None
    seeds: tuple = ()
    tol: float | None = None
    target_rel: float | None = None
    grid_start: int | None = None
    max_level: int = 4
    params_file: str | None = None
    output: str | None = None
    format: str = "json"
    margin: float = 0.05
    timing: bool = False
    study: str = "grid"

    def validate(self):
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("--tol must be > 0")
        if self.target_rel is not None and not self.target_rel > 0:
            raise ConfigError("--target-rel must be > 0")
        if self.grid_start is not None and self.grid_start < 4:
            raise ConfigError("--grid-start must be >= 4")
        if self.max_level < 1:
            raise ConfigError("--max-level must be >= 1")
        if not (0 <= self.n <= 4 and 0 <= self.m <= 3):
            raise ConfigError("need 0 <= n <= 4 and 0 <= m <= 3")
        if self.format not in ("json", "csv"):
            raise ConfigError("--format must be json or csv")
        if self.params_file is None and not self.seeds:
            raise ConfigError("--seeds is required without --params-file")
        if self.params_file is not None and self.identity == "all":
            raise ConfigError("--params-file needs a single --identity")
        return self

    @property
    def settings(self) -> QuadratureSettings:
        return QuadratureSettings(self.target_rel, self.grid_start, self.max_level)


# -- parsing ----------------------------------------------------------------


def parse_seeds(text: str) -> tuple:
    """'1..5,9' -> (1, 2, 3, 4, 5, 9); ranges are inclusive."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", part)
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            if b < a:
                raise ConfigError(f"empty seed range {part!r}")
            seeds.extend(range(a, b + 1))
        elif re.fullmatch(r"-?\d+", part):
            seeds.append(int(part))
        else:
            raise ConfigError(f"bad seed spec {part!r} (use a..b or comma lists)")
    return tuple(seeds)


def parse_params_text(text: str, source: str = "<params>") -> dict:
    """Flat ``name = re,im`` lines (``name = re`` for reals); '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'name = re,im'")
        name, value = (s.strip() for s in line.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ConfigError(f"{source}:{lineno}: bad field name {name!r}")
        if name in out:
            raise ConfigError(f"{source}:{lineno}: field {name!r} given twice")
        parts = [s.strip() for s in value.split(",")]
        try:
            if len(parts) == 1:
                out[name] = complex(float(parts[0]), 0.0)
            elif len(parts) == 2:
                out[name] = complex(float(parts[0]), float(parts[1]))
            else:
                raise ValueError
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: field {name!r}: cannot parse {value!r}") from None
    return out


def format_params(d: dict) -> str:
    """Inverse of :func:`parse_params_text` (round-trips floats exactly)."""
    lines = []
    for name, val in d.items():
        if isinstance(val, int):
            lines.append(f"{name} = {val}")
        else:
            c = complex(val)
            lines.append(f"{name} = {c.real!r},{c.imag!r}")
    return "\n".join(lines) + "\n"


def load_params(identity: IdentityKind, path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    flat = parse_params_text(text, path)
    try:
        params = from_flat(identity, flat)
    except KeyError as exc:
        raise ConfigError(f"{path}: missing field {exc.args[0]!r}") from None
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return check_admissible(params)
    except Infeasible as exc:
        raise ConfigError(f"{path}: {exc}") from None


# -- running ----------------------------------------------------------------


@dataclass
class JobResult:
    identity: IdentityKind
    dims: tuple
    seed: int | None
    report: object = None
    error: str | None = None
    status: int = EXIT_OK
    history: dict | None = None

    def sort_key(self):
        return (self.identity.value, -1 if self.seed is None else self.seed)


def _dims(identity, cfg):
    if cfg.identity == "all":
        n, m = ALL_DEFAULT_DIMS[identity]
        return n, m, None
    return cfg.n, cfg.m, cfg.k


def _history_dict(lh, rh):
    return {"lhs": lh.to_rows(), "rhs": rh.to_rows()}


def _run_job(identity, cfg, seed, params=None) -> JobResult:
    dims = _dims(identity, cfg)
    job = JobResult(identity, dims, seed)
    try:
        if params is None:
            params = sample_for(identity, dims, seed, cfg.margin)
        rep = verify(identity, params, cfg.tol, cfg.settings)
        job.report = rep
        job.dims = rep.dims
        job.history = _history_dict(rep.lhs_history, rep.rhs_history)
        job.status = EXIT_OK if rep.passed else EXIT_FAILED
    except Infeasible as exc:
        job.error, job.status = str(exc), EXIT_INFEASIBLE
    except NoConvergence as exc:
        job.error, job.status = str(exc), EXIT_NOCONV
        job.history = {"lhs": exc.history.to_rows() if exc.history else [], "rhs": []}
    except EllintError as exc:
        job.error, job.status = f"{type(exc).__name__}: {exc}", EXIT_FAILED
    except ValueError as exc:
        job.error, job.status = f"configuration: {exc}", EXIT_CONFIG
    return job


def _record(job: JobResult, timing: bool) -> dict:
    rep = job.report
    n, m, k = (tuple(job.dims) + (None, None, None))[:3]
    rec = {
        "identity": job.identity.value,
        "n": n,
        "m": m,
        "k": k,
        "seed": job.seed,
        "lhs_re": rep.lhs.real if rep else None,
        "lhs_im": rep.lhs.imag if rep else None,
        "rhs_re": rep.rhs.real if rep else None,
        "rhs_im": rep.rhs.imag if rep else None,
        "rel_err": rep.rel_err if rep else None,
        "passed": bool(rep.passed) if rep else False,
        "wall_ms": round(rep.wall_time * 1000, 3) if (rep and timing) else None,
        "history": job.history or {"lhs": [], "rhs": []},
    }
    return rec


def render(records: list, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        row = dict(rec)
        row["history"] = json.dumps(rec["history"], separators=(",", ":"))
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _status(jobs) -> int:
    codes = {j.status for j in jobs}
    for code in (EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NOCONV, EXIT_FAILED):
        if code in codes:
            return code
    return EXIT_OK


def run_verify(cfg: RunConfig) -> int:
    """Verify every (identity, seed) job; write the sorted report; return the exit status."""
    cfg.validate()
    kinds = list(IdentityKind) if cfg.identity == "all" else [cfg.identity]
    if cfg.params_file is not None:
        params = load_params(cfg.identity, cfg.params_file)
        tasks = [(cfg.identity, None, params)]
    else:
        tasks = [(kind, seed, None) for kind in kinds for seed in cfg.seeds]
    interrupted = False
    pool = ThreadPoolExecutor(max_workers=max(1, default_workers()))
    futures = [pool.submit(_run_job, kind, cfg, seed, params) for kind, seed, params in tasks]
    try:
        for fut in futures:
            fut.result()
    except KeyboardInterrupt:
        interrupted = True
    pool.shutdown(wait=not interrupted, cancel_futures=True)
    done = [f.result() for f in futures if f.done() and not f.cancelled()]
    done.sort(key=JobResult.sort_key)
    _write(render([_record(j, cfg.timing) for j in done], cfg.format), cfg.output)
    for j in done:
        if j.error:
            print(f"{j.identity.value} seed={j.seed}: {j.error}", file=sys.stderr)
        elif not j.report.passed:
            print(f"{j.identity.value} seed={j.seed}: rel_err={j.report.rel_err:.3g} "
                  f"(tol {j.report.tol:g}) FAILED", file=sys.stderr)
    if interrupted:
        print(f"interrupted: wrote {len(done)} of {len(tasks)} reports", file=sys.stderr)
        return EXIT_INTERRUPT
    return _status(done)


def run_converge(cfg: RunConfig) -> int:
    """Emit the value-versus-grid table (or the p -> 0 gap table) for one instance."""
    cfg.validate()
    if cfg.identity == "all":
        raise ConfigError("converge needs a single --identity")
    identity = cfg.identity
    seed = cfg.seeds[0] if cfg.seeds else None
    dims = (cfg.n, cfg.m, cfg.k)
    try:
        if cfg.params_file is not None:
            params = load_params(identity, cfg.params_file)
        else:
            params = sample_for(identity, dims, seed, cfg.margin)
    except Infeasible as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INFEASIBLE
    head = {"identity": identity.value, "n": cfg.n, "m": cfg.m, "k": cfg.k, "seed": seed, "study": cfg.study}
    if cfg.study == "plimit":
        if identity is not IdentityKind.BH1 or not isinstance(params, BHParams1):
            raise ConfigError("--study plimit applies to --identity bh1")
        rows = [{"p": p, "elliptic_re": v.real, "elliptic_im": v.imag, "rel_gap": g}
                for p, v, g in bh1_limit_probe(params, settings=cfg.settings)]
    else:
        try:
            lspec, lpre, rspec, rpre = sides_for(identity, params)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        levels = cfg.max_level + 1
        left = grid_study(lspec, levels, cfg.grid_start)
        right = grid_study(rspec, levels, cfg.grid_start) if rspec is not None and rspec.n else None
        rows = []
        for i, (size, val, change) in enumerate(left):
            lhs = lpre * val
            rhs = rpre * (right[i][1] if right else 1.0)
            rows.append({
                "size": size,
                "lhs_re": lhs.real, "lhs_im": lhs.imag, "lhs_rel_change": change,
                "rhs_re": rhs.real, "rhs_im": rhs.imag,
                "rhs_rel_change": right[i][2] if right else None,
                "rel_err": abs(lhs - rhs) / max(abs(lhs), abs(rhs)),
            })
    if cfg.format == "json":
        text = json.dumps(dict(head, rows=rows), indent=1) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in r.items()})
        text = buf.getvalue()
    _write(text, cfg.output)
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ellint", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    names = [k.value for k in IdentityKind]
    for cmd, helptext in (("verify", "verify identities on seeded or given parameters"),
                          ("converge", "grid-refinement or p -> 0 study of one instance")):
        p = sub.add_parser(cmd, help=helptext)
        p.add_argument("--identity", required=True,
                       choices=names + (["all"] if cmd == "verify" else []))
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--m", type=int, default=0)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--seeds", default=None, help="a..b inclusive ranges, comma separated")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--target-rel", type=float, default=None)
        p.add_argument("--grid-start", type=int, default=None)
        p.add_argument("--max-level", type=int, default=4)
        p.add_argument("--margin", type=float, default=0.05)
        p.add_argument("--params-file", default=None)
        p.add_argument("--output", default=None, help="report path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--timing", action="store_true", help="record wall_ms (makes output run-dependent)")
        if cmd == "converge":
            p.add_argument("--study", choices=("grid", "plimit"), default="grid")
    return parser


def config_from_args(args) -> RunConfig:
    identity = args.identity if args.identity == "all" else IdentityKind.parse(args.identity)
    return RunConfig(
        identity=identity,
        n=args.n,
        m=args.m,
        k=args.k,
        seeds=parse_seeds(args.seeds) if args.seeds else (),
        tol=args.tol,
        target_rel=args.target_rel,
        grid_start=args.grid_start,
        max_level=args.max_level,
        params_file=args.params_file,
        output=args.output,
        format=args.format,
        margin=args.margin,
        timing=args.timing,
        study=getattr(args, "study", "grid"),
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        if args.command == "verify":
            return run_verify(cfg)
        return run_converge(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
