"""Command-line front end: ``ehdirac verify`` and ``ehdirac dump``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 a check
raised (internal numeric error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, calabi, eh
from .suites import DEFAULT_TOLERANCES, SUITES, SuiteContext, run_suite

__all__ = ["RunConfig", "ConfigError", "run", "render", "write_atomic", "dump_profile", "main"]

OUTPUT_ENV = "EHDIRAC_OUTPUT_DIR"
SUITE_NAMES = tuple(SUITES) + ("all",)
EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid run configuration (maps to the usage exit code)."""


@dataclass
class RunConfig:
    suite: str = "all"
    n: int = 1
    kappa: float = 1.0
    ell_max: int = 3
    seed: int = 0
    samples: int = 100
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    jobs: int = 1

    def validate(self) -> "RunConfig":
        if self.suite not in SUITE_NAMES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.ell_max < 0:
            raise ConfigError("ell-max must be non-negative")
        if not (1 <= self.n <= calabi.MAX_N):
            raise ConfigError(f"n must lie in [1, {calabi.MAX_N}]")
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ConfigError("kappa must be a finite non-negative real")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        for k, v in self.tolerances.items():
            if k not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance key {k!r}")
            if not (v > 0):
                raise ConfigError(f"tolerance {k} must be positive")
        return self


_CASTS = {"suite": str, "n": int, "kappa": float, "ell_max": int, "seed": int, "samples": int, "output": str, "format": str, "jobs": int}


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; ``tol.<check_id>`` sets a tolerance."""
    out: dict = {"tolerances": {}}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            if key.startswith("tol."):
                out["tolerances"][key[4:]] = float(value)
            elif key in _CASTS:
                out[key] = _CASTS[key](value)
            else:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return out


def run(config: RunConfig) -> dict:
    """Execute the selected suites and assemble the report (timestamp excluded)."""
    config.validate()
    names = list(SUITES) if config.suite == "all" else [config.suite]
    ctx = SuiteContext(config.n, config.kappa, config.ell_max, config.seed, config.samples, dict(config.tolerances))
    if config.jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            batches = list(pool.map(lambda nm: run_suite(nm, ctx), names))
    else:
        batches = [run_suite(nm, ctx) for nm in names]
    records = [r for batch in batches for r in batch]
    counts = {s: sum(r["status"] == s for r in records) for s in ("pass", "fail", "error")}
    echo = asdict(config)
    echo.pop("output")
    echo.pop("jobs")
    return {
        "version": __version__,
        "config": echo,
        "summary": dict(counts, total=len(records)),
        "records": records,
    }


def exit_code(report: dict) -> int:
    s = report["summary"]
    if s["error"]:
        return EXIT_INTERNAL
    return EXIT_FAIL if s["fail"] else EXIT_PASS


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    return str(x)


def render(report: dict, fmt: str, timestamp: str | None = None) -> str:
    """Serialise a report; the timestamp lives in its own top-level field."""
    if fmt == "json":
        doc = dict(report, generated_at=timestamp)
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "check_id", "anchor", "status", "max_residual", "tolerance", "details"])
    for r in report["records"]:
        w.writerow(
            [r["suite"], r["check_id"], r["anchor"], r["status"], repr(float(r["max_residual"])), repr(r["tolerance"]),
             json.dumps(_jsonable(r["details"]), sort_keys=True)]
        )
    return buf.getvalue()


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _default_output(name: str) -> str | None:
    d = os.environ.get(OUTPUT_ENV)
    return str(Path(d) / name) if d else None


# -- dump -------------------------------------------------------------------------
PROFILES = ("eh", "calabi", "modes")


def _grid(spec: str) -> np.ndarray:
    try:
        a, b, k = spec.split(",")
        a, b, k = float(a), float(b), int(k)
    except ValueError as exc:
        raise ConfigError(f"grid must be 'a,b,k', got {spec!r}") from exc
    if not (0 < a < b) or k < 2:
        raise ConfigError("grid needs 0 < a < b and k >= 2")
    return np.linspace(a, b, k)


def dump_profile(name: str, s: np.ndarray, kappa: float, n: int = 2, ell_max: int = 3) -> str:
    """CSV profiles over an ``s`` grid.

    ``eh``: ``s, F, f, omega_tilde_norm_sq, theta3_norm_sq``.
    ``calabi``: ``s, F, omega_tilde_norm_sq, beta_norm_sq`` for base dimension ``n``.
    ``modes``: ``s, F, f, f_times_inverse`` and one ``|sigma|^2`` column per
    normalisable EH mode with ``ell <= ell_max``, along ``z = sqrt(s/2)(1, 1)``.
    """
    if name == "eh":
        return eh.profile_csv(kappa, s)
    if name == "calabi":
        return calabi.profile_csv_general(n, kappa, s)
    if name != "modes":
        raise ConfigError(f"unknown profile {name!r}")
    from fractions import Fraction

    from .zero_modes import admissible_m, classify_eh, eh_norm_sq, eh_spec

    z = np.sqrt(s / 2)[:, None] * np.ones(2)
    F, f = eh.F_of_s(s, kappa), eh.f_of_s(s, kappa)
    cols = {"s": s, "F": F, "f": f, "f_times_inverse": f * (1 / f)}
    for ell in range(1, ell_max + 1):
        for two_n in range(ell):
            N = Fraction(two_n, 2)
            if classify_eh(N, ell).value != "Normalisable":
                continue
            for m in admissible_m(N):
                cols[f"sigma_sq[N={N};m={m};ell={ell}]"] = eh_norm_sq(eh_spec(N, m, ell, kappa), z)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(cols))
    for row in zip(*cols.values()):
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


# -- argument parsing -------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ehdirac", description="Verify Dirac zero-mode identities on EH and Calabi spaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites and write a report")
    v.add_argument("--suite", choices=SUITE_NAMES)
    v.add_argument("--n", type=int)
    v.add_argument("--kappa", type=float)
    v.add_argument("--ell-max", type=int, dest="ell_max")
    v.add_argument("--seed", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--out", dest="output")
    v.add_argument("--format", choices=("json", "csv"))
    v.add_argument("--jobs", type=int, help="suites run concurrently (default 1)")
    v.add_argument("--config", help="flat key = value file; flags override it")
    v.add_argument("--tol", action="append", default=[], metavar="CHECK=VALUE", help="override one tolerance")
    v.add_argument("--timestamp", action=argparse.BooleanOptionalAction, default=True, help="record generation time")

    d = sub.add_parser("dump", help="write plot-ready CSV profiles")
    d.add_argument("--profile", required=True, choices=PROFILES)
    d.add_argument("--grid", required=True, help="a,b,k: k evenly spaced values of s in [a, b]")
    d.add_argument("--kappa", type=float, default=1.0)
    d.add_argument("--n", type=int, default=2)
    d.add_argument("--ell-max", type=int, default=3, dest="ell_max")
    d.add_argument("--out", dest="output")
    return p


def _verify_config(args) -> RunConfig:
    merged = {}
    if args.config:
        merged = parse_config_file(args.config)
    tolerances = dict(merged.pop("tolerances", {}))
    for item in args.tol:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects CHECK=VALUE, got {item!r}")
        try:
            tolerances[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    for key in _CASTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return RunConfig(**merged, tolerances=tolerances).validate()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        if args.command == "verify":
            config = _verify_config(args)
            report = run(config)
            stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()) if args.timestamp else None
            text = render(report, config.format, stamp)
            out = config.output or _default_output(f"report.{config.format}")
            s = report["summary"]
            if out:
                write_atomic(out, text)
                print(f"{s['pass']}/{s['total']} checks passed, {s['fail']} failed, {s['error']} errors; report: {out}")
            else:
                sys.stdout.write(text)
            return exit_code(report)
        s_values = _grid(args.grid)
        if args.kappa < 0:
            raise ConfigError("kappa must be non-negative")
        text = dump_profile(args.profile, s_values, args.kappa, args.n, args.ell_max)
        out = args.output or _default_output(f"profile_{args.profile}.csv")
        if out:
            write_atomic(out, text)
        else:
            sys.stdout.write(text)
        return EXIT_PASS
    except ConfigError as exc:
        print(f"ehdirac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ehdirac: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"ehdirac: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
