"""Command-line driver: ``lck run`` and ``lck demo``."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .charts import HopfData
from .verify import SUITE_NAMES, CheckResult, run_suite

__all__ = ["RunConfig", "RunReport", "ConfigError", "run", "main"]

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    """Invalid run configuration (exit status 2)."""


def _parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex entry must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    return complex(v)


@dataclass
class RunConfig:
    n: int = 2
    a: tuple = (1.0, 1.0)
    s: float = math.log(2.0)
    c: Optional[tuple] = None
    seed: int = 0
    points: int = 100
    t_range: float = 2.0
    suites: tuple = ("all",)
    tol_overrides: dict = field(default_factory=dict)
    output_format: str = "json"
    parallel: int = 1
    timing: bool = False

    def hopf_data(self) -> HopfData:
        try:
            c = None if self.c is None else tuple(_parse_complex(x) for x in self.c)
            return HopfData(int(self.n), tuple(float(x) for x in self.a), float(self.s), c)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def suite_list(self) -> List[str]:
        names = []
        for name in self.suites:
            if name == "all":
                names.extend(SUITE_NAMES)
            elif name in SUITE_NAMES:
                names.append(name)
            else:
                raise ConfigError(f"unknown suite {name!r}; allowed: {', '.join(SUITE_NAMES + ('all',))}")
        return [n for n in SUITE_NAMES if n in names]

    def validate(self) -> HopfData:
        data = self.hopf_data()
        if self.points < 1:
            raise ConfigError("points must be positive")
        if self.t_range <= 0:
            raise ConfigError("t_range must be positive")
        if self.output_format not in ("json", "text"):
            raise ConfigError("format must be json or text")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.parallel < 1:
            raise ConfigError("parallel must be >= 1")
        for k, v in self.tol_overrides.items():
            if not isinstance(v, (int, float)):
                raise ConfigError(f"tolerance override {k!r} must be a number")
        self.suite_list()
        return data

    def echo(self, data: HopfData) -> dict:
        return {
            "n": data.n,
            "a": list(data.a),
            "s": data.s,
            "c": [[z.real, z.imag] for z in data.c],
            "lambda": [[z.real, z.imag] for z in data.lam],
            "seed": int(self.seed),
            "points": int(self.points),
            "t_range": float(self.t_range),
            "suites": self.suite_list(),
            "tol_overrides": dict(sorted(self.tol_overrides.items())),
        }


@dataclass
class RunReport:
    config: dict
    suites: List[dict]
    overall_pass: bool
    elapsed_ms: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "suites": self.suites,
            "overall_pass": self.overall_pass,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lam = ", ".join(f"{z[0]:.6g}{z[1]:+.6g}i" for z in self.config["lambda"])
        lines = [f"Lambda = ({lam})"]
        for suite in self.suites:
            lines.append(f"[{suite['name']}]")
            for chk in suite["checks"]:
                flag = "PASS" if chk["pass"] else "FAIL"
                lines.append(f"  {chk['name']:<44s} {chk['max_residual']:+.3e}  tol {chk['tolerance']:.1e}  {flag}")
        lines.append(f"overall: {'PASS' if self.overall_pass else 'FAIL'}")
        return "\n".join(lines) + "\n"


def run(config: RunConfig) -> RunReport:
    """Build the structure, run the selected suites and collect the report."""
    data = config.validate()
    names = config.suite_list()
    start = time.perf_counter()

    def one(name):
        t0 = time.perf_counter()
        checks: List[CheckResult] = run_suite(name, data, config.seed, config.points,
                                              config.t_range, config.tol_overrides)
        return checks, (time.perf_counter() - t0) * 1e3

    if config.parallel > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=config.parallel) as pool:
            outcomes = list(pool.map(one, names))
    else:
        outcomes = [one(name) for name in names]
    suites = []
    for name, (checks, ms) in zip(names, outcomes):
        suites.append({
            "name": name,
            "checks": [c.to_dict() for c in checks],
            "pass": all(c.passed for c in checks),
            "elapsed_ms": round(ms, 3) if config.timing else None,
        })
    total = (time.perf_counter() - start) * 1e3
    return RunReport(
        config=config.echo(data),
        suites=suites,
        overall_pass=all(s["pass"] for s in suites),
        elapsed_ms=round(total, 3) if config.timing else None,
    )


# -- argument handling -------------------------------------------------------------------

def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _words(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _tol_pair(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError("tolerance override must look like name=value")
    k, v = text.split("=", 1)
    return k.strip(), float(v)


_FIELDS = ("n", "a", "s", "c", "seed", "points", "t_range", "suites", "tol_overrides", "format")


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(doc) - set(_FIELDS) - {"output_format", "parallel"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return doc


def config_from_args(args: argparse.Namespace) -> RunConfig:
    doc = _load_config_file(args.config) if args.config else {}
    cfg = RunConfig()
    if "n" in doc:
        cfg.n = doc["n"]
    if "a" in doc:
        cfg.a = tuple(doc["a"])
    if "s" in doc:
        cfg.s = doc["s"]
    if "c" in doc:
        cfg.c = tuple(doc["c"])
    for key in ("seed", "points", "t_range", "parallel"):
        if key in doc:
            setattr(cfg, key, doc[key])
    if "suites" in doc:
        cfg.suites = tuple(doc["suites"])
    if "tol_overrides" in doc:
        cfg.tol_overrides = dict(doc["tol_overrides"])
    fmt = doc.get("format", doc.get("output_format"))
    if fmt is not None:
        cfg.output_format = fmt
    # command-line flags override the file
    for key in ("n", "s", "seed", "points", "t_range", "parallel"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    if args.a is not None:
        cfg.a = args.a
    if args.c is not None:
        cfg.c = args.c
    if args.suites is not None:
        cfg.suites = args.suites
    if args.format is not None:
        cfg.output_format = args.format
    if args.tol:
        cfg.tol_overrides = {**cfg.tol_overrides, **dict(args.tol)}
    cfg.timing = bool(args.timing)
    if "n" not in doc and args.n is None and len(cfg.a) != cfg.n:
        cfg.n = len(cfg.a)
    return cfg


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=_floats, help="comma-separated weights a_1 <= ... <= a_n")
    p.add_argument("--s", type=float)
    p.add_argument("--c", type=_words, help="comma-separated unit complex numbers, e.g. 1,0.6+0.8j")
    p.add_argument("--seed", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--t-range", dest="t_range", type=float)
    p.add_argument("--suites", type=_words, help=f"comma-separated subset of {','.join(SUITE_NAMES)},all")
    p.add_argument("--tol", type=_tol_pair, action="append", help="override a tolerance: name=value")
    p.add_argument("--format", choices=("json", "text"))
    p.add_argument("--parallel", type=int, help="run suites on this many threads")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--timing", action="store_true", help="include wall times (breaks byte-reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lck", description="Verify l.c.K. structures on Hopf manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_flags(sub.add_parser("run", help="run verification suites"))
    demo = sub.add_parser("demo", help="standard Hopf case with every check, as text")
    demo.add_argument("--points", type=int, default=100)
    demo.add_argument("--seed", type=int, default=0)
    return parser


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "demo":
            cfg = RunConfig(n=2, a=(1.0, 1.0), s=math.log(2.0), c=(1.0, 1.0), seed=args.seed,
                            points=args.points, output_format="text")
            out = None
        else:
            cfg = config_from_args(args)
            out = args.output
        report = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(report.to_json() if cfg.output_format == "json" else report.to_text(), out)
    return EXIT_PASS if report.overall_pass else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
