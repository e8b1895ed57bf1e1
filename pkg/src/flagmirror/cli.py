"""Command-line entry point.

    flagmirror compute vertex|stab|limit [options]
    flagmirror verify triangularity|diagonal|quasiperiodicity|macdonald|mirror|
                      stab-inverse|limits|all [options]

Exit status: 0 when every requested check passes, 1 when one fails, 2 for
configuration or parameter errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .cache import SeriesCache, write_atomic
from .checks import VERIFY_KINDS, run_kind
from .combinatorics import Perm, all_perms
from .errors import FlagMirrorError, ParameterError
from .numerics import BACKENDS, ParamSet, sample_params
from .report import Report, as_float
from .vertex import vertex_limit, vertex_series

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
FORMATS = ("json", "csv", "markdown")
COMPUTE_KINDS = ("vertex", "stab", "limit")

log = logging.getLogger("flagmirror")


@dataclass
class RunConfig:
    command: str  # "compute" or "verify"
    target: str
    n: int = 2
    seeds: list[int] = field(default_factory=lambda: [7])
    D: int | None = None  # None: 6, or the value in --params
    N: int | None = None  # None: 40, or the value in --params
    precision: int = 0
    backend: str = "float"
    output: str | None = None
    format: str | None = None
    perm: str | None = None
    form: str = "overline"
    which: str = "both"
    r: list[int] | None = None
    params_file: str | None = None
    no_cache: bool = False

    def resolved_format(self) -> str:
        if self.format:
            return self.format
        return "csv" if self.command == "compute" else "json"

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


class ConfigError(ParameterError):
    """Bad flag or config-file value."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# --- argument parsing -------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    # defaults are None so that config-file values can fill the gaps
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, action="append", dest="seeds")
    p.add_argument("--degree", "-D", type=int, dest="D")
    p.add_argument("--theta-terms", "-N", type=int, dest="N")
    p.add_argument("--precision", type=int)
    p.add_argument("--backend", choices=BACKENDS)
    p.add_argument("--params", dest="params_file", help="ParamSet TOML with num/den strings")
    p.add_argument("--config", help="TOML file with a [run] table")
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--perm", help='fixed point, e.g. "2 3 1"')
    p.add_argument("--no-cache", action="store_true", default=None)
    p.add_argument("--verbose", "-v", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flagmirror", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    comp = sub.add_parser("compute", help="print series or matrices")
    comp.add_argument("target", choices=COMPUTE_KINDS)
    _common(comp)
    ver = sub.add_parser("verify", help="check identities and write a report")
    ver.add_argument("target", choices=VERIFY_KINDS + ("all",))
    _common(ver)
    ver.add_argument("--form", choices=("overline", "bold"))
    ver.add_argument("--which", choices=("zeta", "u", "both"))
    ver.add_argument("--r", type=int, action="append")
    return parser


def load_config(argv: list[str] | None) -> RunConfig:
    """Defaults, then the TOML [run] table, then flags given on the command line."""
    ns = build_parser().parse_args(argv)
    values: dict[str, Any] = {}
    if ns.config:
        try:
            data = tomllib.loads(Path(ns.config).read_text())
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        run = data.get("run", data)
        known = set(RunConfig.__dataclass_fields__) - {"command", "target"}
        unknown = set(run) - known - {"seed"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(run)
        if "seed" in values:
            values["seeds"] = [values.pop("seed")]
    for key, val in vars(ns).items():
        if key in ("config", "verbose", "command", "target") or val is None:
            continue
        values[key] = val
    cfg = RunConfig(ns.command, ns.target, **values)
    if cfg.format is not None and cfg.format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    if cfg.n < 2:
        raise ConfigError("n must be at least 2")
    if (cfg.D is not None and cfg.D < 0) or (cfg.N is not None and cfg.N < 1):
        raise ConfigError("degree must be >= 0 and theta terms >= 1")
    if ns.verbose:
        logging.basicConfig(level=logging.INFO)
    return cfg


def _param_sets(cfg: RunConfig) -> list[tuple[str, ParamSet]]:
    if cfg.params_file:
        try:
            text = Path(cfg.params_file).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg.params_file}: {exc}") from exc
        try:
            p = ParamSet.from_toml(text)
        except (KeyError, ValueError, ZeroDivisionError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"bad parameter file: {exc}") from exc
        changes = {k: v for k, v in (("N", cfg.N), ("D", cfg.D)) if v is not None}
        return [(cfg.params_file, p.replace(**changes) if changes else p)]
    N = 40 if cfg.N is None else cfg.N
    D = 6 if cfg.D is None else cfg.D
    return [(f"seed={s}", sample_params(cfg.n, s, N, D, cfg.precision, cfg.backend))
            for s in cfg.seeds]


def _perms(cfg: RunConfig, n: int) -> list[Perm] | None:
    if cfg.perm is None:
        return None
    try:
        I = Perm.parse(cfg.perm)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if I.n != n:
        raise ConfigError(f"--perm has {I.n} entries, expected {n}")
    return [I]


def _fmt(x, params: ParamSet) -> str:
    if params.backend_name == "exact":
        return str(x)
    return params.backend.ctx.nstr(x, 20)


# --- commands ------------------------------------------------------------------------


def run_compute(cfg: RunConfig, cache: SeriesCache) -> tuple[list[dict], int]:
    rows: list[dict] = []
    for label, p in _param_sets(cfg):
        perms = _perms(cfg, p.n) or all_perms(p.n)
        if cfg.target == "stab":
            from .envelope import stab_matrix

            M = stab_matrix(p)
            for I, row in zip(M.labels, M.entries):
                rows.append({"params": label, "row": str(I),
                             **{str(J): _fmt(v, p) for J, v in zip(M.labels, row)}})
            continue
        for I in perms:
            if cfg.target == "vertex":
                s = cache.fetch(f"vertex:{I}", p, p.max_degree,
                                lambda: vertex_series(I, p, p.max_degree))
            else:
                s = cache.fetch(f"limit:{I}", p, p.max_degree,
                                lambda: vertex_limit(I, p, p.max_degree))
            for k, v in s.items():
                rows.append({"params": label, "perm": str(I),
                             "degree": " ".join(map(str, k)), "coefficient": _fmt(v, p)})
    return rows, EXIT_OK


def _warm(p: ParamSet, cache: SeriesCache):
    """Load vertex series from the cache into the record's in-memory memo."""
    for I in all_perms(p.n):
        s = cache.fetch(f"vertex:{I}", p, p.max_degree, lambda: vertex_series(I, p))
        p._cache[("vertex", I.I, p.max_degree)] = s


def run_verify(cfg: RunConfig, cache: SeriesCache) -> tuple[list[Report], int]:
    reports: list[Report] = []
    for label, p in _param_sets(cfg):
        if cache.enabled:
            _warm(p, cache)
        seed = cfg.seeds[0] if cfg.seeds else 0
        try:
            got = run_kind(cfg.target, p, which=cfg.which, form=cfg.form,
                           perms=_perms(cfg, p.n), rs=cfg.r, seed=seed)
        except ParameterError:
            raise
        except FlagMirrorError as exc:
            got = [Report(f"{cfg.target}.n{p.n}", cfg.target, float("inf"), 0.0, False,
                          details={"error": type(exc).__name__, "message": str(exc)})]
        for r in got:
            r.details["params"] = label
        reports += got
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    return reports, code


# --- rendering -----------------------------------------------------------------------


CLAIM_COLUMNS = ("claim_id", "paper_ref", "residual", "tolerance", "pass", "runtime_ms")


def _claim_rows(reports: list[Report]) -> list[dict]:
    return [{k: r.to_dict()[k] for k in CLAIM_COLUMNS} for r in reports]


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, default=as_float) + "\n"
    rows = doc.get("claims") if "claims" in doc else doc.get("rows", [])
    if fmt == "csv":
        buf = io.StringIO()
        if rows:
            cols = list(dict.fromkeys(k for r in rows for k in r))
            w = csv.DictWriter(buf, fieldnames=cols)
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue()
    # markdown
    lines = []
    if "summary" in doc:
        s = doc["summary"]
        lines.append(f"**{s['passed']} passed, {s['failed']} failed**\n")
    if "error" in doc:
        lines.append(f"**error** `{doc['error']['type']}`: {doc['error']['message']}\n")
    if rows:
        cols = list(dict.fromkeys(k for r in rows for k in r))
        lines.append("| " + " | ".join(cols) + " |")
        lines.append("|" + "---|" * len(cols))
        for r in rows:
            lines.append("| " + " | ".join(_cell(r.get(c, "")) for c in cols) + " |")
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v).replace("|", "\\|")


def emit(doc: dict, cfg: RunConfig | None, fmt: str):
    text = render(doc, fmt)
    if cfg is not None and cfg.output:
        write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    cache = SeriesCache(enabled=not cfg.no_cache)
    fmt = cfg.resolved_format()
    try:
        if cfg.command == "compute":
            rows, code = run_compute(cfg, cache)
            doc = {"config": cfg.to_dict(), "rows": rows}
        else:
            reports, code = run_verify(cfg, cache)
            passed = sum(r.passed for r in reports)
            doc = {
                "config": cfg.to_dict(),
                "claims": [r.to_dict() for r in reports],
                "summary": {"passed": passed, "failed": len(reports) - passed},
            }
            if fmt != "json":
                doc = {**doc, "claims": _claim_rows(reports)}
    except ParameterError as exc:
        doc = {"config": cfg.to_dict(),
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        emit(doc, cfg, fmt)
        return EXIT_CONFIG
    doc["cache"] = {"hits": cache.hits, "misses": cache.misses}
    emit(doc, cfg, fmt)
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = load_config(argv)
    except ParameterError as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stderr.write(json.dumps(err) + "\n")
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
