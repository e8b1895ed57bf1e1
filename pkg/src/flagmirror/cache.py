"""On-disk cache of truncated series.

Entries are JSON files named by a hash of (recipe, parameter record, D, N,
backend). Exact coefficients are stored as "num/den" strings and mpmath
values as their raw binary tuples, so a hit is bit-identical to the series
that was stored.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .numerics import ParamSet
from .series import TruncatedSeries

ENV_VAR = "FLAGMIRROR_CACHE_DIR"

log = logging.getLogger(__name__)


def default_directory() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "flagmirror"


def _encode(x) -> list:
    if isinstance(x, Fraction):
        return ["q", f"{x.numerator}/{x.denominator}"]
    if hasattr(x, "_mpf_"):
        s, man, exp, bc = x._mpf_
        return ["mpf", s, hex(man), exp, bc]
    if hasattr(x, "_mpc_"):
        re, im = x._mpc_
        return ["mpc", [re[0], hex(re[1]), re[2], re[3]], [im[0], hex(im[1]), im[2], im[3]]]
    if isinstance(x, int):
        return ["q", f"{x}/1"]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _decode(v: list, params: ParamSet):
    kind = v[0]
    if kind == "q":
        return params.scalar(Fraction(v[1]))
    ctx = params.backend.ctx
    if kind == "mpf":
        return ctx.make_mpf((v[1], int(v[2], 16), v[3], v[4]))
    if kind == "mpc":
        re = (v[1][0], int(v[1][1], 16), v[1][2], v[1][3])
        im = (v[2][0], int(v[2][1], 16), v[2][2], v[2][3])
        return ctx.make_mpc((re, im))
    raise ValueError(f"unknown coefficient tag {kind!r}")


class SeriesCache:
    def __init__(self, directory: str | Path | None = None, enabled: bool = True):
        self.directory = Path(directory) if directory else default_directory()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(recipe: str, params: ParamSet, D: int) -> str:
        blob = json.dumps(
            {
                "recipe": recipe,
                "params": params.to_dict(),
                "D": D,
                "N": params.theta_terms,
                "backend": params.backend_name,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, recipe: str, params: ParamSet, D: int) -> TruncatedSeries | None:
        if not self.enabled:
            return None
        path = self._path(self.key(recipe, params, D))
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text())
            coeffs = {tuple(k): _decode(v, params) for k, v in data["coeffs"]}
            series = TruncatedSeries(int(data["nvars"]), int(data["D"]), coeffs, params.zero)
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            log.warning("discarding corrupt cache entry %s (%s)", path.name, exc)
            try:
                path.unlink()
            except OSError:
                pass
            return None
        return series

    def put(self, recipe: str, params: ParamSet, D: int, series: TruncatedSeries) -> None:
        if not self.enabled:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        data = {
            "recipe": recipe,
            "nvars": series.nvars,
            "D": series.D,
            "coeffs": [[list(k), _encode(v)] for k, v in series.items()],
        }
        write_atomic(self._path(self.key(recipe, params, D)), json.dumps(data))

    def fetch(self, recipe: str, params: ParamSet, D: int,
              compute: Callable[[], TruncatedSeries]) -> TruncatedSeries:
        hit = self.get(recipe, params, D)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        series = compute()
        self.put(recipe, params, D, series)
        return series


def write_atomic(path: str | Path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
