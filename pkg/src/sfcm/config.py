"""Clustering configuration and its plain-text serialization.

A config file holds one ``key = value`` pair per line with ``#``
comments. Recognized keys: c, m, p, q, window_radius, epsilon,
max_iter, init, spatial_variant, intensity_levels, seed. Unknown keys
are an error. The ``init`` value is ``percentile``, ``kmeans-like``,
or ``fixed:<v1>,<v2>,...``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
import os

from .errors import ConfigError

INIT_METHODS = ("percentile", "kmeans-like")
SPATIAL_VARIANTS = ("none", "neighbor", "intensity")


@dataclass(frozen=True)
class SfcmConfig:
    """All tunables of one clustering run.

    ``init`` is either an initialization method name or a tuple of fixed
    starting centers. ``seed`` feeds any stochastic step; the clustering
    loop itself is deterministic, so it matters only to callers that
    bundle noise generation with a run.
    """

    c: int = 2
    m: float = 2.0
    p: float = 1.0
    q: float = 1.0
    window_radius: int = 1
    epsilon: float = 1e-5
    max_iter: int = 100
    init: str | tuple[float, ...] = "percentile"
    spatial_variant: str = "none"
    intensity_levels: int = 256
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "init", _normalize_init(self.init))
        if self.c < 2:
            raise ConfigError(f"c must be >= 2, got {self.c}")
        if not self.m > 1:
            raise ConfigError(f"m must be > 1, got {self.m}")
        if self.p < 0 or self.q < 0:
            raise ConfigError(f"p and q must be >= 0, got p={self.p}, q={self.q}")
        if self.p + self.q <= 0:
            raise ConfigError("p + q must be > 0")
        if self.window_radius < 1:
            raise ConfigError(f"window_radius must be >= 1, got {self.window_radius}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.spatial_variant not in SPATIAL_VARIANTS:
            raise ConfigError(
                f"spatial_variant must be one of {SPATIAL_VARIANTS}, got {self.spatial_variant!r}"
            )
        if self.intensity_levels < 2:
            raise ConfigError(f"intensity_levels must be >= 2, got {self.intensity_levels}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if isinstance(self.init, tuple) and len(self.init) != self.c:
            raise ConfigError(
                f"fixed init supplies {len(self.init)} centers but c={self.c}"
            )

    def with_overrides(self, **kwargs) -> "SfcmConfig":
        return replace(self, **kwargs)


def _normalize_init(init) -> str | tuple[float, ...]:
    if isinstance(init, str):
        value = init.strip()
        if value == "kmeans":
            value = "kmeans-like"
        if value in INIT_METHODS:
            return value
        if value.startswith("fixed:"):
            parts = value[len("fixed:"):].split(",")
            try:
                return tuple(float(x) for x in parts)
            except ValueError:
                raise ConfigError(f"cannot parse fixed centers from {init!r}") from None
        raise ConfigError(
            f"init must be one of {INIT_METHODS} or fixed:<v1>,<v2>,..., got {init!r}"
        )
    try:
        return tuple(float(x) for x in init)
    except TypeError:
        raise ConfigError(f"init must be a method name or a sequence of centers, got {init!r}") from None


_INT_KEYS = {"c", "window_radius", "max_iter", "intensity_levels", "seed"}
_FLOAT_KEYS = {"m", "p", "q", "epsilon"}
_ALL_KEYS = {f.name for f in fields(SfcmConfig)}


def load_config(path) -> SfcmConfig:
    """Parse a key=value config file into an :class:`SfcmConfig`."""
    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc})") from exc
    return parse_config(text, source=path)


def parse_config(text: str, source: str = "<config>") -> SfcmConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: cannot parse value for {key!r}: {value!r}") from None
    return SfcmConfig(**values)


def save_config(cfg: SfcmConfig, path) -> None:
    with open(os.fspath(path), "w", encoding="utf-8") as f:
        f.write(config_to_text(cfg))


def config_to_text(cfg: SfcmConfig) -> str:
    init = cfg.init
    if isinstance(init, tuple):
        init = "fixed:" + ",".join(repr(v) for v in init)
    lines = [
        f"c = {cfg.c}",
        f"m = {cfg.m!r}",
        f"p = {cfg.p!r}",
        f"q = {cfg.q!r}",
        f"window_radius = {cfg.window_radius}",
        f"epsilon = {cfg.epsilon!r}",
        f"max_iter = {cfg.max_iter}",
        f"init = {init}",
        f"spatial_variant = {cfg.spatial_variant}",
        f"intensity_levels = {cfg.intensity_levels}",
        f"seed = {cfg.seed}",
    ]
    return "\n".join(lines) + "\n"
