"""Flat ``key = value`` configuration files.

Keys carry dotted namespaces mirroring the dataclass fields they feed
(``mollifier.R``, ``gfun.alpha``, ...).  Arrays are comma lists.  Blank
lines and ``#`` comments are ignored.  Polynomials are coefficient lists
in powers of x, optionally with ``<key>.center``.

Example::

    mollifier.T = 2000
    mollifier.R = 1.3025
    mollifier.P2 = 0, -0.101269, 3.571698, -1.807283, -0.929884
    gfun.alpha = 0.5
"""

import hashlib
import re
from dataclasses import dataclass, field

from .errors import ConfigError
from .mollikit import RealPolynomial, feng_polynomials_default

__all__ = ["ConfigFile", "parse_config", "load_config", "mollifier_config", "KNOWN_KEYS"]

_FLOAT_KEYS = {
    "mollifier.T", "mollifier.theta", "mollifier.theta1", "mollifier.R", "mollifier.alpha",
    "mollifier.epsilon1", "gfun.alpha", "gfun.T", "shift.delta_sigma", "shift.T",
}
_INT_KEYS = {"mollifier.K", "mollifier.K0", "gfun.N_truncation", "gfun.K", "gfun.M", "shift.K_max"}
_STR_KEYS = {
    "mollifier.kind": ("feng", "identity"),
    "mollifier.g_kind": ("q1", "translated", "identity"),
    "mollifier.delta_mode": ("zero", "midpoint"),
}
_POLY_KEYS = {f"mollifier.P{j}" for j in range(1, 10)} | {"mollifier.Q_tilde", "mollifier.Q0"}
_CENTER_KEYS = {k + ".center" for k in _POLY_KEYS}
KNOWN_KEYS = frozenset(_FLOAT_KEYS | _INT_KEYS | set(_STR_KEYS) | _POLY_KEYS | _CENTER_KEYS)

_LINE = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$")


@dataclass(frozen=True)
class ConfigFile:
    """Typed values keyed by dotted name, plus a digest of the source text."""

    values: dict = field(default_factory=dict)
    digest: str = ""
    path: str = ""

    def get(self, key, default=None):
        return self.values.get(key, default)


def _parse_float(key, raw, lineno):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} expects a real number, got {raw!r}") from None


def parse_config(text, path=""):
    """Parse config text.

    Raises:
        ConfigError: malformed line, unknown or repeated key, or bad value;
            the message names the line.
    """
    values = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        m = _LINE.match(stripped)
        if not m:
            errors.append(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
            continue
        key, raw = m.group(1), m.group(2)
        if key not in KNOWN_KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            errors.append(f"line {lineno}: {key} given twice")
            continue
        try:
            if key in _FLOAT_KEYS or key in _CENTER_KEYS:
                values[key] = _parse_float(key, raw, lineno)
            elif key in _INT_KEYS:
                v = _parse_float(key, raw, lineno)
                if v != int(v):
                    raise ConfigError(f"line {lineno}: {key} expects an integer, got {raw!r}")
                values[key] = int(v)
            elif key in _STR_KEYS:
                if raw not in _STR_KEYS[key]:
                    raise ConfigError(f"line {lineno}: {key} must be one of {', '.join(_STR_KEYS[key])}")
                values[key] = raw
            else:
                parts = [p.strip() for p in raw.split(",")]
                if not parts or any(not p for p in parts):
                    raise ConfigError(f"line {lineno}: {key} expects a comma list of numbers")
                values[key] = tuple(_parse_float(key, p, lineno) for p in parts)
        except ConfigError as exc:
            errors.append(str(exc))
    if errors:
        raise ConfigError("; ".join(errors))
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return ConfigFile(values, digest, path)


def load_config(path):
    """Read and parse a config file; ``None`` gives the empty config."""
    if path is None:
        return parse_config("")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except UnicodeDecodeError:
        raise ConfigError(f"{path} is not UTF-8 text") from None
    return parse_config(text, path)


def _poly(cf, key):
    coeffs = cf.get(key)
    if coeffs is None:
        return None
    center = cf.get(key + ".center", 0.0)
    return RealPolynomial(coeffs, center)


def mollifier_config(cf, T=None):
    """MollifierConfig from the ``mollifier.*`` keys over the default
    parameter set; ``T`` overrides ``mollifier.T``.

    Raises:
        ConfigError: the resulting configuration violates a constraint.
    """
    base = feng_polynomials_default(T if T is not None else cf.get("mollifier.T", 2000.0))
    kw = {}
    for name in ("theta", "theta1", "R", "alpha", "K", "K0", "epsilon1", "kind", "g_kind", "delta_mode"):
        v = cf.get("mollifier." + name)
        if v is not None:
            kw[name] = v
    P = list(base.P)
    given = sorted(int(k[len("mollifier.P"):]) for k in cf.values if re.fullmatch(r"mollifier\.P\d", k))
    if given:
        if given != list(range(1, given[-1] + 1)):
            raise ConfigError("mollifier polynomials must be numbered P1..PI without gaps")
        # an explicit list replaces the default set
        P = [_poly(cf, f"mollifier.P{j}") for j in given]
    kw["P"] = tuple(P)
    for name in ("Q_tilde", "Q0"):
        p = _poly(cf, "mollifier." + name)
        if p is not None:
            kw[name] = p
    return base.with_(**kw).validate()
