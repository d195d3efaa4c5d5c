"""Run configuration as an INI document.

Sections ``[meta]``, ``[dipole]``, ``[waveguide]``, ``[circuit]`` and ``[sweep]``
mirror the dataclasses field by field. Unknown sections or keys are
rejected; every section is validated on load. Grids accept either a comma
list or ``linspace(start, stop, num)``; dumps always write explicit lists
with 17 significant digits, so ``load(dump(cfg)) == cfg``.
"""
from __future__ import annotations

import configparser
import dataclasses
import io
import re
from dataclasses import dataclass, field

import numpy as np

from .circuit import CircuitSpec
from .errors import ConfigError
from .matter import DipoleSpec
from .models import WaveguideSpec
from .sweeps import SweepPlan

SCHEMA_VERSION = "1"

SECTIONS = {"dipole": DipoleSpec, "waveguide": WaveguideSpec, "circuit": CircuitSpec,
            "sweep": SweepPlan}

_LINSPACE = re.compile(r"^\s*linspace\(\s*([^,]+),\s*([^,]+),\s*([^,\)]+)\)\s*$")


@dataclass(frozen=True)
class RunConfig:
    dipole: DipoleSpec = field(default_factory=DipoleSpec)
    waveguide: WaveguideSpec = field(default_factory=WaveguideSpec)
    circuit: CircuitSpec = field(default_factory=CircuitSpec)
    sweep: SweepPlan = field(default_factory=SweepPlan)
    schema_version: str = SCHEMA_VERSION

    def validate(self):
        for name in SECTIONS:
            getattr(self, name).validate()
        return self


def parse_grid(text, key="grid"):
    text = text.strip()
    if not text:
        return ()
    m = _LINSPACE.match(text)
    try:
        if m:
            start, stop, num = float(m.group(1)), float(m.group(2)), int(m.group(3))
            return tuple(float(x) for x in np.linspace(start, stop, num))
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}: {exc}", key) from exc


def _parse(kind, text, key):
    try:
        if kind is bool:
            low = text.strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(f"not a boolean: {text!r}")
            return low in ("true", "yes", "1")
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind == "grid":
            return parse_grid(text, key)
        if kind == "names":
            return tuple(x.strip() for x in text.split(",") if x.strip())
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}", key) from exc


def _kind(cls, f):
    default = f.default if f.default is not dataclasses.MISSING else None
    if isinstance(default, tuple):
        return "names" if f.name == "columns" else "grid"
    if isinstance(default, bool):
        return bool
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return float
    return str


def _format(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    if isinstance(v, tuple):
        return ", ".join(_format(x) for x in v)
    return str(v)


def _build_section(name, cls, items):
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, text in items:
        if key not in fields:
            raise ConfigError(f"unknown key {name}.{key}", f"{name}.{key}")
        kwargs[key] = _parse(_kind(cls, fields[key]), text, f"{name}.{key}")
    try:
        obj = cls(**kwargs)
        obj.validate()
    except ConfigError as exc:
        raise ConfigError(f"{name}: {exc}", f"{name}.{exc.field}" if exc.field else name) from exc
    return obj


def loads(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="\0none")
    parser.optionxform = str  # keys are case sensitive (C_r, L_c, ...)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}", None) from exc
    unknown = set(parser.sections()) - set(SECTIONS) - {"meta"}
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}", sorted(unknown)[0])
    version = SCHEMA_VERSION
    if parser.has_section("meta"):
        meta = dict(parser.items("meta"))
        extra = set(meta) - {"schema_version"}
        if extra:
            key = sorted(extra)[0]
            raise ConfigError(f"unknown key meta.{key}", f"meta.{key}")
        version = meta.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}", "meta.schema_version")
    parts = {}
    for name, cls in SECTIONS.items():
        items = parser.items(name) if parser.has_section(name) else []
        parts[name] = _build_section(name, cls, items)
    return RunConfig(schema_version=version, **parts)


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", "config") from exc


def dumps(cfg: RunConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None, default_section="\0none")
    parser.optionxform = str
    parser["meta"] = {"schema_version": cfg.schema_version}
    for name in SECTIONS:
        obj = getattr(cfg, name)
        parser[name] = {f.name: _format(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def apply_override(cfg: RunConfig, key: str, value: str) -> RunConfig:
    """Set ``section.name`` from its text form, with the same checks as :func:`loads`."""
    section, _, name = key.partition(".")
    if section not in SECTIONS:
        raise ConfigError(f"unknown section {section!r}", key)
    obj = getattr(cfg, section)
    items = [(f.name, _format(getattr(obj, f.name))) for f in dataclasses.fields(obj) if f.name != name]
    new = _build_section(section, type(obj), items + [(name, value)])
    return dataclasses.replace(cfg, **{section: new})


def dump(cfg: RunConfig, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(cfg))
