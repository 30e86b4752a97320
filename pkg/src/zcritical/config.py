"""INI run configuration with JSON-valued arrays.

Sections mirror the modules: ``[run]``, ``[geometry.<name>]``, ``[charge.<name>]``,
``[manifold]``, ``[bundle]``, ``[family]`` and ``[solver]``.  Every lookup that
fails raises :class:`ConfigError` naming the offending ``section.key``.
"""

from __future__ import annotations

import configparser
import json
from importlib import resources

from .charge import charge_from_terms, lookup_charge
from .errors import ConfigError
from .kgeom import CP1ProfileGeometry, TorusGeometry, random_correction, random_potential

DEFAULT_CONFIG = "default.ini"


def default_config_text():
    return resources.files("zcritical").joinpath("data", DEFAULT_CONFIG).read_text(encoding="utf-8")


class RunConfig:
    def __init__(self, parser, source="<default>"):
        self.parser = parser
        self.source = source
        if not parser.has_section("run"):
            raise ConfigError("missing section 'run'")
        self.seed = self.get_int("run", "seed")
        self.grid_override = None

    @classmethod
    def from_text(cls, text, source="<string>"):
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text, source=source)
        except configparser.Error as err:
            raise ConfigError(f"unreadable configuration {source}: {err}") from err
        return cls(parser, source)

    @classmethod
    def load(cls, path=None):
        if path is None:
            return cls.from_text(default_config_text(), "<default>")
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise ConfigError(f"cannot read configuration {path}: {err}") from err
        return cls.from_text(text, str(path))

    # typed access ---------------------------------------------------------------
    def _raw(self, section, key, default=None):
        if not self.parser.has_section(section):
            if default is not None:
                return default
            raise ConfigError(f"missing section '{section}' (needed for key '{section}.{key}')")
        if not self.parser.has_option(section, key):
            if default is not None:
                return default
            raise ConfigError(f"missing key '{section}.{key}'")
        return self.parser.get(section, key)

    def _convert(self, section, key, conv, default):
        raw = self._raw(section, key, default)
        if not isinstance(raw, str):
            return raw
        try:
            return conv(raw)
        except (ValueError, json.JSONDecodeError) as err:
            raise ConfigError(f"bad value for '{section}.{key}': {raw!r}") from err

    def get(self, section, key, default=None):
        return self._raw(section, key, default)

    def get_int(self, section, key, default=None):
        return self._convert(section, key, int, default)

    def get_float(self, section, key, default=None):
        return self._convert(section, key, float, default)

    def get_json(self, section, key, default=None):
        return self._convert(section, key, json.loads, default)

    # builders ----------------------------------------------------------------------
    def geometry(self, name, seed=None, flat=False):
        """Build the named geometry; ``seed`` selects the random potential sample."""
        sec = f"geometry.{name}"
        backend = self.get(sec, "backend")
        if backend == "torus":
            n = self.get_int(sec, "n")
            grid = self.grid_override or self.get_int(sec, "grid")
            areas = self.get_json(sec, "areas", [1.0] * n)
            kind = self.get(sec, "potential", "flat")
            phi = None
            if not flat and kind == "random":
                phi = random_potential(n, grid, self.seed if seed is None else seed,
                                       self.get_int(sec, "modes", 1), self.get_float(sec, "amplitude", 0.0005))
            elif not flat and kind not in ("flat", "zero"):
                raise ConfigError(f"unknown potential preset for '{sec}.potential': {kind!r}")
            return TorusGeometry(n, grid, phi, areas)
        if backend == "cp1":
            nodes = self.get_int(sec, "nodes", 64)
            kind = self.get(sec, "correction", "round")
            corr = None
            if not flat:
                if kind == "random":
                    corr = random_correction(self.seed if seed is None else seed,
                                             self.get_int(sec, "degree", 6), self.get_float(sec, "amplitude", 0.5))
                elif kind not in ("round", "zero"):
                    corr = self.get_json(sec, "correction")
            return CP1ProfileGeometry(nodes, corr)
        raise ConfigError(f"unknown backend for '{sec}.backend': {backend!r}")

    def charge(self, name):
        sec = f"charge.{name}"
        if not self.parser.has_section(sec):
            raise ConfigError(f"missing section '{sec}'")
        n = self.get_int(sec, "dimension")
        builtin = self.get(sec, "builtin", "")
        if builtin:
            try:
                return lookup_charge(builtin, n)
            except NameError as err:
                raise ConfigError(f"bad value for '{sec}.builtin': {err}") from err
        kind = self.get(sec, "kind")
        terms = self.get_json(sec, "terms")
        theta = self.get_json(sec, "theta", [1])
        try:
            return charge_from_terms(kind, n, terms, theta, name)
        except (ValueError, TypeError, IndexError) as err:
            raise ConfigError(f"bad value for '{sec}.terms': {err}") from err
