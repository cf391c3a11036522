"""Scenario configuration: INI-style text in, runnable model out.

Sections and keys are strict: unknown names are errors, and validation
reports every problem at once rather than stopping at the first.  The
exact schema is documented in the README; ``serialize`` writes back the
resolved canonical form (parse -> serialize -> parse is idempotent).
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .boundary import BoundaryKind, BoundarySpec
from .errors import ConfigurationError
from .state import (
    Bathymetry,
    FrictionLaw,
    Grid1D,
    LayerPartition,
    PhysParams,
    SimState,
)
from .stepper import Model, StepConfig

_BED_KINDS = ("flat", "bump", "table")
_INITIAL_KINDS = ("constant", "lake_at_rest", "dam_break", "table")

_SCHEMA = {
    "grid": {"x_min", "x_max", "cells", "bed", "bed_level", "bed_height",
             "bed_center", "bed_half_width", "bed_table"},
    "layers": {"count", "fractions"},
    "physics": {"gravity", "viscosity", "friction", "k_l", "k_t",
                "strickler_k", "wind_stress"},
    "boundary": {"left", "left_value", "right", "right_value"},
    "initial": {"type", "height", "velocity", "surface", "position",
                "left_height", "right_height", "table"},
    "output": {"t_end", "snapshot_interval", "order", "cfl_safety",
               "max_dt", "dry_threshold"},
}


@dataclass
class Scenario:
    """Fully resolved run description."""

    x_min: float
    x_max: float
    cells: int
    bed: str = "flat"
    bed_level: float = 0.0
    bed_height: float = 0.2
    bed_center: float = 10.0
    bed_half_width: float = 2.0
    bed_table: Optional[np.ndarray] = None          # (2, K) rows x, z
    fractions: np.ndarray = field(default_factory=lambda: np.array([1.0]))
    gravity: float = 9.81
    viscosity: float = 0.0
    friction: FrictionLaw = FrictionLaw.NONE
    k_l: float = 0.0
    k_t: float = 0.0
    strickler_k: float = 0.0
    wind_stress: float = 0.0
    left: BoundaryKind = BoundaryKind.WALL
    left_value: float = 0.0
    right: BoundaryKind = BoundaryKind.WALL
    right_value: float = 0.0
    initial: str = "constant"
    height: float = 1.0
    velocity: float = 0.0
    surface: float = 1.0
    position: float = 0.0
    left_height: float = 1.0
    right_height: float = 0.0
    initial_table: Optional[np.ndarray] = None      # (2, K) rows x, H
    t_end: float = 0.0
    snapshot_interval: float = 0.0
    order: int = 1
    cfl_safety: float = 0.9
    max_dt: float = np.inf
    dry_threshold: float = 1e-10

    # -- construction of runtime objects ---------------------------------

    def build_grid(self) -> Grid1D:
        return Grid1D.uniform(self.x_min, self.x_max, self.cells)

    def build_bathymetry(self, grid: Grid1D) -> Bathymetry:
        if self.bed == "flat":
            z = np.full(grid.n_cells, self.bed_level)
        elif self.bed == "bump":
            shape = 1.0 - ((grid.x - self.bed_center) / self.bed_half_width) ** 2
            z = self.bed_level + self.bed_height * np.maximum(0.0, shape)
        else:
            z = self.bed_level + np.interp(grid.x, self.bed_table[0],
                                           self.bed_table[1])
        return Bathymetry(z=z)

    def build_model(self) -> Model:
        grid = self.build_grid()
        return Model(
            grid=grid,
            bathy=self.build_bathymetry(grid),
            part=LayerPartition(self.fractions.copy()),
            phys=PhysParams(
                gravity=self.gravity,
                viscosity=self.viscosity,
                friction=self.friction,
                k_l=self.k_l,
                k_t=self.k_t,
                strickler_k=self.strickler_k,
                wind_stress=self.wind_stress,
            ),
            bc=BoundarySpec(left=self.left, right=self.right,
                            left_value=self.left_value,
                            right_value=self.right_value),
            config=StepConfig(cfl_safety=self.cfl_safety, order=self.order,
                              dry_threshold=self.dry_threshold,
                              max_dt=self.max_dt),
        )

    def build_initial_state(self, model: Model) -> SimState:
        x = model.grid.x
        zb = model.bathy.z
        if self.initial == "constant":
            H = np.full(x.size, self.height)
            u = self.velocity
        elif self.initial == "lake_at_rest":
            H = lake_at_rest_heights(zb, self.surface)
            u = 0.0
        elif self.initial == "dam_break":
            H = np.where(x < self.position, self.left_height, self.right_height)
            u = self.velocity
        else:
            H = np.interp(x, self.initial_table[0], self.initial_table[1])
            u = self.velocity
        return SimState.from_velocity(H, u, model.part)

    def build(self):
        model = self.build_model()
        return model, self.build_initial_state(model)

    # -- canonical text form ---------------------------------------------

    def serialize(self) -> str:
        def fmt(v):
            if isinstance(v, float):
                return repr(v)
            return str(v)

        def table(arr):
            return ", ".join(f"{repr(float(a))}:{repr(float(b))}"
                             for a, b in zip(arr[0], arr[1]))

        lines = ["[grid]"]
        for key in ("x_min", "x_max", "cells"):
            lines.append(f"{key} = {fmt(getattr(self, key))}")
        lines.append(f"bed = {self.bed}")
        lines.append(f"bed_level = {fmt(self.bed_level)}")
        if self.bed == "bump":
            for key in ("bed_height", "bed_center", "bed_half_width"):
                lines.append(f"{key} = {fmt(getattr(self, key))}")
        if self.bed == "table":
            lines.append(f"bed_table = {table(self.bed_table)}")
        lines.append("")
        lines.append("[layers]")
        lines.append("fractions = " + ", ".join(repr(float(f))
                                                for f in self.fractions))
        lines.append("")
        lines.append("[physics]")
        lines.append(f"gravity = {fmt(self.gravity)}")
        lines.append(f"viscosity = {fmt(self.viscosity)}")
        lines.append(f"friction = {self.friction.value}")
        for key in ("k_l", "k_t", "strickler_k", "wind_stress"):
            lines.append(f"{key} = {fmt(getattr(self, key))}")
        lines.append("")
        lines.append("[boundary]")
        lines.append(f"left = {self.left.value}")
        lines.append(f"left_value = {fmt(self.left_value)}")
        lines.append(f"right = {self.right.value}")
        lines.append(f"right_value = {fmt(self.right_value)}")
        lines.append("")
        lines.append("[initial]")
        lines.append(f"type = {self.initial}")
        if self.initial == "constant":
            lines.append(f"height = {fmt(self.height)}")
            lines.append(f"velocity = {fmt(self.velocity)}")
        elif self.initial == "lake_at_rest":
            lines.append(f"surface = {fmt(self.surface)}")
        elif self.initial == "dam_break":
            lines.append(f"position = {fmt(self.position)}")
            lines.append(f"left_height = {fmt(self.left_height)}")
            lines.append(f"right_height = {fmt(self.right_height)}")
            lines.append(f"velocity = {fmt(self.velocity)}")
        else:
            lines.append(f"table = {table(self.initial_table)}")
            lines.append(f"velocity = {fmt(self.velocity)}")
        lines.append("")
        lines.append("[output]")
        for key in ("t_end", "snapshot_interval", "order", "cfl_safety",
                    "max_dt", "dry_threshold"):
            lines.append(f"{key} = {fmt(getattr(self, key))}")
        lines.append("")
        return "\n".join(lines)


def lake_at_rest_heights(zb, surface):
    """Heights of a flat free surface, exact at the float level.

    After the plain ``max(0, C - z_b)`` the discrete surface ``H + z_b``
    can sit one ulp off ``C``; the correction loop removes that so the
    well-balanced scheme sees a bitwise-uniform surface.
    """
    zb = np.asarray(zb, dtype=float)
    H = np.maximum(0.0, surface - zb)
    for _ in range(3):
        wet = H > 0.0
        delta = np.where(wet, (H + zb) - surface, 0.0)
        if not np.any(delta != 0.0):
            break
        H = np.where(wet, np.maximum(0.0, H - delta), H)
    return H


class _Reader:
    """Typed, error-collecting access to the parsed INI content."""

    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser
        self.errors = []

    def error(self, msg):
        self.errors.append(msg)

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def raw(self, section, key):
        return self.parser.get(section, key).strip()

    def get_float(self, section, key, default=None, required=False):
        if not self.has(section, key):
            if required:
                self.error(f"[{section}] missing required key '{key}'")
            return default
        text = self.raw(section, key)
        try:
            return float(text)
        except ValueError:
            self.error(f"[{section}] {key}: not a number: {text!r}")
            return default

    def get_int(self, section, key, default=None, required=False):
        if not self.has(section, key):
            if required:
                self.error(f"[{section}] missing required key '{key}'")
            return default
        text = self.raw(section, key)
        try:
            return int(text)
        except ValueError:
            self.error(f"[{section}] {key}: not an integer: {text!r}")
            return default

    def get_choice(self, section, key, choices, default=None, required=False):
        if not self.has(section, key):
            if required:
                self.error(f"[{section}] missing required key '{key}'")
            return default
        text = self.raw(section, key).lower()
        if text not in choices:
            self.error(f"[{section}] {key}: expected one of "
                       f"{sorted(choices)}, got {text!r}")
            return default
        return text

    def get_pairs(self, section, key):
        """Parse 'x0:y0, x1:y1, ...' into a (2, K) array."""
        text = self.raw(section, key)
        xs, ys = [], []
        try:
            for item in text.split(","):
                a, b = item.split(":")
                xs.append(float(a))
                ys.append(float(b))
        except ValueError:
            self.error(f"[{section}] {key}: expected 'x:y' pairs, got {text!r}")
            return None
        if len(xs) < 2:
            self.error(f"[{section}] {key}: needs at least two points")
            return None
        if np.any(np.diff(xs) <= 0.0):
            self.error(f"[{section}] {key}: x values must be increasing")
            return None
        return np.array([xs, ys])


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario; raises ConfigurationError with the
    full list of problems on any failure."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigurationError([f"config syntax: {exc}"]) from exc

    r = _Reader(parser)
    for section in parser.sections():
        if section not in _SCHEMA:
            r.error(f"unknown section [{section}]")
        else:
            for key in parser.options(section):
                if key not in _SCHEMA[section]:
                    r.error(f"[{section}] unknown key '{key}'")
    for section in ("grid", "boundary", "initial", "output"):
        if not parser.has_section(section):
            r.error(f"missing section [{section}]")
    if r.errors:
        raise ConfigurationError(r.errors)

    sc = Scenario(x_min=0.0, x_max=1.0, cells=1)

    sc.x_min = r.get_float("grid", "x_min", required=True, default=0.0)
    sc.x_max = r.get_float("grid", "x_max", required=True, default=1.0)
    sc.cells = r.get_int("grid", "cells", required=True, default=1)
    sc.bed = r.get_choice("grid", "bed", _BED_KINDS, default="flat")
    sc.bed_level = r.get_float("grid", "bed_level", default=0.0)
    if sc.bed == "bump":
        sc.bed_height = r.get_float("grid", "bed_height", required=True,
                                    default=0.2)
        sc.bed_center = r.get_float("grid", "bed_center", required=True,
                                    default=10.0)
        sc.bed_half_width = r.get_float("grid", "bed_half_width",
                                        required=True, default=2.0)
        if sc.bed_half_width is not None and sc.bed_half_width <= 0.0:
            r.error("[grid] bed_half_width must be positive")
    if sc.bed == "table":
        if r.has("grid", "bed_table"):
            sc.bed_table = r.get_pairs("grid", "bed_table")
        else:
            r.error("[grid] bed = table requires bed_table")
    if sc.cells is not None and sc.cells < 1:
        r.error("[grid] cells must be >= 1")
    if (sc.x_min is not None and sc.x_max is not None
            and not sc.x_max > sc.x_min):
        r.error("[grid] x_max must exceed x_min")

    count = r.get_int("layers", "count") if parser.has_section("layers") else None
    fractions_text = (r.raw("layers", "fractions")
                      if parser.has_section("layers")
                      and r.has("layers", "fractions") else None)
    if fractions_text is None or fractions_text.lower() == "uniform":
        n = count if count is not None else 1
        if n < 1:
            r.error("[layers] count must be >= 1")
        else:
            sc.fractions = np.full(n, 1.0 / n)
    else:
        try:
            fr = np.array([float(v) for v in fractions_text.split(",")])
        except ValueError:
            r.error(f"[layers] fractions: not a number list: {fractions_text!r}")
            fr = None
        if fr is not None:
            if count is not None and count != fr.size:
                r.error(f"[layers] count = {count} does not match "
                        f"{fr.size} fractions")
            if np.any(fr <= 0.0):
                r.error("[layers] fractions must be strictly positive")
            elif abs(float(np.sum(fr)) - 1.0) > 1e-14:
                r.error(f"[layers] fractions must sum to 1, "
                        f"got {float(np.sum(fr))!r}")
            else:
                sc.fractions = fr

    sc.gravity = r.get_float("physics", "gravity", default=9.81)
    sc.viscosity = r.get_float("physics", "viscosity", default=0.0)
    law = r.get_choice("physics", "friction",
                       {f.value for f in FrictionLaw}, default="none")
    sc.friction = FrictionLaw(law)
    sc.k_l = r.get_float("physics", "k_l", default=0.0)
    sc.k_t = r.get_float("physics", "k_t", default=0.0)
    sc.strickler_k = r.get_float("physics", "strickler_k", default=0.0)
    sc.wind_stress = r.get_float("physics", "wind_stress", default=0.0)
    if sc.gravity is not None and sc.gravity <= 0.0:
        r.error("[physics] gravity must be positive")
    if sc.viscosity is not None and sc.viscosity < 0.0:
        r.error("[physics] viscosity must be non-negative")
    if sc.friction is FrictionLaw.STRICKLER and (sc.strickler_k or 0.0) <= 0.0:
        r.error("[physics] strickler friction requires strickler_k > 0")

    kinds = {k.value for k in BoundaryKind}
    left = r.get_choice("boundary", "left", kinds, required=True, default="wall")
    right = r.get_choice("boundary", "right", kinds, required=True, default="wall")
    sc.left = BoundaryKind(left)
    sc.right = BoundaryKind(right)
    sc.left_value = r.get_float("boundary", "left_value", default=0.0)
    sc.right_value = r.get_float("boundary", "right_value", default=0.0)
    for side, kind in (("left", sc.left), ("right", sc.right)):
        if kind in (BoundaryKind.DISCHARGE, BoundaryKind.HEIGHT):
            if not r.has("boundary", f"{side}_value"):
                r.error(f"[boundary] {side} = {kind.value} requires "
                        f"{side}_value")
    if (sc.left is BoundaryKind.PERIODIC) != (sc.right is BoundaryKind.PERIODIC):
        r.error("[boundary] periodic must be set on both ends")

    sc.initial = r.get_choice("initial", "type", _INITIAL_KINDS,
                              required=True, default="constant")
    sc.velocity = r.get_float("initial", "velocity", default=0.0)
    if sc.initial == "constant":
        sc.height = r.get_float("initial", "height", required=True, default=1.0)
        if sc.height is not None and sc.height < 0.0:
            r.error("[initial] height must be non-negative")
    elif sc.initial == "lake_at_rest":
        sc.surface = r.get_float("initial", "surface", required=True,
                                 default=1.0)
    elif sc.initial == "dam_break":
        sc.position = r.get_float("initial", "position", required=True,
                                  default=0.0)
        sc.left_height = r.get_float("initial", "left_height", required=True,
                                     default=1.0)
        sc.right_height = r.get_float("initial", "right_height",
                                      required=True, default=0.0)
        if (sc.left_height or 0.0) < 0.0 or (sc.right_height or 0.0) < 0.0:
            r.error("[initial] dam break heights must be non-negative")
    else:
        if r.has("initial", "table"):
            sc.initial_table = r.get_pairs("initial", "table")
        else:
            r.error("[initial] type = table requires table")

    sc.t_end = r.get_float("output", "t_end", required=True, default=0.0)
    sc.snapshot_interval = r.get_float("output", "snapshot_interval",
                                       default=0.0)
    sc.order = r.get_int("output", "order", default=1)
    sc.cfl_safety = r.get_float("output", "cfl_safety", default=0.9)
    sc.max_dt = r.get_float("output", "max_dt", default=np.inf)
    sc.dry_threshold = r.get_float("output", "dry_threshold", default=1e-10)
    if sc.t_end is not None and sc.t_end < 0.0:
        r.error("[output] t_end must be non-negative")
    if sc.order not in (1, 2):
        r.error("[output] order must be 1 or 2")
    if sc.cfl_safety is not None and not 0.0 < sc.cfl_safety <= 1.0:
        r.error("[output] cfl_safety must be in (0, 1]")

    if r.errors:
        raise ConfigurationError(r.errors)
    return sc


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())
