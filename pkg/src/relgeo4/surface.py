"""Surface spec files: parsing, validation and grid sampling.

A spec file is line oriented::

    [surface]
    name = "sphere-r2"
    x1 = "2*cos(u1)*cos(u2)*cos(u3)"
    ...
    u1 = [0.2, 1.2]
    [normalization]
    mode = "euclidean"   # or "equiaffine", or "custom" together with q = "<expr>"
    orientation = "auto" # or 1 / -1
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from .errors import ExpressionSyntaxError, FormatError, RelGeoError, UnknownIdentifier, ValidationError
from .expr import Expression, eval_jet, parse
from .frame import NormalizationMode, auto_orientation, build_frame
from .jets import DEFAULT_ORDER, VecJet

DEFAULT_GRID = (7, 7, 7)

_SECTIONS = {
    "surface": {"name", "x1", "x2", "x3", "x4", "u1", "u2", "u3", "grid", "orientation"},
    "normalization": {"mode", "q", "orientation"},
}


@dataclass(frozen=True)
class SurfaceSpec:
    name: str
    x_sources: Tuple[str, str, str, str]
    x: Tuple[Expression, Expression, Expression, Expression]
    domain: Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]]
    normalization: NormalizationMode
    orientation: Union[int, str] = "auto"
    grid: Tuple[int, int, int] = DEFAULT_GRID

    @classmethod
    def from_sources(cls, name, x_sources, domain, normalization=None, orientation="auto", grid=DEFAULT_GRID):
        x_sources = tuple(x_sources)
        return cls(
            name=name,
            x_sources=x_sources,
            x=tuple(parse(s) for s in x_sources),
            domain=tuple((float(a), float(b)) for a, b in domain),
            normalization=normalization or NormalizationMode.euclidean(),
            orientation=orientation,
            grid=tuple(int(n) for n in grid),
        )

    def with_grid(self, grid):
        return replace(self, grid=tuple(int(n) for n in grid))

    def with_orientation(self, orientation):
        return replace(self, orientation=orientation)

    def grid_points(self, grid=None):
        """Cell-centred sample points, shape ``(3, N)`` in C order over (u1, u2, u3)."""
        grid = self.grid if grid is None else grid
        axes = [a + (np.arange(n) + 0.5) * (b - a) / n for (a, b), n in zip(self.domain, grid)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh])

    def center(self):
        return np.array([(a + b) / 2 for a, b in self.domain])

    def jets(self, points, order=DEFAULT_ORDER):
        return VecJet(eval_jet(e, points, order) for e in self.x)

    def resolve_orientation(self):
        if self.orientation == "auto":
            return auto_orientation(self.jets(self.center()))
        return int(self.orientation)

    def frame(self, order=DEFAULT_ORDER, points=None):
        points = self.grid_points() if points is None else points
        return build_frame(self.jets(points, order), self.normalization, self.resolve_orientation())

    def parallel_order(self):
        """Jet order needed to rebuild the frame of a parallel hypersurface."""
        return DEFAULT_ORDER + 1 if self.normalization.kind == "equiaffine" else DEFAULT_ORDER

    def describe(self):
        return {
            "name": self.name,
            "x": list(self.x_sources),
            "domain": [list(d) for d in self.domain],
            "normalization": self.normalization.describe(),
            "orientation": self.orientation,
        }


def _strip_comment(line):
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).strip()


def _value(raw, key, lineno):
    raw = raw.strip()
    if not raw:
        raise FormatError("missing value", key, lineno)
    if raw.startswith('"'):
        if len(raw) < 2 or not raw.endswith('"') or '"' in raw[1:-1]:
            raise FormatError("malformed quoted string", key, lineno)
        return raw[1:-1]
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise FormatError("unterminated list", key, lineno)
        try:
            return [float(v) for v in raw[1:-1].split(",") if v.strip()]
        except ValueError:
            raise FormatError("list entries must be numbers", key, lineno) from None
    try:
        return float(raw) if any(c in raw for c in ".eE") else int(raw)
    except ValueError:
        return raw


def parse_spec_text(text):
    """Parse spec-file text into ``{section: {key: (value, line)}}``."""
    sections = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line)
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise FormatError("malformed section header", line=lineno)
            current = line[1:-1].strip()
            if current not in _SECTIONS:
                raise FormatError(f"unknown section [{current}]", line=lineno)
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise FormatError("expected 'key = value'", line=lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if current is None:
            raise FormatError("key outside of any section", key, lineno)
        if key not in _SECTIONS[current]:
            raise FormatError(f"unknown key in [{current}]", key, lineno)
        if key in sections[current]:
            raise FormatError("duplicate key", key, lineno)
        sections[current][key] = (_value(raw, key, lineno), lineno)
    return sections


def _grid_value(value, key, line):
    if isinstance(value, str):
        parts = value.lower().split("x")
        try:
            value = [int(p) for p in parts]
        except ValueError:
            raise FormatError("grid must look like 7x7x7", key, line) from None
    if isinstance(value, int):
        value = [value] * 3
    if len(value) != 3 or any(int(v) != v or v < 1 for v in value):
        raise FormatError("grid needs three positive integers", key, line)
    return tuple(int(v) for v in value)


def parse_grid(text):
    return _grid_value(text, "grid", None)


def spec_from_text(text, source="<string>"):
    """Build a SurfaceSpec from spec-file text (no geometric validation)."""
    sections = parse_spec_text(text)
    surf = sections.get("surface")
    if surf is None:
        raise FormatError("missing [surface] section")
    norm = sections.get("normalization", {})

    def need(sec, key, kind):
        if key not in sec:
            raise FormatError("missing key", key)
        value, line = sec[key]
        if not isinstance(value, kind):
            raise FormatError(f"expected {kind.__name__ if isinstance(kind, type) else 'value'}", key, line)
        return value, line

    name = surf.get("name", (Path(source).stem, None))[0]
    x_sources, x_exprs = [], []
    for k in ("x1", "x2", "x3", "x4"):
        src, line = need(surf, k, str)
        try:
            x_exprs.append(parse(src))
        except (ExpressionSyntaxError, UnknownIdentifier) as exc:
            raise FormatError(f"bad expression: {exc}", k, line) from exc
        x_sources.append(src)
    domain = []
    for k in ("u1", "u2", "u3"):
        iv, line = need(surf, k, list)
        if len(iv) != 2 or not iv[0] < iv[1]:
            raise FormatError("interval must be [a, b] with a < b", k, line)
        domain.append((iv[0], iv[1]))

    mode_name = norm.get("mode", ("euclidean", None))
    if mode_name[0] == "euclidean":
        mode = NormalizationMode.euclidean()
    elif mode_name[0] == "equiaffine":
        mode = NormalizationMode.equiaffine()
    elif mode_name[0] == "custom":
        q_src, line = need(norm, "q", str)
        try:
            mode = NormalizationMode("custom", parse(q_src), q_src)
        except (ExpressionSyntaxError, UnknownIdentifier) as exc:
            raise FormatError(f"bad expression: {exc}", "q", line) from exc
    else:
        raise FormatError(f"unknown mode {mode_name[0]!r}", "mode", mode_name[1])
    if "q" in norm and mode.kind != "custom":
        raise FormatError("q is only allowed with mode = \"custom\"", "q", norm["q"][1])

    if "orientation" in norm and "orientation" in surf:
        raise FormatError("orientation given twice", "orientation", norm["orientation"][1])
    orientation, line = norm.get("orientation", surf.get("orientation", ("auto", None)))
    if orientation not in ("auto", 1, -1):
        raise FormatError("orientation must be \"auto\", 1 or -1", "orientation", line)

    grid = DEFAULT_GRID
    if "grid" in surf:
        value, line = surf["grid"]
        grid = _grid_value(value, "grid", line)

    return SurfaceSpec(name, tuple(x_sources), tuple(x_exprs), tuple(domain), mode, orientation, grid)


def validate(spec, grid=None):
    """Run the immersion, Gauss-curvature and support-function checks on the grid."""
    points = spec.grid_points(grid)
    try:
        spec.resolve_orientation()
        spec.frame(points=points)
    except RelGeoError as exc:
        raise ValidationError(type(exc).__name__, exc.point, exc) from exc
    return spec


def load_spec(path, grid=None, check=True):
    """Read, parse and (by default) validate a surface spec file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    spec = spec_from_text(text, str(path))
    if grid is not None:
        spec = spec.with_grid(grid)
    if check:
        validate(spec)
    return spec
