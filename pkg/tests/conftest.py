from pathlib import Path

import pytest

from relgeo4.frame import NormalizationMode
from relgeo4.surface import SurfaceSpec

SURFACES = Path(__file__).resolve().parent.parent / "surfaces"

CHART = ((0.2, 1.2), (-0.5, 0.5), (-0.5, 0.5))


def sphere(r=1.0, mode=None, grid=(5, 5, 5), orientation="auto"):
    r = repr(float(r))
    return SurfaceSpec.from_sources(
        f"sphere-r{r}",
        [f"{r}*cos(u1)*cos(u2)*cos(u3)", f"{r}*sin(u1)*cos(u2)*cos(u3)", f"{r}*sin(u2)*cos(u3)", f"{r}*sin(u3)"],
        CHART, mode, orientation, grid,
    )


def ellipsoid(axes=(1.0, 1.2, 1.5, 2.0), mode=None, grid=(5, 5, 5), orientation="auto"):
    a, b, c, d = (repr(float(v)) for v in axes)
    return SurfaceSpec.from_sources(
        "ellipsoid",
        [f"{a}*cos(u1)*cos(u2)*cos(u3)", f"{b}*sin(u1)*cos(u2)*cos(u3)", f"{c}*sin(u2)*cos(u3)", f"{d}*sin(u3)"],
        CHART, mode, orientation, grid,
    )


MODES = {
    "euclidean": NormalizationMode.euclidean(),
    "equiaffine": NormalizationMode.equiaffine(),
    "custom": NormalizationMode.custom("1 + 0.1*sin(u1)"),
}


@pytest.fixture
def surfaces_dir():
    return SURFACES
