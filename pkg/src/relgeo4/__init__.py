"""Relative differential geometry of hypersurfaces in R^4.

Truncated Taylor jets drive the frame construction; on top of that sit
relatively parallel hypersurfaces and the closed-form Bonnet-type distances.
"""

from .bonnet import BonnetCandidate, verify_bonnet
from .errors import *  # noqa: F401,F403
from .expr import eval_jet, evaluate, parse
from .frame import CurvatureSet, NormalizationMode, RelativeFrame, build_frame, curvature_functions
from .jets import Jet, VecJet
from .parallel import a_of_mu, recompute_star, star_curvatures
from .surface import SurfaceSpec, load_spec

__version__ = "0.1.0"
