"""Salient-feature constrained dynamic time warping."""

from ._kernels import BACKEND
from .banding import (BandMask, BandSpec, IntervalPartition, bridge_gaps, build_band,
                      candidate_point, derive_partition, parse_approach, symmetrize)
from .datasets import Dataset, generate_synthetic, load_ucr, save_ucr
from .descriptor import (FeatureParams, FeatureSet, SalientFeature, build_descriptor,
                         compute_gradients, extract_features)
from .dtw import WarpResult, banded_dtw, constraint_band, full_dtw, sdtw_distance
from .errors import BandInvariantError, DataError, InvalidInputError
from .matching import (ConsistentAlignment, MatchPair, align, find_dominant_pairs,
                       prune_inconsistent, score_pairs)
from .scale_space import (SalientPoint, ScaleSpacePyramid, build_pyramid,
                          detect_keypoints, gaussian_smooth)

__version__ = "0.1.0"
