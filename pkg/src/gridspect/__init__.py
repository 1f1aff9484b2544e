"""gridspect: structure detection, scoring and clutter removal for 2D
occupancy-grid maps via frequency-domain analysis."""

__version__ = "0.1.0"

from .errors import (
    AsymmetricMaskError,
    ConstantProfileError,
    GridspectError,
    MapFormatError,
    NonSquareMapError,
    NoSeparationError,
    NoStructureError,
    NotALocalMaximumError,
    PlacementError,
    TooFewSamplesError,
    ZeroVarianceError,
)
from .evalharness import (
    ClutterSpec,
    CorrelationResult,
    LabeledMap,
    PrResult,
    SweepRow,
    correlation,
    inject_clutter,
    precision_recall,
    run_sweep,
    sweep_grid,
)
from .global_score import GlobalScore, classify_trust, scale_profile, structure_score
from .grid_map import (
    BinaryMap,
    OccupancyGrid,
    binarize,
    load_map,
    pad_to_square,
    save_map,
)
from .local_score import (
    DeclutteredMap,
    GmmFit,
    GmmThreshold,
    NominalMap,
    declutter,
    fit_gmm,
    gmm_threshold,
    reconstruct_nominal,
    structure_mask,
)
from .pipeline import Analysis, DeclutterOutcome, PipelineConfig, analyze_map, declutter_map
from .spectral import (
    DirectionalProfile,
    PolarAmplitude,
    Spectrum,
    StructureMask,
    dft2,
    directional_profile,
    fold,
    idft2,
    unfold,
)
from .structure import (
    DirectionPeak,
    DominantDirections,
    find_dominant_directions,
    peak_prominence,
)
from .wall_lines import (
    HoughConfig,
    Segment,
    WallEvalResult,
    WallLine,
    align_to_directions,
    cluster_wall_lines,
    detect_segments,
    load_reference_lines,
    wall_error,
)
