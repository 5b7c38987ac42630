"""Intuitionistic fuzzy cognitive maps for interpretable image classification."""
from __future__ import annotations

from .ifs import (
    IFValue,
    IntuitionisticFuzzySet,
    Gaussian,
    Triangular,
    Trapezoidal,
    hesitancy,
    icoa,
    ifs_intersection,
    ifs_union,
    ifs_validate,
    linguistic_partition,
)
from .reasoning import (
    IFState,
    ReasoningConfig,
    ReasoningResult,
    TransferFunction,
    WeightMatrix,
    ifcm_step,
    real_hesitancy,
    run_reasoning,
)
from .features import (
    FeatureMaps,
    Raster,
    SuperpixelMap,
    pool_superpixels,
    rescale_maps,
    slic_segment,
)
from .training import (
    ClassSpec,
    IfcmModel,
    Medoid,
    TrainingConfig,
    TrainingDataError,
    build_mf_family,
    extract_region_vectors,
    grid_search,
    mine_concepts,
    pair_ifs,
    similarity,
    train,
)
from .store import (
    FeaturePack,
    ModelFormatError,
    PackFormatError,
    load_model,
    read_class_manifest,
    read_pack,
    save_model,
    write_pack,
)
from .inference import (
    ClassDecision,
    DimensionMismatchError,
    Explanation,
    StateVector,
    build_state_vector,
    classify,
    explain,
    trace_export,
)

__version__ = "0.1.0"

__all__ = [
    "IFValue",
    "IntuitionisticFuzzySet",
    "Gaussian",
    "Triangular",
    "Trapezoidal",
    "hesitancy",
    "icoa",
    "ifs_intersection",
    "ifs_union",
    "ifs_validate",
    "linguistic_partition",
    "IFState",
    "ReasoningConfig",
    "ReasoningResult",
    "TransferFunction",
    "WeightMatrix",
    "ifcm_step",
    "real_hesitancy",
    "run_reasoning",
    "FeatureMaps",
    "Raster",
    "SuperpixelMap",
    "pool_superpixels",
    "rescale_maps",
    "slic_segment",
    "ClassSpec",
    "IfcmModel",
    "Medoid",
    "TrainingConfig",
    "TrainingDataError",
    "build_mf_family",
    "extract_region_vectors",
    "grid_search",
    "mine_concepts",
    "pair_ifs",
    "similarity",
    "train",
    "FeaturePack",
    "ModelFormatError",
    "PackFormatError",
    "load_model",
    "read_class_manifest",
    "read_pack",
    "save_model",
    "write_pack",
    "ClassDecision",
    "DimensionMismatchError",
    "Explanation",
    "StateVector",
    "build_state_vector",
    "classify",
    "explain",
    "trace_export",
    "__version__",
]
