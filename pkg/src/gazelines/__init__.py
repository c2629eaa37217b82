"""Line-of-text tracking from noisy eye-gaze fixations.

The pipeline: discretize fixation y-coordinates to line-number
observations, train a discrete HMM on them with Baum-Welch, and decode the
most probable line sequence with Viterbi.
"""

from .detector import (
    EvalReport,
    LineDetector,
    average_error,
    default_initial_params,
    detect_lines,
    detect_lines_windowed,
    load_detector,
    page_error,
    save_detector,
    train,
)
from .errors import (
    DataFormatError,
    GazeLinesError,
    InsufficientDataError,
    NumericError,
    SymbolRangeError,
)
from .experiments import (
    NOISE_LEVELS,
    ExperimentSpec,
    compare_baseline,
    emit_plot_data,
    run_all_tables,
    run_table_experiment,
)
from .geometry import (
    Fixation,
    TextRegion,
    discretize,
    discretize_page,
    discretize_ys,
    estimate_region,
    line_centers,
)
from .hmm import (
    HmmParams,
    ObservationSequence,
    StatePath,
    TrainingTrace,
    baum_welch,
    forward_log_likelihood,
    load_params,
    save_params,
    validate,
    viterbi,
)
from .logs import FixationLog, parse_fixation_csv, write_fixation_csv
from .simulate import (
    LabeledPage,
    SimConfig,
    samples_per_page,
    simulate_corpus,
    simulate_page,
    train_test_split,
)

__version__ = "0.1.0"

__all__ = [
    "DataFormatError",
    "EvalReport",
    "ExperimentSpec",
    "Fixation",
    "FixationLog",
    "GazeLinesError",
    "HmmParams",
    "InsufficientDataError",
    "LabeledPage",
    "LineDetector",
    "NOISE_LEVELS",
    "NumericError",
    "ObservationSequence",
    "SimConfig",
    "StatePath",
    "SymbolRangeError",
    "TextRegion",
    "TrainingTrace",
    "average_error",
    "baum_welch",
    "compare_baseline",
    "default_initial_params",
    "detect_lines",
    "detect_lines_windowed",
    "discretize",
    "discretize_page",
    "discretize_ys",
    "emit_plot_data",
    "estimate_region",
    "forward_log_likelihood",
    "line_centers",
    "load_detector",
    "load_params",
    "page_error",
    "parse_fixation_csv",
    "run_all_tables",
    "run_table_experiment",
    "samples_per_page",
    "save_detector",
    "save_params",
    "simulate_corpus",
    "simulate_page",
    "train",
    "train_test_split",
    "validate",
    "viterbi",
    "write_fixation_csv",
]
