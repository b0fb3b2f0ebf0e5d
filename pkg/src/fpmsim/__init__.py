"""Fourier ptychographic microscopy simulation, reconstruction and evaluation."""

__version__ = "0.1.0"

from .ap import ApConfig, ApResult, ap_reconstruct, data_residual
from .bicubic import bicubic_resize
from .cube import CubeMeta, IntensityCube, read_cube, write_cube
from .dataset import (
    build_corpus,
    build_cube,
    extract_tiles,
    ground_truth_cube,
    prepare_ground_truth,
    read_manifest,
    upsample_cube,
)
from .errors import CubeFormatError, FieldError, FpmError, GeometryError, NumericalError
from .field import (
    Pupil,
    circular_pupil,
    crop_spectrum,
    embed_spectrum,
    forward_dft,
    inverse_dft,
)
from .forward import NoiseSpec, simulate_intensity, simulate_stack
from .geometry import (
    IlluminationGrid,
    PhysicalConfig,
    angle_to_wavevector,
    make_grid,
    overlap_ratio,
    spacing_for_overlap,
    wavevector_to_bins,
)
from .metrics import EvalRecord, psnr, ssim
from .sweeps import (
    bicubic_baseline,
    reconstruct_cube,
    run_noise_sweep,
    run_overlap_sweep,
    summarize_records,
    write_records,
)
