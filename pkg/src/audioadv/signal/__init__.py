"""Audio-to-representation pipeline: WAV I/O, STFT/DWT spectrograms, tonnetz."""

from .augment import DEFAULT_SCALES, pitch_shift, pitch_shift_augment
from .chroma import Chromagram, tonal_centroid_matrix, tonnetz_chromagram
from .spectrogram import (
    Kind,
    Spectrogram,
    append_tonnetz,
    default_chroma_rows,
    nn_resize,
    read_spectrogram,
    resize_spectrogram,
    write_spectrogram,
)
from .stft import StftConfig, stft, stft_spectrogram
from .wav import Waveform, load_wav, resample, write_wav
from .wavelet import (
    DwtConfig,
    center_frequencies,
    cwt_matrix,
    dwt_spectrogram,
    morlet_kernel,
    scale_ladder,
)

__all__ = [
    "Chromagram",
    "DEFAULT_SCALES",
    "DwtConfig",
    "Kind",
    "Spectrogram",
    "StftConfig",
    "Waveform",
    "append_tonnetz",
    "center_frequencies",
    "cwt_matrix",
    "default_chroma_rows",
    "dwt_spectrogram",
    "load_wav",
    "morlet_kernel",
    "nn_resize",
    "pitch_shift",
    "pitch_shift_augment",
    "read_spectrogram",
    "resample",
    "resize_spectrogram",
    "scale_ladder",
    "stft",
    "stft_spectrogram",
    "tonal_centroid_matrix",
    "tonnetz_chromagram",
    "write_spectrogram",
    "write_wav",
]
