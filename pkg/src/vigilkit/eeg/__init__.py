from .bands import (BandSet, RoiMap, band_power_ratios, default_roi_map,
                    feature_names)
from .eog import regress_out_eog
from .filters import bandpass, decimate, notch
from .ica import (IcaResult, amari_index, infomax_ica, reconstruct,
                  reject_artifact_ics)
from .io import (Recording, RestingState, read_recording, read_recording_csv,
                 write_recording)
from .pipeline import ExtractConfig, ExtractReport, extract_features

__all__ = [
    "BandSet", "RoiMap", "band_power_ratios", "default_roi_map", "feature_names",
    "regress_out_eog", "bandpass", "decimate", "notch",
    "IcaResult", "amari_index", "infomax_ica", "reconstruct", "reject_artifact_ics",
    "Recording", "RestingState", "read_recording", "read_recording_csv", "write_recording",
    "ExtractConfig", "ExtractReport", "extract_features",
]
