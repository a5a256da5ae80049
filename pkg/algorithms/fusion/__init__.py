from .spec import SOURCES, VARIANTS, ModelSpec
from .single_modal import SingleModalForecaster
from .early_fusion import EarlyFusionForecaster
from .intermediate_fusion import IntermediateFusionForecaster
from .late_fusion import LateFusionForecaster, late_fusion_combine
from .factory import FusionModel, build_model, load_model, predict, save_model

__all__ = [
    'SOURCES',
    'VARIANTS',
    'ModelSpec',
    'SingleModalForecaster',
    'EarlyFusionForecaster',
    'IntermediateFusionForecaster',
    'LateFusionForecaster',
    'late_fusion_combine',
    'FusionModel',
    'build_model',
    'load_model',
    'predict',
    'save_model',
]
