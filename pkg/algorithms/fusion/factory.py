import logging
from typing import Dict, Optional

import numpy as np

from algorithms.base_forecaster import BaseForecaster
from algorithms.neural import NetworkError, NetworkParams, load_networks, save_networks
from .early_fusion import EarlyFusionForecaster
from .intermediate_fusion import IntermediateFusionForecaster
from .late_fusion import LateFusionForecaster
from .single_modal import SingleModalForecaster
from .spec import ModelSpec

logger = logging.getLogger(__name__)

FusionModel = BaseForecaster

_CLASSES = {
    "single_modal": SingleModalForecaster,
    "early_fusion": EarlyFusionForecaster,
    "intermediate_fusion": IntermediateFusionForecaster,
    "late_fusion": LateFusionForecaster,
}


def build_model(spec: ModelSpec, rng: Optional[np.random.Generator] = None,
                networks: Optional[Dict[str, NetworkParams]] = None) -> BaseForecaster:
    """Glorot-initialise every network of the variant, or wrap already trained `networks`."""
    layouts = spec.sub_specs()
    if networks is None:
        if rng is None:
            raise NetworkError("build_model needs an rng to initialise weights")
        networks = {name: NetworkParams.initialize(chain, rng) for name, chain in layouts.items()}
    elif {name: net.specs for name, net in networks.items()} != layouts:
        raise NetworkError("supplied networks do not match the model spec")
    else:
        networks = {name: networks[name] for name in layouts}
    model = _CLASSES[spec.variant](spec, networks)
    logger.debug("Built %r", model)
    return model


def predict(model: BaseForecaster, rows: np.ndarray, mode: str = "inference", rng: Optional[np.random.Generator] = None):
    return model.predict(rows, mode=mode, rng=rng)


def save_model(model: BaseForecaster, path: str, seed: Optional[int] = None) -> str:
    return save_networks(path, model.networks, {"spec": model.spec.to_dict(), "seed": seed})


def load_model(path: str) -> BaseForecaster:
    networks, header = load_networks(path)
    return build_model(ModelSpec.from_dict(header["spec"]), networks=networks)
