import json
import logging
from typing import Dict, Tuple

import numpy as np

from .layers import LayerSpec, NetworkError
from .network import NetworkParams

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
_HEADER_KEY = "__header__"


def save_networks(path: str, networks: Dict[str, NetworkParams], header: dict) -> str:
    """
    Write named networks to one .npz archive. Layer specs and `header`
    (variant descriptor, seed, ...) go into an embedded JSON document; arrays
    are stored losslessly, so loading reproduces every value bit for bit.
    """
    arrays = {}
    layout = {}
    for name, params in networks.items():
        if "/" in name:
            raise NetworkError(f"network name {name!r} may not contain '/'")
        layout[name] = [spec.to_dict() for spec in params.specs]
        for i, layer in enumerate(params.layers):
            for key, value in layer.items():
                arrays[f"{name}/{i}/{key}"] = value
    document = {"version": CHECKPOINT_VERSION, "networks": layout, "header": header}
    arrays[_HEADER_KEY] = np.array(json.dumps(document, sort_keys=True))
    with open(path, "wb") as f:
        np.savez(f, **arrays)
    logger.info("Checkpoint saved: %s", path)
    return path


def load_networks(path: str) -> Tuple[Dict[str, NetworkParams], dict]:
    with np.load(path, allow_pickle=False) as archive:
        document = json.loads(str(archive[_HEADER_KEY]))
        if document.get("version") != CHECKPOINT_VERSION:
            raise NetworkError(f"unsupported checkpoint version {document.get('version')}")
        networks = {}
        for name, spec_dicts in document["networks"].items():
            specs = tuple(LayerSpec(**d) for d in spec_dicts)
            layers = []
            for i in range(len(specs)):
                prefix = f"{name}/{i}/"
                layers.append({k[len(prefix):]: archive[k].copy() for k in archive.files if k.startswith(prefix)})
            networks[name] = NetworkParams(specs, layers)
    return networks, document["header"]
