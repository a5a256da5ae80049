from .layers import ACTIVATIONS, LayerSpec, NetworkError, dropout_mask, glorot_init
from .network import ForwardCache, NetworkParams, backward, forward, mse_grad, mse_loss
from .optimizers import OPTIMIZERS, SGD, Adam, Optimizer, OptimizerState, RMSProp, make_optimizer, optimizer_step
from .checkpoint import load_networks, save_networks

__all__ = [
    'ACTIVATIONS',
    'LayerSpec',
    'NetworkError',
    'dropout_mask',
    'glorot_init',
    'ForwardCache',
    'NetworkParams',
    'backward',
    'forward',
    'mse_grad',
    'mse_loss',
    'OPTIMIZERS',
    'SGD',
    'Adam',
    'Optimizer',
    'OptimizerState',
    'RMSProp',
    'make_optimizer',
    'optimizer_step',
    'load_networks',
    'save_networks',
]
