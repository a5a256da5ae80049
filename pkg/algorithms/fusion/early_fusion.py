import numpy as np

from .single_modal import SingleModalForecaster


class EarlyFusionForecaster(SingleModalForecaster):
    """Both markets' features concatenated at the input layer (width 10); otherwise a single-modal network."""

    def select_inputs(self, rows: np.ndarray) -> np.ndarray:
        return rows
