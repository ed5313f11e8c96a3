"""HTTP model server for the adaptive-length decoding engine."""

__version__ = "0.1.0"

from .app import ModelService, ServerThread, make_server
from .models import LogitsModel, PassthroughModel, ToyDiffusionModel, reduce_logits_row

__all__ = [
    "LogitsModel", "ModelService", "PassthroughModel", "ServerThread",
    "ToyDiffusionModel", "make_server", "reduce_logits_row",
]
