"""Near-field MIMO channels with rough reflecting surfaces."""

from .errors import AcceptanceFailure, NfchanError, NumericalError, ValidationError

__version__ = "0.1.0"

__all__ = ["AcceptanceFailure", "NfchanError", "NumericalError", "ValidationError", "__version__"]
