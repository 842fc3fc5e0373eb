"""High-precision Bessel moments, Watson lattice integrals, hypergeometric
series and Meijer G-functions, with a registry of cross-verified identities.
"""

from .mpcore import PrecisionContext, adaptive_eval, digits_agreement, ctx_for_digits

__all__ = [
    "PrecisionContext",
    "adaptive_eval",
    "digits_agreement",
    "ctx_for_digits",
]

__version__ = "0.1.0"
