"""Arbitrary-precision partial theta series attached to periodic coefficients.

The package evaluates Theta(tau; nu, f, M) = sum_{n>=1} n^nu f(n) q^{n^2},
q = e^{i pi tau / M}, for an M-periodic f, together with its divergent
asymptotic expansion at 0, Borel-plane resummations, and the exact modular
relations these satisfy.
"""

from .precision import PrecisionContext, DEFAULT_CTX, NonConvergent

__all__ = ["PrecisionContext", "DEFAULT_CTX", "NonConvergent"]

__version__ = "0.1.0"
