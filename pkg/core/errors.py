class OrthoDerivError(Exception):
    """Base error for the library"""
    exit_code = 3


class RegionError(OrthoDerivError):
    """Point lies outside the region where the requested representation is valid"""
    exit_code = 2


class StencilError(RegionError):
    """Finite-difference stencil leaves the domain of the sampled function"""


class DivergenceError(RegionError):
    """Series evaluated at an argument where it diverges"""


class ParameterError(OrthoDerivError):
    """Invalid or inadmissible parameters"""
    exit_code = 3


class PoleError(ParameterError):
    """Gamma function or Pochhammer symbol hit a pole"""


class DegeneracyError(ParameterError):
    """Representation degenerates for the given parameters"""


class TruncationError(OrthoDerivError):
    """Tail of an improper integral is not negligible at the cutoff"""
    exit_code = 3
