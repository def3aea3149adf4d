"""Exception types raised by the xcflab kernels."""


class XcfError(Exception):
    """Base class for all xcflab errors."""


class NonPositiveMetric(XcfError):
    pass


class StencilUnderflow(XcfError):
    pass


class NonPositiveEin(XcfError):
    """Raised by operations that need V = Ein^-1 or sqrt(det E)."""


class DegeneratePlane(XcfError):
    pass


class JacobiViolation(XcfError):
    pass


class EinDegenerate(XcfError):
    def __init__(self, t, min_eig):
        super().__init__(f"Einstein tensor degenerate at t={t!r} (min eigenvalue {min_eig:.3e})")
        self.t = t
        self.min_eig = min_eig


class CflViolation(XcfError):
    pass


class MismatchedGrids(XcfError):
    pass


class NonSymmetricA(XcfError):
    pass


class ZeroCovector(XcfError):
    pass


class NonConvergentExtraction(XcfError):
    pass


class ConfigError(XcfError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
