"""Exception types shared across the package."""


class Mf2scfError(Exception):
    """Base class for errors raised by this package."""


class ImageTooSmall(Mf2scfError):
    pass


class DimensionMismatch(Mf2scfError):
    pass


class EigenNonConvergence(Mf2scfError):
    pass


class LayoutMismatch(Mf2scfError):
    pass


class ClassTooSmall(Mf2scfError):
    pass


class DegenerateCovariance(Mf2scfError):
    pass


class SingularScatter(Mf2scfError):
    pass


class LengthMismatch(Mf2scfError):
    pass
