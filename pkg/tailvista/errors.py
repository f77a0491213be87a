"""Exception hierarchy shared by the library and the command line."""


class TailVistaError(Exception):
    """Base class for all tailvista errors"""


class DataError(TailVistaError, ValueError):
    """The sample cannot support the requested computation"""


class DomainError(TailVistaError, ValueError):
    """An argument lies outside the domain of the operation"""


class RenderError(TailVistaError, ValueError):
    """A figure specification violates a rendering invariant"""


class ConfigError(TailVistaError, ValueError):
    """Invalid run configuration"""
