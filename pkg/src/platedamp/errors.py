"""Exception types shared across the package."""


class DomainError(ValueError):
    """A geometric or physical argument lies outside its valid domain."""


class ConfigError(ValueError):
    """A scenario configuration is malformed or inconsistent."""


class AssemblyError(RuntimeError):
    """Mass/stiffness assembly produced an unusable system."""


class SolverError(RuntimeError):
    """A linear solve or eigensolve failed or is degenerate."""
