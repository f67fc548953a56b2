class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class InfeasibleError(ValueError):
    """The throughput floor cannot be met by any admissible rate pair."""
