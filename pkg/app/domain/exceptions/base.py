class DomainError(Exception):
    """
    Exception for violations of fundamental domain rules: physically meaningless
    inputs, broken operator invariants and numerical constructions that fail
    their own consistency checks.
    """
