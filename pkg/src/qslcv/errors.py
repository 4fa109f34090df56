class NumericError(ArithmeticError):
    """A numerical routine failed to reach its accuracy target or produced non-finite values."""
