"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside an operation's mathematical domain.

    The CLI maps this to exit status 2.
    """


class KernelError(DomainError):
    """A kernel raised on one element of a parallel launch."""

    def __init__(self, index, cause):
        super().__init__(f"kernel failed at element {index}: {cause}")
        self.index = index
        self.cause = cause

    def __reduce__(self):
        return (KernelError, (self.index, self.cause))
