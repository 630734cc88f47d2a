"""Exception hierarchy shared by all optensor modules."""


class OptensorError(Exception):
    """Base class for every error raised by optensor."""


# tensor core
class DuplicateWire(OptensorError):
    pass


class UnknownWire(OptensorError):
    pass


class NotHermitian(OptensorError):
    pass


# circuits
class InvalidWiring(OptensorError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "invalid wiring")


class NonRealScalar(OptensorError):
    pass


class PhysicalityViolation(OptensorError):
    pass


# physicality
class SignatureMismatch(OptensorError):
    pass


class NotPhysicalInput(OptensorError):
    pass


# causaloid
class DegenerateTable(OptensorError):
    pass


class BadFiducials(OptensorError):
    pass


class ZeroEffect(OptensorError):
    pass


class UnboundedRatio(OptensorError):
    pass


class HookupMismatch(OptensorError):
    pass


# lattice / witness
class BadRegion(OptensorError):
    pass


class TooSparse(OptensorError):
    pass


class NoFoliation(OptensorError):
    pass


class TruncationOverflow(OptensorError):
    pass


class BadCompletion(OptensorError):
    pass
