"""Exception hierarchy shared by every module."""


class PolyAgentError(Exception):
    """Base class for all errors raised by polyagent."""


class InterfaceMismatch(PolyAgentError):
    pass


class InvalidCategory(PolyAgentError):
    pass


class SizeGuardExceeded(PolyAgentError):
    def __init__(self, what, cardinality, guard):
        self.cardinality = cardinality
        self.guard = guard
        super().__init__(f"{what}: cardinality {cardinality} exceeds guard {guard}")


class CarrierMismatch(PolyAgentError):
    pass


class NormalizationError(PolyAgentError):
    pass


class ZeroEvidence(PolyAgentError):
    pass


class IncompatibleOutputs(PolyAgentError):
    pass


class InterfaceNotClosed(PolyAgentError):
    pass


class UnknownMorphism(PolyAgentError):
    pass


class NoAvailableAction(PolyAgentError):
    pass


class MissingTable(PolyAgentError):
    pass
