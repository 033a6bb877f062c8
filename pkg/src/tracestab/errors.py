"""Exception types shared across the package."""


class TraceStabError(Exception):
    """Base class for all package errors."""


class NonCartan(TraceStabError):
    """Simple root/coroot pairing is not a valid finite Cartan matrix."""


class InfiniteType(TraceStabError):
    """Reflection closure exceeded the finite-type bound."""


class NotCentral(TraceStabError):
    """A claimed central element pairs non-integrally with some root."""


class NotAutomorphism(TraceStabError):
    """A twist matrix does not permute the coroot system."""


class InfiniteOrder(TraceStabError):
    """No power of the twist matrix up to the bound is the identity."""


class TwistedUnsupported(TraceStabError):
    """Twisted enumeration requested for an unsupported twist shape."""


class RecursionCycle(TraceStabError):
    """A non-central class reported a centralizer equal to its parent."""


class MismatchedModel(TraceStabError):
    """A character triple or component label does not belong to the model."""


class MissingDualGroup(TraceStabError):
    """The operation needs a dual-group attachment and none is present."""


class InconsistentDescriptor(TraceStabError):
    """An endoscopic descriptor fails the coefficient bookkeeping."""


class MalformedInput(TraceStabError):
    """An input file violates the documented schema."""
