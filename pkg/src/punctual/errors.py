"""Error types shared across the package."""


class PunctualError(Exception):
    """Base class for all package errors."""


class PunctualityViolation(PunctualError):
    """A stream exceeded its fuel budget at some stage."""

    def __init__(self, stage, consumed, limit, description=""):
        self.stage = stage
        self.consumed = consumed
        self.limit = limit
        self.description = description
        super().__init__(
            "budget exceeded at stage %d: consumed %d > limit %d%s"
            % (stage, consumed, limit, " (%s)" % description if description else "")
        )


class PreconditionFailed(PunctualError):
    """Caller violated a stated precondition."""


class PromiseViolation(PunctualError):
    """An input promise (pruned tree, Hall witness, domination escape...) failed."""


class InstanceInconsistent(PunctualError):
    """The supplied instance contradicts itself within the horizon."""


class InvalidInstance(PunctualError):
    """A streamed instance broke its per-prefix invariant."""


class HallViolation(PunctualError):
    """Hall's condition fails; carries a violating left-side witness set."""

    def __init__(self, witness):
        self.witness = sorted(witness)
        super().__init__("Hall's condition violated by X=%s" % (self.witness,))


class HorizonExceeded(PunctualError):
    """A required witness never appeared within the test horizon."""


class DensityTimeout(PunctualError):
    """No extension ball found for a probe string within the horizon."""

    def __init__(self, index, probe=None):
        self.index = index
        self.probe = probe
        super().__init__("open set %s not met within horizon (probe %s)" % (index, probe))


class ZeroElement(PunctualError):
    """Decoding was attempted on the zero group element."""


class AuditFailure(PunctualError):
    """A validity audit failed on an output prefix."""
