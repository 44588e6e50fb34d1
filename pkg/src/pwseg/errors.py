"""Exception types shared across the package."""


class PwsegError(Exception):
    pass


class EmptySentence(PwsegError):
    """A corpus line contained no words after trimming."""


class EmptyCorpus(PwsegError):
    """An operation that needs at least one sentence got none."""


class ParseError(PwsegError):
    """A data file (code table, embedding file) is malformed."""


class ShapeError(PwsegError):
    """Tensor operands do not conform."""


class AlignmentError(PwsegError):
    """Parallel sequences disagree in length or content."""


class ConfigError(PwsegError):
    """Configuration values are inconsistent with loaded data."""


class CheckpointError(PwsegError):
    """A checkpoint file does not match the expected format or model."""


class DivergedError(PwsegError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, message: str | None = None):
        self.epoch = epoch
        super().__init__(message or f"non-finite loss at epoch {epoch}")
