"""Exception types shared across the toolkit."""


class TowerlabError(Exception):
    """Base class for all toolkit errors."""


class PreconditionError(TowerlabError, ValueError):
    """An operation was called with arguments violating its contract."""


class HeightBudgetExceeded(TowerlabError):
    """A return-time sweep did not resolve all mass within the height budget."""


class MasterTowerError(TowerlabError):
    """No valid chopping of the master tower; retry with a larger one."""


class SizeCapExceeded(TowerlabError):
    """A word or window enumeration would exceed the configured size cap."""


class ScheduleError(TowerlabError, ValueError):
    """Construction schedule constants are infeasible; message names the violated inequality."""


class CertificateError(TowerlabError):
    """An exact certificate recomputation failed to match."""
