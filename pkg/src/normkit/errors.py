"""Error type shared by all normkit modules.

Every contract violation raises :class:`CheckFailure` with a short machine
readable ``code`` (e.g. ``"dim_mismatch"``, ``"not_member"``) so that the
scenario harness can turn failures into report rows instead of crashes.
"""


class CheckFailure(Exception):
    """Raised when an operation's preconditions or inputs are invalid.

    Attributes
    ----------
    code : str
        Stable identifier of the failure kind.
    detail : str
        Free-form human readable context.
    payload : object
        Optional structured attachment (e.g. an incumbent solution when a
        solver runs out of budget).
    """

    def __init__(self, code: str, detail: str = "", payload=None):
        self.code = code
        self.detail = detail
        self.payload = payload
        super().__init__(f"{code}: {detail}" if detail else code)
