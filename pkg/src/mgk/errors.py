"""Exception hierarchy shared by every module.

Each error carries the witness that triggered it so callers (and the CLI)
can print a reproducible diagnostic.
"""


class MgkError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class StructuralError(MgkError, ValueError):
    """Malformed table, index out of range, wrong shape."""

    exit_code = 2


class ParseError(StructuralError):
    pass


class OrderCapExceeded(MgkError):
    exit_code = 3

    def __init__(self, order, cap, what="table"):
        super().__init__(f"SizeCap: {what} order {order} exceeds cap {cap} (set MGK_ORDER_CAP to override)")
        self.order = order
        self.cap = cap


class NotQuasigroup(MgkError):
    def __init__(self, kind, index):
        super().__init__(f"not a quasigroup: {kind} {index} is not a permutation")
        self.kind = kind
        self.index = index


class NotLoop(MgkError):
    def __init__(self, name=""):
        super().__init__(f"not a loop (no two-sided identity){': ' + name if name else ''}")


class NotMetagroup(MgkError):
    def __init__(self, name="", witness=None):
        msg = f"not a metagroup{': ' + name if name else ''}"
        if witness is not None:
            msg += f" (associator escapes the center at {witness})"
        super().__init__(msg)
        self.witness = witness


class NotCentral(MgkError):
    def __init__(self, witness):
        super().__init__(f"NotCentral: element {witness} is not in the center")
        self.witness = witness


class NotSubgroup(MgkError):
    def __init__(self, witness):
        super().__init__(f"NotSubgroup: subset not closed, {witness} escapes")
        self.witness = witness


class TRangeEscapes(MgkError):
    def __init__(self, witness):
        super().__init__(f"TRangeEscapes: associator value {witness} not in the subgroup")
        self.witness = witness


class InvalidFactors(MgkError):
    def __init__(self, condition, witness=None):
        super().__init__(f"InvalidFactors: condition {condition} fails at {witness}")
        self.condition = condition
        self.witness = witness


class SearchSpaceExceeded(MgkError):
    exit_code = 3

    def __init__(self, size, budget):
        super().__init__(f"SearchSpaceExceeded: {size} candidates > budget {budget}")
        self.size = size
        self.budget = budget


class PartitionFailure(MgkError):
    def __init__(self, overlap):
        super().__init__(f"PartitionFailure: cosets overlap at {overlap}")
        self.overlap = overlap


class SpecMismatch(MgkError):
    def __init__(self, field):
        super().__init__(f"SpecMismatch: specs differ in {field}")
        self.field = field


class BadOrderConstraint(MgkError):
    def __init__(self, l, k):
        super().__init__(f"BadOrderConstraint: l={l} does not divide 2^{k}-1={2 ** k - 1}")
        self.l = l
        self.k = k


class CentralD0(MgkError):
    def __init__(self, d0):
        super().__init__(f"CentralD0: d0={d0} lies in the center")
        self.d0 = d0
