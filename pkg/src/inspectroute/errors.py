"""Exception hierarchy.

Route violations double as values: ``validate_route`` returns them instead of
raising, ``evaluate_route`` raises them.
"""


class InspectRouteError(Exception):
    """Base class for every error raised by this package."""


class InvalidRoute(InspectRouteError, ValueError):
    pass


class WrongLength(InvalidRoute):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"route has {got} nodes, expected {expected}")


class IndexOutOfRange(InvalidRoute):
    def __init__(self, node, n):
        self.node = node
        self.n = n
        super().__init__(f"node {node} out of range [0, {n})")


class DuplicateNode(InvalidRoute):
    def __init__(self, node):
        self.node = node
        super().__init__(f"node {node} visited twice")

    def __eq__(self, other):
        return isinstance(other, DuplicateNode) and other.node == self.node

    __hash__ = InvalidRoute.__hash__


class MissingEdge(InvalidRoute):
    def __init__(self, i, j):
        self.i = i
        self.j = j
        super().__init__(f"no edge between {i} and {j}")

    def __eq__(self, other):
        return isinstance(other, MissingEdge) and (other.i, other.j) == (self.i, self.j)

    __hash__ = InvalidRoute.__hash__


class Disconnected(InspectRouteError):
    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        sizes = ", ".join(str(len(c)) for c in self.components)
        super().__init__(f"graph has {len(self.components)} components (sizes {sizes})")


class InconsistentVia(InspectRouteError):
    pass


class NotComplete(InspectRouteError):
    pass


class DummyMissing(InspectRouteError):
    pass


class ParseError(InspectRouteError):
    def __init__(self, message, line=None, offset=None):
        self.line = line
        self.offset = offset
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif offset is not None:
            where = f" (byte {offset})"
        super().__init__(message + where)


class SchemaError(InspectRouteError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class TooLarge(InspectRouteError):
    def __init__(self, n, limit):
        self.n = n
        self.limit = limit
        super().__init__(f"instance has {n} nodes, solver limit is {limit}")


class BadStart(InspectRouteError, ValueError):
    pass


class BaselineWorse(InspectRouteError):
    pass


class BaselineUnavailable(InspectRouteError):
    def __init__(self, instance):
        self.instance = instance
        super().__init__(f"no exact or stored baseline cost for instance {instance!r}")


class DegenerateFace(UserWarning):
    """Emitted (not raised) when a zero-area triangle is dropped on load."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"dropping degenerate face {index}")
