"""Exception hierarchy.

Every domain error carries a module-qualified ``code`` (``"mekler.NotNice"``)
which the command-line front end prints verbatim.
"""


class PfgroupsError(Exception):
    module = "core"

    @property
    def code(self) -> str:
        return f"{self.module}.{type(self).__name__}"


# finite-core
class FiniteGroupError(PfgroupsError):
    module = "finite"


class InvalidTable(FiniteGroupError):
    pass


class NotNormal(FiniteGroupError):
    pass


class DeskScaleExceeded(FiniteGroupError):
    pass


# lattice / filters
class LatticeError(PfgroupsError):
    module = "lattice"


class DepthInsufficient(LatticeError):
    module = "filters"


class SupportTooLarge(LatticeError):
    module = "filters"


# mekler
class MeklerError(PfgroupsError):
    module = "mekler"


class MixedContext(MeklerError):
    pass


class CentralInput(MeklerError):
    pass


class NotNice(MeklerError):
    pass


class BadPrime(MeklerError):
    pass


class LevelTooLarge(MeklerError):
    pass


class EdgeCentralGenerator(MeklerError):
    pass


class IndexOutOfRange(MeklerError):
    pass


# cantor
class CantorError(PfgroupsError):
    module = "cantor"


class NotStrictlyDescending(CantorError):
    pass


class DigitOutOfRange(CantorError):
    pass


class PermutationMovesZero(CantorError):
    pass


# parsing
class ExpressionSyntaxError(PfgroupsError):
    """Syntax error with the offending position and the tokens expected there."""

    module = "parse"

    def __init__(self, text: str, position: int, expected):
        self.text = text
        self.position = position
        self.expected = tuple(sorted(set(expected)))
        got = repr(text[position]) if position < len(text) else "end of input"
        super().__init__(
            f"at position {position}: expected one of {', '.join(self.expected)}; got {got}"
        )


class FormatError(PfgroupsError):
    module = "format"
