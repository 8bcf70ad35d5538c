"""Exception hierarchy shared by all qmcast modules."""


class QmcastError(Exception):
    """Base class for all library errors."""


class NonPrime(QmcastError):
    """Field characteristic is not a prime number."""


class SpecMismatch(QmcastError):
    """Operation mixed elements of different field specs."""


class ZeroInverse(QmcastError):
    """Multiplicative inverse of zero requested."""


class Inconsistent(QmcastError):
    """Linear system has no solution."""


class ParseError(QmcastError):
    """Malformed input document."""


class CyclicGraph(QmcastError):
    """Network digraph contains a directed cycle."""


class StructureViolation(QmcastError):
    """Network violates a structural condition (names the condition)."""


class UnknownTarget(QmcastError):
    """Node id is not one of the network targets."""


class InfeasibleRate(QmcastError):
    """Requested source rate exceeds some source-target min-cut."""


class SearchExhausted(QmcastError):
    """Random code search failed within the retry budget."""


class DimMismatch(QmcastError):
    """Operator / state / register dimensions do not line up."""


class NonIsometry(QmcastError):
    """Operator columns are not orthonormal."""


class UnknownRegister(QmcastError):
    """Register label not present in the state registry."""


class ConstraintViolated(QmcastError):
    """Cloner parameters are off the normalization surface."""


class IndexOutOfRange(QmcastError):
    """Measurement outcome index outside [0, d)."""


class DegenerateParams(QmcastError):
    """A defining vector of a completed unitary has zero norm."""


class InsufficientEbits(QmcastError):
    """Entanglement ledger budget exceeded."""


class MissingOutcome(QmcastError):
    """Phase-correction input lacks an outcome for some register."""


class UnsolvableCode(QmcastError):
    """Code failed its solvability certificate."""


class EdgeNotAtSource(QmcastError):
    """Edge unitary requested for the wrong edge kind."""
