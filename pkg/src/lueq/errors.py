"""Exception types raised by the library.

Two families: hard input errors (invalid states, bad indices, wrong qubit
counts) and solver signals. Solver signals are control-flow exceptions: the
decision protocol catches them to fall back to another solving strategy or to
record evidence of non-equivalence. They are still real exceptions, so direct
callers of the solvers see meaningful failures.
"""


class LueqError(Exception):
    """Base class for all library errors."""


class InvalidStateError(LueqError, ValueError):
    """A matrix fails one of the density-matrix invariants.

    ``invariant`` names the violated property: "hermitian", "unit-trace",
    "positive-semidefinite" or "normalized".
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = f"not a valid state: {invariant} invariant violated"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ArityError(LueqError, ValueError):
    """Qubit counts of the inputs do not match the operation's contract."""


class QubitIndexError(LueqError, ValueError):
    """A qubit index is outside 1..n, or a keep set is empty/unordered."""


class NonUnitaryInput(LueqError, ValueError):
    """A matrix expected to be unitary is not, beyond tolerance."""


class ParamOutOfRange(LueqError, ValueError):
    """A rotation parameter lies outside its documented range."""


class RankOutOfRange(LueqError, ValueError):
    """Requested mixture rank is not within 1..2**n."""


class TooManyQubits(LueqError, ValueError):
    """The brute-force search is capped at 3 qubits."""


class SolverSignal(LueqError):
    """Base class for angle-solver control-flow signals."""


class DegenerateState(SolverSignal):
    """Bloch vector is (numerically) zero; no preferred rotation axis."""


class VanishingDenominator(SolverSignal):
    """Both slice coefficients are null; the pairwise phase formula fails."""


class VanishingSlice(SolverSignal):
    """The reference slice vector is null; rotation cannot be anchored."""


class AllCoefficientsVanish(SolverSignal):
    """Every usable correlation coefficient at this order is null."""


class InconsistentCoefficients(SolverSignal):
    """Reference coefficients violate an LU-equivalence identity.

    Evidence of non-equivalence; the verification step has the final say.
    """


class NoConsistentSolution(SolverSignal):
    """The linear system admits no solution on the trigonometric manifold."""


class NoSolutionFound(SolverSignal):
    """No rotation pair reproduces the correlation block within tolerance."""


class NormMismatch(SolverSignal):
    """Slice norms differ between the two states; rotations are isometries."""


class OrderLimitExceeded(SolverSignal):
    """Correlations vanish through order 3 but unsolved qubits remain."""
