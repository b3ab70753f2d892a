"""Standard-form Hermitian SDPs: compilation from games, Slater points,
solving and duality checks.

The prover's optimization for a game is

    maximize    <objective, X>
    subject to  Tr_{Y_1}(X_1) = I,  Tr_{Y_j}(X_j) = X_{j-1} (x) I,  X_j >= 0

and its dual minimizes ``Tr(Y)`` over a chain of operator inequalities.
Both are compiled to one scalarized standard form: every partial-trace
equality is expanded against an orthonormal Hermitian basis of the
constrained space, giving ``dim^2`` scalar equations per chain link.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import solver as _solver
from .errors import DomainError, SpaceError, ValidationError
from .games import OutcomeOperators
from .operators import (
    HermitianOperator,
    align,
    identity,
    inner,
    kron,
    min_eigenvalue,
    partial_trace,
)
from .spaces import SpaceList

FEASIBILITY_TOL = 1e-8
WEAK_DUALITY_SLACK = 1e-7


# -- scalarization machinery -----------------------------------------------------


def hermitian_basis(dim: int):
    """Orthonormal basis of the Hermitian matrices of a given dimension.

    Order: diagonal units first, then symmetric and antisymmetric pairs
    in row-major order.  Deterministic, so scalarized constraints can be
    mapped back to operator form.
    """
    for i in range(dim):
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[i, i] = 1.0
        yield mat
    inv = 1.0 / math.sqrt(2.0)
    for i in range(dim):
        for j in range(i + 1, dim):
            mat = np.zeros((dim, dim), dtype=np.complex128)
            mat[i, j] = inv
            mat[j, i] = inv
            yield mat
            mat = np.zeros((dim, dim), dtype=np.complex128)
            mat[i, j] = -1j * inv
            mat[j, i] = 1j * inv
            yield mat


def operator_from_coefficients(coeffs, spaces: SpaceList) -> HermitianOperator:
    """Rebuild an operator from its coordinates in :func:`hermitian_basis`."""
    mat = np.zeros((spaces.dim, spaces.dim), dtype=np.complex128)
    for c, h in zip(coeffs, hermitian_basis(spaces.dim)):
        if c != 0.0:
            mat += float(c) * h
    return HermitianOperator(spaces, mat)


# -- problem containers ------------------------------------------------------------


@dataclass(frozen=True)
class ScalarConstraint:
    """One scalar equality: sum over blocks of <coeff_b, X_b> = rhs."""

    coeffs: dict
    rhs: float


@dataclass(frozen=True)
class ConstraintFamily:
    """Metadata tying a run of scalarized constraints back to one chain
    link (used to reconstruct dual witness blocks from multipliers)."""

    name: str
    spaces: SpaceList
    offset: int
    count: int


@dataclass(frozen=True)
class SdpProblem:
    blocks: tuple
    objective: dict
    constraints: tuple
    sense: str = "max"
    offset: float = 0.0
    primal_start: dict | None = None
    dual_start: np.ndarray | None = None
    families: tuple = ()

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValidationError(f"sense must be 'max' or 'min', got {self.sense!r}")
        names = [name for name, _ in self.blocks]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate block names")
        spaces = dict(self.blocks)
        for name, op in self.objective.items():
            if name not in spaces:
                raise ValidationError(f"objective references unknown block {name!r}")
            if op.spaces != spaces[name]:
                raise SpaceError(f"objective block {name!r} has mismatched spaces")
        for k, con in enumerate(self.constraints):
            if not np.isfinite(con.rhs):
                raise ValidationError(f"constraint {k} has non-finite rhs")
            for name, op in con.coeffs.items():
                if name not in spaces:
                    raise ValidationError(f"constraint {k} references unknown block {name!r}")
                if op.spaces != spaces[name]:
                    raise SpaceError(f"constraint {k} block {name!r} has mismatched spaces")

    @property
    def block_names(self):
        return tuple(name for name, _ in self.blocks)

    def block_space(self, name: str) -> SpaceList:
        return dict(self.blocks)[name]


@dataclass(frozen=True)
class SolveReport:
    status: str
    primal_value: float
    dual_value: float
    gap: float
    primal_blocks: dict
    dual_multipliers: tuple
    iterations: int
    tol: float


@dataclass(frozen=True)
class DualWitness:
    """Candidate dual solution ``(Y, {Y_j})`` for a game's chain dual.

    Feasibility is checked by :func:`check_dual_feasibility`, never
    assumed; ``meta`` records the construction and its parameters.
    """

    rounds: int
    Y: HermitianOperator
    Y_blocks: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.Y_blocks) != self.rounds - 1:
            raise ValidationError("expected Y_2..Y_r blocks")

    @property
    def value(self) -> float:
        return self.Y.trace()

    def chain(self):
        return (self.Y,) + tuple(self.Y_blocks)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    constraint_min_eigenvalues: tuple
    value: float
    tol: float


# -- game-side space bookkeeping ---------------------------------------------------


def _interleaved_labels(g: OutcomeOperators, upto: int):
    labels = []
    for m in range(upto):
        labels.extend(g.y_rounds[m])
        labels.extend(g.x_rounds[m])
    return tuple(labels)


def _block_space(g: OutcomeOperators, j: int) -> SpaceList:
    labels = _interleaved_labels(g, j)
    return g.spaces.restrict(labels).reorder(labels)


def _family_space(g: OutcomeOperators, j: int) -> SpaceList:
    labels = _interleaved_labels(g, j - 1) + tuple(g.x_rounds[j - 1])
    return g.spaces.restrict(labels).reorder(labels)


def _block_name(g: OutcomeOperators, j: int) -> str:
    return "X" if j == g.rounds else f"X{j}"


def _check_objective(g: OutcomeOperators, objective: HermitianOperator):
    if sorted(objective.spaces.labels) != sorted(g.spaces.labels):
        raise SpaceError(
            f"objective labels {sorted(objective.spaces.labels)} do not match the "
            f"game space {sorted(g.spaces.labels)}"
        )


# -- compilation -------------------------------------------------------------------


def compile_primal(g: OutcomeOperators, objective: HermitianOperator) -> SdpProblem:
    """Compile the prover's maximization over strategies.

    One PSD block per chain level; the partial-trace chain becomes
    ``dim(W_j)^2`` scalar equalities per level ``j`` against an
    orthonormal Hermitian basis of the constrained space ``W_j``.
    """
    _check_objective(g, objective)
    r = g.rounds
    blocks = tuple((_block_name(g, j), _block_space(g, j)) for j in range(1, r + 1))
    spaces = dict(blocks)
    constraints = []
    families = []
    for j in range(1, r + 1):
        w = _family_space(g, j)
        id_y = identity(g.spaces.restrict(g.y_rounds[j - 1]))
        offset = len(constraints)
        for h in hermitian_basis(w.dim):
            hop = HermitianOperator(w, h)
            lifted = align(kron(hop, id_y), spaces[_block_name(g, j)])
            coeffs = {_block_name(g, j): lifted}
            if j > 1:
                reduced = partial_trace(hop, set(g.x_rounds[j - 1]))
                coeffs[_block_name(g, j - 1)] = reduced * -1.0
                rhs = 0.0
            else:
                rhs = float(np.trace(h).real)
            constraints.append(ScalarConstraint(coeffs, rhs))
        families.append(ConstraintFamily(f"Y{j}" if j > 1 else "Y", w, offset, w.dim**2))
    primal_point, dual_chain = slater_points(g, objective)
    dual_start = np.concatenate(
        [
            [inner(HermitianOperator(fam.spaces, h), yop) for h in hermitian_basis(fam.spaces.dim)]
            for fam, yop in zip(families, dual_chain)
        ]
    )
    return SdpProblem(
        blocks=blocks,
        objective={_block_name(g, r): align(objective, spaces[_block_name(g, r)])},
        constraints=tuple(constraints),
        sense="max",
        primal_start=primal_point,
        dual_start=dual_start,
        families=tuple(families),
    )


def compile_dual(g: OutcomeOperators, objective: HermitianOperator) -> SdpProblem:
    """Compile the chain dual (minimize ``Tr(Y)``) to standard form.

    For a PSD objective every feasible chain block is itself PSD (the
    last inequality dominates a PSD operator and feasibility propagates
    up the chain), so the blocks enter the cone directly.  A non-PSD
    objective forces ``Y_j >= -K_j I`` with the cascade constants
    ``K_r = |objective|``, ``K_{j} = K_{j+1} dim(X_{j+1})``; the blocks
    are shifted by those identity multiples and the report carries the
    trace offset, so the compiled optimum still equals the dual optimum.
    """
    _check_objective(g, objective)
    r = g.rounds
    shifts = [0.0] * r
    if min_eigenvalue(objective) < -1e-12:
        shifts[r - 1] = float(np.linalg.norm(objective.entries, 2))
        for j in range(r - 1, 0, -1):
            shifts[j - 1] = shifts[j] * g.spaces.restrict(g.x_rounds[j]).dim
    blocks = []
    for j in range(1, r + 1):
        blocks.append((f"Q{j}", _family_space(g, j)))
        blocks.append((f"S{j}", _block_space(g, j)))
    blocks = tuple(blocks)
    spaces = dict(blocks)
    constraints = []
    for j in range(1, r + 1):
        v = _block_space(g, j)
        obj_aligned = align(objective, v) if j == r else None
        if j < r:
            const = shifts[j - 1] - shifts[j] * g.spaces.restrict(g.x_rounds[j]).dim
        else:
            const = shifts[j - 1]
        for h in hermitian_basis(v.dim):
            hop = HermitianOperator(v, h)
            reduced = partial_trace(hop, set(g.y_rounds[j - 1]))
            coeffs = {f"Q{j}": reduced, f"S{j}": hop * -1.0}
            rhs = const * float(np.trace(h).real)
            if j < r:
                lifted = align(
                    kron(hop, identity(g.spaces.restrict(g.x_rounds[j]))),
                    spaces[f"Q{j + 1}"],
                )
                coeffs[f"Q{j + 1}"] = lifted * -1.0
            else:
                rhs += inner(hop, obj_aligned)
            constraints.append(ScalarConstraint(coeffs, rhs))
    _, dual_chain = slater_points(g, objective)
    primal_start = {}
    for j in range(1, r + 1):
        q = dual_chain[j - 1] + identity(spaces[f"Q{j}"]) * shifts[j - 1]
        primal_start[f"Q{j}"] = q
        slack = align(
            kron(dual_chain[j - 1], identity(g.spaces.restrict(g.y_rounds[j - 1]))),
            spaces[f"S{j}"],
        )
        if j < r:
            slack = slack - align(
                partial_trace(dual_chain[j], set(g.x_rounds[j])), spaces[f"S{j}"]
            )
        else:
            slack = slack - align(objective, spaces[f"S{j}"])
        primal_start[f"S{j}"] = slack
    return SdpProblem(
        blocks=blocks,
        objective={"Q1": identity(spaces["Q1"])},
        constraints=tuple(constraints),
        sense="min",
        offset=-shifts[0] * spaces["Q1"].dim,
        primal_start=primal_start,
        dual_start=None,
        families=(),
    )


def slater_points(g: OutcomeOperators, objective: HermitianOperator):
    """Strictly feasible points for the compiled primal and the chain dual.

    Primal: each chain block a multiple of the identity,
    ``X_j = I / dim(Y_1 ... Y_j)``.  Dual: a cascade of identity
    multiples, ``Y_r = (|objective| + 1) I`` and each earlier level
    scaled up by twice the traced-out question dimension, which leaves
    every inequality satisfied with margin at least one.
    """
    _check_objective(g, objective)
    r = g.rounds
    primal = {}
    denom = 1
    for j in range(1, r + 1):
        denom *= g.spaces.restrict(g.y_rounds[j - 1]).dim
        sp = _block_space(g, j)
        primal[_block_name(g, j)] = identity(sp) * (1.0 / denom)
    norm = float(np.linalg.norm(objective.entries, 2))
    scale = norm + 1.0
    chain = [None] * r
    for j in range(r, 0, -1):
        chain[j - 1] = identity(_family_space(g, j)) * scale
        if j > 1:
            scale *= 2 * g.spaces.restrict(g.x_rounds[j - 1]).dim
    return primal, tuple(chain)


# -- solving -----------------------------------------------------------------------


def solve(problem: SdpProblem, tol: float = 1e-8, max_iter: int = 200) -> SolveReport:
    """Solve a standard-form problem with the embedded interior-point kernel."""
    if not 1e-10 <= tol <= 1e-2:
        raise ValidationError(f"tol must lie in [1e-10, 1e-2], got {tol!r}")
    if max_iter < 1:
        raise ValidationError("max_iter must be positive")
    names = problem.block_names
    spaces = dict(problem.blocks)
    dims = [spaces[n].dim for n in names]
    sign = -1.0 if problem.sense == "min" else 1.0
    c_blocks = []
    for n in names:
        op = problem.objective.get(n)
        mat = np.zeros((spaces[n].dim,) * 2, dtype=np.complex128) if op is None else op.entries
        c_blocks.append(sign * mat)
    m = len(problem.constraints)
    f_blocks = [np.zeros((m, d, d), dtype=np.complex128) for d in dims]
    b = np.zeros(m)
    for i, con in enumerate(problem.constraints):
        b[i] = con.rhs
        for k, n in enumerate(names):
            op = con.coeffs.get(n)
            if op is not None:
                f_blocks[k][i] = op.entries
    x_start = None
    if problem.primal_start is not None:
        x_start = [problem.primal_start[n].entries for n in names]
    y_start = problem.dual_start if sign > 0 else None
    raw = _solver.interior_point(
        dims, c_blocks, f_blocks, b, tol=tol, max_iter=max_iter,
        x_start=x_start, y_start=y_start,
    )
    primal_blocks = {
        n: HermitianOperator(spaces[n], x) for n, x in zip(names, raw["X"])
    }
    pval = sign * raw["primal_value"] + problem.offset
    dval = sign * raw["dual_value"] + problem.offset
    mults = tuple(float(sign * v) for v in raw["y"])
    status = raw["status"]
    if status == _solver.STATUS_OPTIMAL:
        status = _verify_optimal(problem, primal_blocks, raw, tol) or status
    return SolveReport(
        status=status,
        primal_value=pval,
        dual_value=dval,
        gap=abs(pval - dval),
        primal_blocks=primal_blocks,
        dual_multipliers=mults,
        iterations=raw["iterations"],
        tol=tol,
    )


def _verify_optimal(problem, primal_blocks, raw, tol):
    """Re-verify the optimal-status contract; downgrade on violation."""
    for n, op in primal_blocks.items():
        if min_eigenvalue(op) < -FEASIBILITY_TOL:
            return _solver.STATUS_NUMERICAL
    for k, con in enumerate(problem.constraints):
        val = sum(inner(op, primal_blocks[n]) for n, op in con.coeffs.items())
        if abs(val - con.rhs) > FEASIBILITY_TOL * max(1.0, abs(con.rhs)):
            return _solver.STATUS_NUMERICAL
    return None


# -- duality checks ----------------------------------------------------------------


def check_weak_duality(problem: SdpProblem, primal_blocks: dict, dual_multipliers):
    """Evaluate a feasible primal/dual pair and assert weak duality.

    Returns ``(primal objective, dual objective)``.  Raises with the
    offending constraint or block when either point is infeasible
    beyond ``1e-8``.
    """
    spaces = dict(problem.blocks)
    for n in problem.block_names:
        if n not in primal_blocks:
            raise ValidationError(f"primal point is missing block {n!r}")
        lo = min_eigenvalue(align(primal_blocks[n], spaces[n]))
        if lo < -FEASIBILITY_TOL:
            raise ValidationError(
                f"primal block {n!r} is not PSD: min eigenvalue {lo:.3e}"
            )
    for k, con in enumerate(problem.constraints):
        val = sum(inner(op, primal_blocks[n]) for n, op in con.coeffs.items())
        resid = abs(val - con.rhs)
        if resid > FEASIBILITY_TOL * max(1.0, abs(con.rhs)):
            raise ValidationError(
                f"primal point violates constraint {k}: residual {resid:.3e}"
            )
    y = np.asarray(dual_multipliers, dtype=float)
    if y.shape != (len(problem.constraints),):
        raise ValidationError("dual multiplier count does not match the constraints")
    sign = -1.0 if problem.sense == "min" else 1.0
    for n in problem.block_names:
        d = spaces[n].dim
        slack = np.zeros((d, d), dtype=np.complex128)
        for i, con in enumerate(problem.constraints):
            op = con.coeffs.get(n)
            if op is not None:
                slack += sign * y[i] * op.entries
        cop = problem.objective.get(n)
        if cop is not None:
            slack -= sign * cop.entries
        lo = float(np.linalg.eigvalsh((slack + slack.conj().T) / 2)[0])
        if lo < -FEASIBILITY_TOL:
            raise ValidationError(
                f"dual point has negative slack on block {n!r}: min eigenvalue {lo:.3e}"
            )
    pval = (
        sum(inner(op, primal_blocks[n]) for n, op in problem.objective.items())
        + problem.offset
    )
    dval = (
        float(sum(y[i] * con.rhs for i, con in enumerate(problem.constraints)))
        + problem.offset
    )
    if problem.sense == "max":
        if pval > dval + WEAK_DUALITY_SLACK:
            raise ValidationError(
                f"weak duality violated: primal {pval!r} > dual {dval!r}"
            )
    else:
        if pval < dval - WEAK_DUALITY_SLACK:
            raise ValidationError(
                f"weak duality violated: primal {pval!r} < dual {dval!r}"
            )
    return pval, dval


def lift_chain_block(g: OutcomeOperators, j: int, block: HermitianOperator) -> HermitianOperator:
    """Embed a chain block ``Y_j (x) I`` on the level-``j`` inequality space."""
    target = _block_space(g, j)
    id_y = identity(g.spaces.restrict(g.y_rounds[j - 1]))
    return align(kron(block, id_y), target)


def check_dual_feasibility(
    g: OutcomeOperators,
    objective: HermitianOperator,
    w: DualWitness,
    tol: float = 1e-9,
) -> FeasibilityReport:
    """Evaluate every chain inequality of a dual witness.

    Returns the per-constraint minimum eigenvalues; the witness is
    feasible iff all are at least ``-tol``, in which case ``Tr(Y)`` is a
    certified upper bound on the primal optimum by weak duality.
    """
    _check_objective(g, objective)
    if w.rounds != g.rounds:
        raise SpaceError(f"witness has {w.rounds} rounds, game has {g.rounds}")
    chain = w.chain()
    for j, block in enumerate(chain, start=1):
        want = sorted(_family_space(g, j).labels)
        if sorted(block.spaces.labels) != want:
            raise SpaceError(
                f"witness block {j} labels {sorted(block.spaces.labels)} do not match "
                f"the chain space {want}"
            )
    eigs = []
    for j in range(1, g.rounds + 1):
        expr = lift_chain_block(g, j, chain[j - 1])
        if j < g.rounds:
            reduced = partial_trace(chain[j], set(g.x_rounds[j]))
            expr = expr - align(reduced, expr.spaces)
        else:
            expr = expr - align(objective, expr.spaces)
        eigs.append(min_eigenvalue(expr))
    feasible = all(e >= -tol for e in eigs)
    return FeasibilityReport(
        feasible=feasible,
        constraint_min_eigenvalues=tuple(eigs),
        value=w.value,
        tol=tol,
    )


def dual_witness_from_report(
    g: OutcomeOperators, problem: SdpProblem, report: SolveReport, meta=None
) -> DualWitness:
    """Reconstruct chain-form dual blocks from a solved compiled primal."""
    if not problem.families:
        raise DomainError("problem carries no scalarization metadata")
    y = np.asarray(report.dual_multipliers, dtype=float)
    chain = []
    for fam in problem.families:
        coeffs = y[fam.offset : fam.offset + fam.count]
        chain.append(operator_from_coefficients(coeffs, fam.spaces))
    return DualWitness(
        rounds=g.rounds,
        Y=chain[0],
        Y_blocks=tuple(chain[1:]),
        meta=dict(meta or {}),
    )


def repair_witness(
    g: OutcomeOperators,
    objective: HermitianOperator,
    w: DualWitness,
    margin: float = 1e-11,
) -> DualWitness:
    """Shift chain blocks by identity multiples until every inequality
    holds with at least ``margin`` slack (solver output is feasible only
    up to its tolerance; tensor constructions need a strict input)."""
    chain = list(w.chain())
    for j in range(g.rounds, 0, -1):
        expr = lift_chain_block(g, j, chain[j - 1])
        if j < g.rounds:
            reduced = partial_trace(chain[j], set(g.x_rounds[j]))
            expr = expr - align(reduced, expr.spaces)
        else:
            expr = expr - align(objective, expr.spaces)
        lo = min_eigenvalue(expr)
        if lo < margin:
            chain[j - 1] = chain[j - 1] + identity(chain[j - 1].spaces) * (margin - lo)
    return DualWitness(
        rounds=w.rounds, Y=chain[0], Y_blocks=tuple(chain[1:]), meta=dict(w.meta)
    )
