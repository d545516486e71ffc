"""Growth-rate bound sequences, sandwich aggregation, and lift equality checks.

Product convention used everywhere: the word (i_1, ..., i_n) denotes
A_{i_n} ... A_{i_1} -- new letters multiply on the LEFT, the first letter
is applied first.

For each length n, the norm bound is sup ||product||^(1/n) over the words
of a class, and the spectral bound is sup rho(product)^(1/n); the
supremum over an empty word set is 0 by convention, with the emptiness
recorded separately so that "0 because no words" and "0 because all
products vanish" stay distinguishable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from markovjsr.core import (
    MatrixSet,
    TransitionMatrix,
    ValidationError,
    WordClass,
    validate_instance,
)
from markovjsr.lift import (
    LiftedSet,
    factor_product_dense,
    factor_product_structure,
    lift_set,
)
from markovjsr.linalg import (
    DEFAULT_REL_TOL,
    NormKind,
    block_norm,
    operator_norm,
    spectral_radii,
)
from markovjsr.words import TransitionDigraph, classify, enumerate_words

__all__ = [
    "BoundKind",
    "BoundSequencePoint",
    "rho_n",
    "rho_hat_n",
    "rho_n_lifted",
    "rho_hat_n_lifted",
    "LiftEqualityCheck",
    "verify_lift_equalities",
    "CrossBound",
    "SandwichReport",
    "sandwich",
    "classical_bounds",
    "alternative_class_chain",
    "FactorStructureAudit",
    "audit_factor_structure",
    "ClassChainCheck",
    "VerificationReport",
    "full_verification",
]

# Word products buffered per vectorized spectral-radius call; keeps the
# streams lazy while amortizing the iteration over many small matrices.
SPECTRAL_CHUNK = 2048


class BoundKind(Enum):
    NORM = "norm"
    SPECTRAL = "spectral"


@dataclass(frozen=True)
class BoundSequencePoint:
    """One finite-length bound value.

    ``lifted`` points range over every word of the given length on the
    lifted family (their word set is never empty and they are tagged with
    the CHAIN class of the complete digraph); unlifted points range over
    the words of ``word_class``.
    """

    n: int
    value: float
    kind: BoundKind
    word_class: WordClass
    lifted: bool
    empty_word_set: bool

    def __post_init__(self):
        if self.empty_word_set and self.value != 0.0:
            raise ValidationError("an empty word set must report the bound 0")


def _check_length(n: int) -> None:
    if n < 1:
        raise ValidationError(f"word length must be positive, got {n}")


def _word_products(
    members: Sequence[np.ndarray],
    successors: Sequence[Sequence[int]],
    n: int,
) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield (first, last, product) over chain words in lexicographic order.

    Depth-first with one left-multiplication per tree node, so shared
    prefixes share their partial products.
    """
    size = len(members)

    def walk(first: int, last: int, depth: int, product: np.ndarray):
        if depth == n:
            yield first, last, product
            return
        for nxt in successors[last - 1]:
            yield from walk(first, nxt, depth + 1, members[nxt - 1] @ product)

    for start in range(1, size + 1):
        yield from walk(start, start, 1, members[start - 1])


class _SpectralMax:
    """Running maximum of spectral radii over a stream of products."""

    def __init__(self, rel_tol: float):
        self.rel_tol = rel_tol
        self.buffer: list[np.ndarray] = []
        self.best = 0.0

    def add(self, product: np.ndarray) -> None:
        self.buffer.append(product)
        if len(self.buffer) >= SPECTRAL_CHUNK:
            self.flush()

    def flush(self) -> float:
        if self.buffer:
            radii = spectral_radii(np.stack(self.buffer), rel_tol=self.rel_tol)
            self.best = max(self.best, float(radii.max()))
            self.buffer.clear()
        return self.best


@dataclass
class _LengthSweep:
    """Per-class accumulators from one pass over the chain words of a length."""

    counts: dict
    norm_sup: dict
    spectral_sup: dict


def _sweep_length(
    matrices: MatrixSet,
    omega: TransitionMatrix,
    n: int,
    norm: NormKind,
    spectral_classes: tuple[WordClass, ...] = (),
    rel_tol: float = DEFAULT_REL_TOL,
) -> _LengthSweep:
    """Walk the chain words of length n once, accumulating every class.

    Membership of each word in the stronger classes is an O(1) check on
    its first and last letters, so a single pass serves all four norm
    suprema; spectral radii are computed in batches for the requested
    classes only.
    """
    dg = TransitionDigraph.from_omega(omega)
    counts = {c: 0 for c in WordClass}
    norm_sup = {c: 0.0 for c in WordClass}
    spectral = {c: _SpectralMax(rel_tol) for c in spectral_classes}
    for first, last, product in _word_products(matrices.members, dg.successors, n):
        value = operator_norm(product, norm)
        membership = (
            (WordClass.CHAIN, True),
            (WordClass.MARKOV, dg.has_out_edge[last - 1]),
            (WordClass.INFINITELY_EXTENDABLE, dg.can_reach_cycle[last - 1]),
            (WordClass.PERIODICALLY_EXTENDABLE, omega.allows(last, first)),
        )
        for cls, member in membership:
            if member:
                counts[cls] += 1
                if value > norm_sup[cls]:
                    norm_sup[cls] = value
                if cls in spectral:
                    spectral[cls].add(product)
    return _LengthSweep(
        counts=counts,
        norm_sup=norm_sup,
        spectral_sup={c: acc.flush() for c, acc in spectral.items()},
    )


def rho_n(
    matrices: MatrixSet,
    omega: TransitionMatrix,
    n: int,
    word_class: WordClass = WordClass.MARKOV,
    norm: NormKind = NormKind.ROWSUM,
) -> BoundSequencePoint:
    """Norm bound: sup over length-n words of the class of ||product||^(1/n)."""
    validate_instance(matrices, omega)
    _check_length(n)
    sweep = _sweep_length(matrices, omega, n, norm)
    empty = sweep.counts[word_class] == 0
    value = 0.0 if empty else sweep.norm_sup[word_class] ** (1.0 / n)
    return BoundSequencePoint(
        n=n, value=value, kind=BoundKind.NORM, word_class=word_class,
        lifted=False, empty_word_set=empty,
    )


def rho_hat_n(
    matrices: MatrixSet,
    omega: TransitionMatrix,
    n: int,
    word_class: WordClass = WordClass.PERIODICALLY_EXTENDABLE,
    rel_tol: float = DEFAULT_REL_TOL,
) -> BoundSequencePoint:
    """Spectral bound: sup over length-n words of the class of rho(product)^(1/n).

    The periodic and Markov classes are the ones the bound chain reports;
    the computation is well-defined for any class.
    """
    validate_instance(matrices, omega)
    _check_length(n)
    sweep = _sweep_length(matrices, omega, n, NormKind.ROWSUM, (word_class,), rel_tol)
    empty = sweep.counts[word_class] == 0
    value = 0.0 if empty else sweep.spectral_sup[word_class] ** (1.0 / n)
    return BoundSequencePoint(
        n=n, value=value, kind=BoundKind.SPECTRAL, word_class=word_class,
        lifted=False, empty_word_set=empty,
    )


def _free_successors(size: int) -> tuple[tuple[int, ...], ...]:
    everyone = tuple(range(1, size + 1))
    return tuple(everyone for _ in range(size))


def rho_n_lifted(
    lifted: LiftedSet,
    n: int,
    norm: NormKind = NormKind.ROWSUM,
    engine: str = "structured",
) -> BoundSequencePoint:
    """Norm bound over ALL length-n words on the lifted family.

    engine='structured' uses the rank-one factor algebra: products vanish
    off the admissible words and otherwise repeat the base product down a
    single block column, so the supremum equals the admissible-class
    supremum on the base family.  engine='dense' multiplies the full block
    matrices for every word of the complete alphabet and takes the block
    norm; it is the independent slow path used for verification.
    """
    _check_length(n)
    if engine == "structured":
        base_point = rho_n(lifted.base, lifted.omega, n, WordClass.MARKOV, norm)
        value = base_point.value
    elif engine == "dense":
        best = 0.0
        free = _free_successors(lifted.blocks)
        for _, _, product in _word_products(lifted.members, free, n):
            v = block_norm(product, lifted.blocks, lifted.block_dim, norm)
            if v > best:
                best = v
        value = best ** (1.0 / n)
    else:
        raise ValidationError(f"unknown product engine {engine!r}")
    return BoundSequencePoint(
        n=n, value=value, kind=BoundKind.NORM, word_class=WordClass.CHAIN,
        lifted=True, empty_word_set=False,
    )


def rho_hat_n_lifted(
    lifted: LiftedSet,
    n: int,
    engine: str = "structured",
    rel_tol: float = DEFAULT_REL_TOL,
) -> BoundSequencePoint:
    """Spectral bound over ALL length-n words on the lifted family.

    Only periodically extendable words can contribute: forbidden words
    give the zero product and admissible non-periodic ones give a single
    off-diagonal block column, hence a nilpotent product.
    """
    _check_length(n)
    if engine == "structured":
        base_point = rho_hat_n(
            lifted.base, lifted.omega, n, WordClass.PERIODICALLY_EXTENDABLE, rel_tol
        )
        value = base_point.value
    elif engine == "dense":
        acc = _SpectralMax(rel_tol)
        free = _free_successors(lifted.blocks)
        for _, _, product in _word_products(lifted.members, free, n):
            acc.add(product)
        value = acc.flush() ** (1.0 / n)
    else:
        raise ValidationError(f"unknown product engine {engine!r}")
    return BoundSequencePoint(
        n=n, value=value, kind=BoundKind.SPECTRAL, word_class=WordClass.CHAIN,
        lifted=True, empty_word_set=False,
    )


@dataclass(frozen=True)
class LiftEqualityCheck:
    """Two-sided evaluation of the lift equalities at one length.

    The lifted side is computed with the dense engine over the complete
    alphabet, the constrained side by class-filtered enumeration, so the
    two columns share no shortcut.
    """

    n: int
    norm_lifted: float
    norm_constrained: float
    spectral_lifted: float
    spectral_periodic: float
    norm_tol: float
    spectral_tol: float

    @property
    def norm_diff(self) -> float:
        return abs(self.norm_lifted - self.norm_constrained)

    @property
    def spectral_diff(self) -> float:
        return abs(self.spectral_lifted - self.spectral_periodic)

    @property
    def max_abs_diff(self) -> float:
        return max(self.norm_diff, self.spectral_diff)

    @property
    def norm_ok(self) -> bool:
        scale = 1.0 + max(abs(self.norm_lifted), abs(self.norm_constrained))
        return self.norm_diff <= self.norm_tol * scale

    @property
    def spectral_ok(self) -> bool:
        scale = 1.0 + max(abs(self.spectral_lifted), abs(self.spectral_periodic))
        return self.spectral_diff <= self.spectral_tol * scale

    @property
    def passed(self) -> bool:
        return self.norm_ok and self.spectral_ok


def verify_lift_equalities(
    matrices: MatrixSet,
    omega: TransitionMatrix,
    n: int,
    norm: NormKind = NormKind.ROWSUM,
    norm_tol: float = 1e-9,
    spectral_tol: float = 1e-7,
    rel_tol: float = DEFAULT_REL_TOL,
) -> LiftEqualityCheck:
    """Check the two lift equalities at length n by computing all four sides.

    The spectral tolerance defaults looser than the norm one because both
    spectral columns come out of an iterative radius computation.
    """
    validate_instance(matrices, omega)
    _check_length(n)
    lifted = lift_set(matrices, omega)
    return LiftEqualityCheck(
        n=n,
        norm_lifted=rho_n_lifted(lifted, n, norm, engine="dense").value,
        norm_constrained=rho_n(matrices, omega, n, WordClass.MARKOV, norm).value,
        spectral_lifted=rho_hat_n_lifted(lifted, n, engine="dense", rel_tol=rel_tol).value,
        spectral_periodic=rho_hat_n(
            matrices, omega, n, WordClass.PERIODICALLY_EXTENDABLE, rel_tol
        ).value,
        norm_tol=norm_tol,
        spectral_tol=spectral_tol,
    )


@dataclass(frozen=True)
class CrossBound:
    """Chain-class bound against the one-step-shorter admissible bound.

    chain_value is the chain-class norm bound at length n and cap is
    alpha^(1/n) * (admissible bound at n-1)^((n-1)/n); dropping the last
    factor of a chain word leaves an admissible word, which is what makes
    cap an upper bound.
    """

    n: int
    chain_value: float
    cap: float

    @property
    def slack(self) -> float:
        return self.cap - self.chain_value

    @property
    def ok(self) -> bool:
        return self.chain_value <= self.cap * (1.0 + 1e-12) + 1e-300


@dataclass(frozen=True, eq=False)
class SandwichReport:
    """Per-length bound pairs and their best aggregates.

    best_upper is the running minimum of the upper norm bounds (their
    n-th powers are sub-multiplicative in n, so the infimum equals the
    limit); best_lower is the running maximum of the periodic spectral
    bounds.  alpha is the largest member norm, used by the cross bounds.
    """

    points: tuple[BoundSequencePoint, ...]
    best_lower: float
    best_lower_n: int
    best_upper: float
    best_upper_n: int
    gap: float
    alpha: float
    cross_bounds: tuple[CrossBound, ...]
    norm: NormKind
    n_max: int
    upper_class: WordClass

    def upper_points(self) -> tuple[BoundSequencePoint, ...]:
        return tuple(p for p in self.points if p.kind is BoundKind.NORM)

    def lower_points(self) -> tuple[BoundSequencePoint, ...]:
        return tuple(p for p in self.points if p.kind is BoundKind.SPECTRAL)


def sandwich(
    matrices: MatrixSet,
    omega: TransitionMatrix,
    n_max: int,
    norm: NormKind = NormKind.ROWSUM,
    rel_tol: float = DEFAULT_REL_TOL,
    upper_class: WordClass = WordClass.MARKOV,
) -> SandwichReport:
    """Two-sided bounds on the constrained growth rate for n = 1..n_max.

    Upper side: norm bounds over the admissible class (by default); lower
    side: spectral bounds over periodically extendable words.  Every
    report also carries the per-length chain-class cross bound.  A lower
    aggregate exceeding the upper one (beyond iteration noise) cannot
    happen mathematically and raises RuntimeError.

    upper_class may be CHAIN, MARKOV, or INFINITELY_EXTENDABLE: those word
    sets split under concatenation, so their running minimum certifiably
    stays above the growth rate.  The periodic class does not qualify (its
    word set can be empty at individual lengths, putting the norm bound
    below the rate), so it is rejected here; per-length periodic values
    are available through alternative_class_chain.
    """
    validate_instance(matrices, omega)
    _check_length(n_max)
    if upper_class is WordClass.PERIODICALLY_EXTENDABLE:
        raise ValidationError(
            "periodic-class norm bounds can undershoot the growth rate at fixed "
            "lengths and cannot serve as upper bounds; tabulate them with the "
            "class-chain view instead"
        )
    points: list[BoundSequencePoint] = []
    upper_vals: list[float] = []
    lower_vals: list[float] = []
    markov_vals: list[float] = []
    chain_vals: list[float] = []
    for n in range(1, n_max + 1):
        sweep = _sweep_length(
            matrices, omega, n, norm,
            (WordClass.PERIODICALLY_EXTENDABLE,), rel_tol,
        )
        up_empty = sweep.counts[upper_class] == 0
        up_val = 0.0 if up_empty else sweep.norm_sup[upper_class] ** (1.0 / n)
        lo_empty = sweep.counts[WordClass.PERIODICALLY_EXTENDABLE] == 0
        lo_val = (
            0.0 if lo_empty
            else sweep.spectral_sup[WordClass.PERIODICALLY_EXTENDABLE] ** (1.0 / n)
        )
        points.append(BoundSequencePoint(
            n=n, value=up_val, kind=BoundKind.NORM, word_class=upper_class,
            lifted=False, empty_word_set=up_empty,
        ))
        points.append(BoundSequencePoint(
            n=n, value=lo_val, kind=BoundKind.SPECTRAL,
            word_class=WordClass.PERIODICALLY_EXTENDABLE,
            lifted=False, empty_word_set=lo_empty,
        ))
        upper_vals.append(up_val)
        lower_vals.append(lo_val)
        markov_vals.append(
            0.0 if sweep.counts[WordClass.MARKOV] == 0
            else sweep.norm_sup[WordClass.MARKOV] ** (1.0 / n)
        )
        chain_vals.append(
            0.0 if sweep.counts[WordClass.CHAIN] == 0
            else sweep.norm_sup[WordClass.CHAIN] ** (1.0 / n)
        )
    alpha = max(operator_norm(m, norm) for m in matrices.members)
    cross = tuple(
        CrossBound(
            n=n,
            chain_value=chain_vals[n - 1],
            cap=alpha ** (1.0 / n) * markov_vals[n - 2] ** ((n - 1.0) / n),
        )
        for n in range(2, n_max + 1)
    )
    best_upper = min(upper_vals)
    best_upper_n = upper_vals.index(best_upper) + 1
    best_lower = max(lower_vals)
    best_lower_n = lower_vals.index(best_lower) + 1
    if best_lower > best_upper + 1e-9 * (1.0 + abs(best_upper)):
        raise RuntimeError(
            f"sandwich violated: lower bound {best_lower} exceeds upper bound {best_upper}"
        )
    return SandwichReport(
        points=tuple(points),
        best_lower=best_lower,
        best_lower_n=best_lower_n,
        best_upper=best_upper,
        best_upper_n=best_upper_n,
        gap=best_upper - best_lower,
        alpha=alpha,
        cross_bounds=cross,
        norm=norm,
        n_max=n_max,
        upper_class=upper_class,
    )


def classical_bounds(
    matrices: MatrixSet,
    n_max: int,
    norm: NormKind = NormKind.ROWSUM,
    rel_tol: float = DEFAULT_REL_TOL,
) -> SandwichReport:
    """Unconstrained sandwich: every transition allowed."""
    return sandwich(
        matrices, TransitionMatrix.complete(matrices.size), n_max,
        norm=norm, rel_tol=rel_tol,
    )


def alternative_class_chain(
    matrices: MatrixSet,
    omega: TransitionMatrix,
    n: int,
    norm: NormKind = NormKind.ROWSUM,
) -> tuple[BoundSequencePoint, BoundSequencePoint, BoundSequencePoint, BoundSequencePoint]:
    """Norm bounds for the four classes at one length, weakest-class last.

    Ordered (periodic, infinite, admissible, chain); containment of the
    word sets makes the values nondecreasing left to right.
    """
    validate_instance(matrices, omega)
    _check_length(n)
    sweep = _sweep_length(matrices, omega, n, norm)
    ordered = (
        WordClass.PERIODICALLY_EXTENDABLE,
        WordClass.INFINITELY_EXTENDABLE,
        WordClass.MARKOV,
        WordClass.CHAIN,
    )
    return tuple(
        BoundSequencePoint(
            n=n,
            value=0.0 if sweep.counts[cls] == 0 else sweep.norm_sup[cls] ** (1.0 / n),
            kind=BoundKind.NORM,
            word_class=cls,
            lifted=False,
            empty_word_set=sweep.counts[cls] == 0,
        )
        for cls in ordered
    )


@dataclass(frozen=True)
class FactorStructureAudit:
    """Outcome of checking the factor-product structure on chain words."""

    words_checked: int
    representation_ok: bool
    nonzero_iff_admissible_ok: bool
    diagonal_iff_periodic_ok: bool

    @property
    def passed(self) -> bool:
        return (
            self.representation_ok
            and self.nonzero_iff_admissible_ok
            and self.diagonal_iff_periodic_ok
        )


def audit_factor_structure(
    omega: TransitionMatrix, n_max: int
) -> FactorStructureAudit:
    """Compare structural and dense factor products on every chain word
    up to length n_max, in exact integer arithmetic."""
    _check_length(n_max)
    dg = TransitionDigraph.from_omega(omega)
    checked = 0
    rep_ok = nz_ok = diag_ok = True
    for n in range(1, n_max + 1):
        for word in enumerate_words(omega, n, WordClass.CHAIN):
            structure = factor_product_structure(omega, word)
            dense = factor_product_dense(omega, word)
            checked += 1
            if not np.array_equal(dense, structure.to_matrix(omega.size)):
                rep_ok = False
            classes = classify(word, omega, dg)
            if (not structure.is_zero) != (WordClass.MARKOV in classes):
                nz_ok = False
            periodic = WordClass.PERIODICALLY_EXTENDABLE in classes
            if periodic:
                if structure.diag_nonzero_at != word[0]:
                    diag_ok = False
                if dense[word[0] - 1, word[0] - 1] == 0:
                    diag_ok = False
            else:
                if structure.diag_nonzero_at is not None:
                    diag_ok = False
                if np.any(np.diag(dense) != 0):
                    diag_ok = False
    return FactorStructureAudit(
        words_checked=checked,
        representation_ok=rep_ok,
        nonzero_iff_admissible_ok=nz_ok,
        diagonal_iff_periodic_ok=diag_ok,
    )


@dataclass(frozen=True)
class ClassChainCheck:
    """Monotonicity of the four-class norm bounds at one length."""

    n: int
    values: tuple[float, float, float, float]  # periodic, infinite, admissible, chain

    @property
    def ok(self) -> bool:
        slack = tuple(1e-12 * (1.0 + abs(v)) for v in self.values)
        return all(
            self.values[i] <= self.values[i + 1] + slack[i + 1]
            for i in range(3)
        )


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Aggregate outcome of the numeric structure checks on one instance."""

    equality_checks: tuple[LiftEqualityCheck, ...]
    factor_audit: FactorStructureAudit
    class_chains: tuple[ClassChainCheck, ...]
    cross_bounds: tuple[CrossBound, ...]

    @property
    def passed(self) -> bool:
        return (
            all(t.passed for t in self.equality_checks)
            and self.factor_audit.passed
            and all(c.ok for c in self.class_chains)
            and all(c.ok for c in self.cross_bounds)
        )


def full_verification(
    matrices: MatrixSet,
    omega: TransitionMatrix,
    n_max: int,
    norm: NormKind = NormKind.ROWSUM,
    norm_tol: float = 1e-9,
    spectral_tol: float = 1e-7,
    rel_tol: float = DEFAULT_REL_TOL,
) -> VerificationReport:
    """Run the lift equalities, the factor-structure audit, the class-chain
    monotonicity, and the cross bounds for n = 1..n_max."""
    validate_instance(matrices, omega)
    _check_length(n_max)
    equalities = tuple(
        verify_lift_equalities(matrices, omega, n, norm, norm_tol, spectral_tol, rel_tol)
        for n in range(1, n_max + 1)
    )
    chains = []
    for n in range(1, n_max + 1):
        pts = alternative_class_chain(matrices, omega, n, norm)
        chains.append(ClassChainCheck(n=n, values=tuple(p.value for p in pts)))
    report = sandwich(matrices, omega, n_max, norm=norm, rel_tol=rel_tol)
    return VerificationReport(
        equality_checks=equalities,
        factor_audit=audit_factor_structure(omega, n_max),
        class_chains=tuple(chains),
        cross_bounds=report.cross_bounds,
    )
