"""Command-line interface: bounds, lift, verify, words, kstep-recode.

Exit codes are part of the contract: 0 success, 1 verification failure,
2 instance parse error, 3 validation error, 4 budget exceeded.
"""

from __future__ import annotations

import sys

import click

from markovjsr import __version__
from markovjsr.core import (
    MatrixSet,
    TransitionMatrix,
    ValidationError,
    WordClass,
)
from markovjsr.instancefile import (
    Instance,
    InstanceParseError,
    instance_document,
    load_instance,
    render_document,
    sig12,
)
from markovjsr.kstep import RecodedInstance, recode
from markovjsr.lift import lift_set
from markovjsr.linalg import NormKind
from markovjsr.radius import (
    alternative_class_chain,
    full_verification,
    sandwich,
)
from markovjsr.words import count_words, enumerate_words

DEFAULT_BUDGET = 10_000_000

_NORM_CHOICES = click.Choice([k.value for k in NormKind])
_CLASS_CHOICES = click.Choice([c.value for c in WordClass])
_FORMAT_CHOICES = click.Choice(["text", "json"])


class BudgetExceeded(RuntimeError):
    pass


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(body) -> None:
    try:
        body()
    except InstanceParseError as exc:
        _fail(2, str(exc))
    except ValidationError as exc:
        _fail(3, str(exc))
    except BudgetExceeded as exc:
        _fail(4, str(exc))


def _resolve(instance: Instance) -> tuple[MatrixSet, TransitionMatrix, RecodedInstance | None]:
    """The one-step pair to operate on, recoding an order-k block if present."""
    if instance.omega is not None:
        return instance.matrices, instance.omega, None
    rec = recode(instance.kstep, instance.matrices)
    return rec.matrices, rec.omega, rec


def _estimate_ops(omega: TransitionMatrix, n_max: int, lifted: bool = False) -> int:
    total = 0
    for n in range(1, n_max + 1):
        total += count_words(omega, n, WordClass.CHAIN) * n
        if lifted:
            total += (omega.size ** n) * n
    return total


def _check_budget(estimate: int, budget: int) -> None:
    if estimate > budget:
        raise BudgetExceeded(
            f"estimated {estimate} product operations exceed the budget {budget}; "
            "lower --n-max or raise --budget"
        )


def _report_head(command: str, instance: Instance, **kwargs) -> dict:
    head = {
        "tool": "markovjsr",
        "version": __version__,
        "command": command,
        "instance_digest": instance.digest,
    }
    head.update(kwargs)
    return head


def _emit(report: dict, fmt: str, text_renderer) -> None:
    if fmt == "json":
        click.echo(render_document(report), nl=False)
    else:
        for line in text_renderer(report):
            click.echo(line)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


@click.group()
@click.version_option(version=__version__, prog_name="markovjsr")
def main():
    """Growth-rate bounds for matrix products under transition constraints."""


# ---------------------------------------------------------------- bounds


def _bounds_text(report: dict):
    yield f"markovjsr bounds v{report['version']}"
    yield f"instance: {report['instance_digest']}"
    yield (
        f"norm={report['norm']} n_max={report['n_max']} "
        f"rel_tol={report['rel_tol']} class={report['word_class']}"
    )
    if report.get("recoded_from_kstep"):
        yield f"recoded from order-{report['kstep_order']} constraint ({report['state_count']} states)"
    if "class_chain" in report:
        yield f"{'n':>4}  {'periodic':>16} {'infinite':>16} {'markov':>16} {'chain':>16}"
        for row in report["class_chain"]:
            vals = " ".join(f"{_fmt(v):>16}" for v in row["values"])
            yield f"{row['n']:>4}  {vals}"
        return
    yield f"alpha: {_fmt(report['alpha'])}"
    yield f"{'n':>4}  {'kind':<9} {'class':<9} {'value':>16}  empty"
    for row in report["bounds"]:
        empty = "yes" if row["empty"] else ""
        yield f"{row['n']:>4}  {row['kind']:<9} {row['class']:<9} {_fmt(row['value']):>16}  {empty}"
    agg = report["aggregates"]
    yield f"best_upper: {_fmt(agg['best_upper'])} (n={agg['best_upper_n']})"
    yield f"best_lower: {_fmt(agg['best_lower'])} (n={agg['best_lower_n']})"
    yield f"gap: {_fmt(agg['gap'])}"
    ok = all(c["ok"] for c in report["cross_bounds"])
    yield f"cross_bounds: {'ok' if ok else 'VIOLATED'}"


@main.command("bounds")
@click.argument("instance_path", metavar="INSTANCE")
@click.option("--n-max", default=8, show_default=True, type=int, help="Largest word length.")
@click.option("--norm", default="rowsum", show_default=True, type=_NORM_CHOICES)
@click.option("--class", "word_class", default="markov", show_default=True, type=_CLASS_CHOICES,
              help="Word class for the upper norm bounds.")
@click.option("--class-chain", is_flag=True, help="Tabulate all four class bounds per length instead.")
@click.option("--tol", default=1e-9, show_default=True, type=float, help="Spectral iteration tolerance.")
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True, type=int,
              help="Cap on estimated product operations.")
@click.option("--format", "fmt", default="text", show_default=True, type=_FORMAT_CHOICES)
def cmd_bounds(instance_path, n_max, norm, word_class, class_chain, tol, budget, fmt):
    """Sandwich bounds (or per-class tables) for an instance file."""

    def body():
        instance = load_instance(instance_path)
        matrices, omega, rec = _resolve(instance)
        _check_budget(_estimate_ops(omega, n_max), budget)
        kind = NormKind(norm)
        head_extra = {
            "norm": norm,
            "n_max": n_max,
            "rel_tol": tol,
            "word_class": word_class,
            "recoded_from_kstep": rec is not None,
        }
        if rec is not None:
            head_extra["kstep_order"] = instance.kstep.k
            head_extra["state_count"] = len(rec.states)
        report = _report_head("bounds", instance, **head_extra)
        if class_chain:
            rows = []
            for n in range(1, n_max + 1):
                pts = alternative_class_chain(matrices, omega, n, kind)
                rows.append({
                    "n": n,
                    "values": [sig12(p.value) for p in pts],
                    "empty": [p.empty_word_set for p in pts],
                })
            report["class_chain"] = rows
        else:
            result = sandwich(
                matrices, omega, n_max,
                norm=kind, rel_tol=tol, upper_class=WordClass(word_class),
            )
            report["alpha"] = sig12(result.alpha)
            report["bounds"] = [
                {
                    "n": p.n,
                    "class": p.word_class.value,
                    "kind": p.kind.value,
                    "value": sig12(p.value),
                    "empty": p.empty_word_set,
                }
                for p in result.points
            ]
            report["aggregates"] = {
                "best_lower": sig12(result.best_lower),
                "best_lower_n": result.best_lower_n,
                "best_upper": sig12(result.best_upper),
                "best_upper_n": result.best_upper_n,
                "gap": sig12(result.gap),
            }
            report["cross_bounds"] = [
                {
                    "n": c.n,
                    "chain_value": sig12(c.chain_value),
                    "cap": sig12(c.cap),
                    "ok": c.ok,
                }
                for c in result.cross_bounds
            ]
        _emit(report, fmt, _bounds_text)

    _guarded(body)


# ------------------------------------------------------------------ lift


def _lift_text(report: dict):
    yield f"markovjsr lift v{report['version']}"
    yield f"instance: {report['instance_digest']}"
    yield (
        f"blocks={report['lift_blocks']} block_dim={report['lift_block_dim']} "
        f"lifted_dimension={report['dimension']}"
    )
    for pos, factor in enumerate(report["lift_factors"], start=1):
        yield f"factor {pos}:"
        for row in factor:
            yield "  " + " ".join(str(v) for v in row)
    for pos, member in enumerate(report["matrices"], start=1):
        yield f"lifted member {pos}:"
        for row in member:
            yield "  " + " ".join(
                (_fmt(e) if not isinstance(e, list) else f"[{_fmt(e[0])},{_fmt(e[1])}]")
                for e in row
            )


@main.command("lift")
@click.argument("instance_path", metavar="INSTANCE")
@click.option("--format", "fmt", default="json", show_default=True, type=_FORMAT_CHOICES)
def cmd_lift(instance_path, fmt):
    """Emit the transition lift as a classical (all-transitions) instance.

    The output is itself a valid instance file: N block matrices of
    dimension N*d with the complete transition matrix, ready to feed back
    into `bounds`.
    """

    def body():
        instance = load_instance(instance_path)
        if instance.omega is None:
            raise ValidationError("lift needs an instance with an explicit transition matrix")
        lifted = lift_set(instance.matrices, instance.omega)
        lifted_family = MatrixSet(
            dim=lifted.blocks * lifted.block_dim,
            members=lifted.members,
            field_tag=instance.matrices.field_tag,
        )
        doc = instance_document(
            lifted_family,
            omega=TransitionMatrix.complete(lifted.blocks),
            extra={
                "lift_factors": [[[int(v) for v in row] for row in f] for f in lifted.factors],
                "lift_blocks": lifted.blocks,
                "lift_block_dim": lifted.block_dim,
            },
        )
        report = _report_head("lift", instance)
        report.update(doc)
        if fmt == "json":
            click.echo(render_document(doc), nl=False)
        else:
            for line in _lift_text(report):
                click.echo(line)

    _guarded(body)


# ---------------------------------------------------------------- verify


def _verify_text(report: dict):
    yield f"markovjsr verify v{report['version']}"
    yield f"instance: {report['instance_digest']}"
    yield f"norm={report['norm']} n_max={report['n_max']} norm_tol={report['norm_tol']} spectral_tol={report['spectral_tol']}"
    yield f"{'n':>4}  {'norm_lifted':>16} {'norm_markov':>16} {'spec_lifted':>16} {'spec_periodic':>16}  ok"
    for row in report["lift_equalities"]:
        yield (
            f"{row['n']:>4}  {_fmt(row['norm_lifted']):>16} {_fmt(row['norm_constrained']):>16} "
            f"{_fmt(row['spectral_lifted']):>16} {_fmt(row['spectral_periodic']):>16}  "
            f"{'yes' if row['ok'] else 'NO'}"
        )
    fs = report["factor_structure"]
    yield (
        f"factor structure: {fs['words_checked']} chain words, "
        f"representation={'ok' if fs['representation_ok'] else 'FAIL'} "
        f"nonzero-iff-admissible={'ok' if fs['nonzero_iff_admissible_ok'] else 'FAIL'} "
        f"diagonal-iff-periodic={'ok' if fs['diagonal_iff_periodic_ok'] else 'FAIL'}"
    )
    chain_ok = all(c["ok"] for c in report["class_chain_monotone"])
    yield f"class chain monotone: {'ok' if chain_ok else 'FAIL'}"
    cross_ok = all(c["ok"] for c in report["cross_bounds"])
    yield f"cross bounds: {'ok' if cross_ok else 'FAIL'}"
    if report.get("claimed_lift_matches") is not None:
        yield f"claimed lift matches: {'yes' if report['claimed_lift_matches'] else 'NO'}"
    yield f"verdict: {'PASS' if report['passed'] else 'FAIL'}"


def _claimed_lift_matches(instance: Instance, claimed_path: str) -> bool:
    import numpy as np

    claimed = load_instance(claimed_path)
    lifted = lift_set(instance.matrices, instance.omega)
    if claimed.matrices.size != len(lifted.members):
        return False
    if claimed.matrices.dim != lifted.blocks * lifted.block_dim:
        return False
    return all(
        np.allclose(have, want, rtol=0.0, atol=0.0)
        for have, want in zip(claimed.matrices.members, lifted.members)
    )


@main.command("verify")
@click.argument("instance_path", metavar="INSTANCE")
@click.option("--n-max", default=4, show_default=True, type=int)
@click.option("--norm", default="rowsum", show_default=True, type=_NORM_CHOICES)
@click.option("--tol", default=1e-9, show_default=True, type=float,
              help="Spectral iteration tolerance (equality checks use 1e-9/1e-7 scaled).")
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True, type=int)
@click.option("--claimed-lift", default=None, type=str,
              help="Instance file claimed to be the lift of INSTANCE; compared entrywise.")
@click.option("--format", "fmt", default="text", show_default=True, type=_FORMAT_CHOICES)
def cmd_verify(instance_path, n_max, norm, tol, budget, claimed_lift, fmt):
    """Check the lift equalities and structural facts on an instance."""

    def body():
        instance = load_instance(instance_path)
        matrices, omega, rec = _resolve(instance)
        _check_budget(_estimate_ops(omega, n_max, lifted=True), budget)
        kind = NormKind(norm)
        outcome = full_verification(matrices, omega, n_max, norm=kind, rel_tol=tol)
        claimed_ok = None
        if claimed_lift is not None:
            if instance.omega is None:
                raise ValidationError("--claimed-lift needs an instance with an explicit transition matrix")
            claimed_ok = _claimed_lift_matches(instance, claimed_lift)
        passed = outcome.passed and claimed_ok is not False
        report = _report_head(
            "verify", instance,
            norm=norm, n_max=n_max, rel_tol=tol,
            norm_tol=1e-9, spectral_tol=1e-7,
            recoded_from_kstep=rec is not None,
        )
        report["lift_equalities"] = [
            {
                "n": t.n,
                "norm_lifted": sig12(t.norm_lifted),
                "norm_constrained": sig12(t.norm_constrained),
                "spectral_lifted": sig12(t.spectral_lifted),
                "spectral_periodic": sig12(t.spectral_periodic),
                "max_abs_diff": sig12(t.max_abs_diff),
                "ok": t.passed,
            }
            for t in outcome.equality_checks
        ]
        report["factor_structure"] = {
            "words_checked": outcome.factor_audit.words_checked,
            "representation_ok": outcome.factor_audit.representation_ok,
            "nonzero_iff_admissible_ok": outcome.factor_audit.nonzero_iff_admissible_ok,
            "diagonal_iff_periodic_ok": outcome.factor_audit.diagonal_iff_periodic_ok,
        }
        report["class_chain_monotone"] = [
            {"n": c.n, "values": [sig12(v) for v in c.values], "ok": c.ok}
            for c in outcome.class_chains
        ]
        report["cross_bounds"] = [
            {"n": c.n, "chain_value": sig12(c.chain_value), "cap": sig12(c.cap), "ok": c.ok}
            for c in outcome.cross_bounds
        ]
        report["claimed_lift_matches"] = claimed_ok
        report["passed"] = passed
        _emit(report, fmt, _verify_text)
        if not passed:
            sys.exit(1)

    _guarded(body)


# ----------------------------------------------------------------- words


def _words_text(report: dict):
    for word in report["words"]:
        yield " ".join(str(v) for v in word)
    agree = "ok" if report["counts_agree"] else "MISMATCH"
    yield f"count: {report['stream_count']} (transfer-matrix: {report['transfer_count']}, {agree})"


@main.command("words")
@click.argument("instance_path", metavar="INSTANCE")
@click.option("--n", default=4, show_default=True, type=int, help="Word length.")
@click.option("--class", "word_class", default="markov", show_default=True, type=_CLASS_CHOICES)
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True, type=int)
@click.option("--format", "fmt", default="text", show_default=True, type=_FORMAT_CHOICES)
def cmd_words(instance_path, n, word_class, budget, fmt):
    """Enumerate the length-n words of a class, with a count cross-check."""

    def body():
        instance = load_instance(instance_path)
        matrices, omega, rec = _resolve(instance)
        del matrices
        _check_budget(_estimate_ops(omega, n), budget)
        cls = WordClass(word_class)
        listed = list(enumerate_words(omega, n, cls))
        transfer = count_words(omega, n, cls)
        report = _report_head(
            "words", instance,
            n=n, word_class=word_class,
            recoded_from_kstep=rec is not None,
        )
        if rec is not None:
            report["states"] = [list(s) for s in rec.states]
        report["words"] = [list(w) for w in listed]
        report["stream_count"] = len(listed)
        report["transfer_count"] = transfer
        report["counts_agree"] = transfer == len(listed)
        _emit(report, fmt, _words_text)

    _guarded(body)


# ---------------------------------------------------------- kstep-recode


def _recode_text(report: dict):
    yield f"markovjsr kstep-recode v{report['version']}"
    yield f"states: {report['state_count']}"
    for pos, state in enumerate(report["states"], start=1):
        yield f"  {pos}: ({','.join(str(v) for v in state)})"
    yield "omega:"
    for row in report["omega"]:
        yield "  " + " ".join(str(v) for v in row)


@main.command("kstep-recode")
@click.argument("instance_path", metavar="INSTANCE")
@click.option("--format", "fmt", default="json", show_default=True, type=_FORMAT_CHOICES)
def cmd_kstep_recode(instance_path, fmt):
    """Recode an order-k instance into an explicit one-step instance file."""

    def body():
        instance = load_instance(instance_path)
        if instance.kstep is None:
            raise ValidationError("kstep-recode needs an instance with a kstep block")
        rec = recode(instance.kstep, instance.matrices)
        doc = instance_document(
            rec.matrices,
            omega=rec.omega,
            extra={"states": [list(s) for s in rec.states]},
        )
        if fmt == "json":
            click.echo(render_document(doc), nl=False)
        else:
            report = _report_head("kstep-recode", instance)
            report.update(doc)
            report["state_count"] = len(rec.states)
            for line in _recode_text(report):
                click.echo(line)

    _guarded(body)


if __name__ == "__main__":
    main()
