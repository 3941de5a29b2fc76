"""Command-line front end.

Exit status: 0 on success, 2 on malformed input, 3 when a size cap is hit.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import click

from . import __version__, curve_model
from .class_group import balanced_representative, degree_class_group
from .curve_model import CurveGraph
from .errors import CurveError, NonTermination, SearchExhausted, TooLarge, Unsupported
from .git_classifier import classify_regime, git_classify, is_geometric_quotient
from .hm_certificates import destabilizer_certificate, elliptic_tail_verdict
from .multidegree import LEVELS, Multidegree, enumerate_balanced, is_balanced
from .positivity import positivity_report
from .reductions import enumerate_models, ps_reduce, wps_reduce
from .strata import StratumPair, specialize_strictly, strata_poset

EXIT_INPUT = 2
EXIT_CAP = 3


@dataclass
class RunConfig:
    fmt: str = "text"
    max_vertices: int = curve_model.MAX_SCAN_VERTICES
    max_iterations: int | None = None
    seed: int = 0
    lines: list[str] = field(default_factory=list)


def _load_json(path: str, what: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CurveError(f"{what} {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CurveError(f"{what} {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_curve(path: str) -> CurveGraph:
    doc = _load_json(path, "curve file")
    try:
        return CurveGraph.from_document(doc)
    except CurveError as exc:
        raise CurveError(f"curve file {path}: {exc}") from None


def load_multidegree(path: str) -> Multidegree:
    doc = _load_json(path, "multidegree file")
    try:
        return Multidegree.from_document(doc)
    except CurveError as exc:
        raise CurveError(f"multidegree file {path}: {exc}") from None


def _yes(v: bool | None) -> str:
    return "undetermined" if v is None else ("yes" if v else "no")


def _emit(cfg: RunConfig, doc: dict[str, Any], text: Callable[[], list[str]]) -> None:
    if cfg.fmt == "json":
        doc = {"version": __version__, **doc}
        click.echo(json.dumps(doc, sort_keys=True, indent=2))
    else:
        for line in text():
            click.echo(line)


class _Group(click.Group):
    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except TooLarge as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_CAP)
        except (CurveError, SearchExhausted, NonTermination) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_INPUT)


@click.group(cls=_Group)
@click.option("--format", "fmt", type=click.Choice(["text", "json", "dot"]), default="text")
@click.option("--max-vertices", type=click.IntRange(min=1), default=curve_model.MAX_SCAN_VERTICES)
@click.option("--max-iterations", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=int, default=0)
@click.version_option(__version__)
@click.pass_context
def main(ctx: click.Context, fmt: str, max_vertices: int, max_iterations: int | None, seed: int) -> None:
    """Balanced multidegrees and GIT stability of polarized curves."""
    previous = curve_model.MAX_SCAN_VERTICES
    curve_model.MAX_SCAN_VERTICES = max_vertices
    ctx.call_on_close(lambda: setattr(curve_model, "MAX_SCAN_VERTICES", previous))
    ctx.obj = RunConfig(fmt=fmt, max_vertices=max_vertices, max_iterations=max_iterations, seed=seed)


@main.command()
@click.argument("curve")
@click.argument("multidegree")
@click.option("--g", "g", type=int, default=None)
@click.option("--d", "d", type=int, default=None)
@click.pass_obj
def classify(cfg: RunConfig, curve: str, multidegree: str, g: int | None, d: int | None) -> None:
    """GIT verdict and positivity of a multidegree on a curve."""
    X = load_curve(curve)
    dvec = load_multidegree(multidegree)
    g = X.genus if g is None else g
    d = dvec.total if d is None else d
    try:
        rep = git_classify(X, dvec, g, d)
        git_doc = rep.to_document()
        stab = rep.stabilizer_dim
        head = (
            f"semistable: {_yes(rep.semistable)}, polystable: {_yes(rep.polystable)}, "
            f"stable: {_yes(rep.stable)}, stabilizer dim: {stab if stab is not None else 'n/a'}"
        )
        reasons = list(rep.reasons)
    except Unsupported as exc:
        git_doc = {"regime": classify_regime(g, d).regime, "verdicts": None, "note": str(exc)}
        head = "semistable: undetermined, polystable: undetermined, stable: undetermined"
        reasons = [str(exc)]
    pos_doc = None
    pos_lines = []
    if is_balanced(X, dvec):
        pos = positivity_report(X, dvec, d)
        pos_doc = pos.to_document()
        for name, flag in pos.flags().items():
            pos_lines.append(f"  {name}: {_yes(flag.value)} ({flag.basis})")
        pos_lines.append(f"  k-very ample up to: {pos.k_very_ample_up_to} ({pos.k_basis})")
    else:
        pos_lines.append("  not computed: multidegree is not balanced")
    regime = git_doc["regime"]

    def text() -> list[str]:
        return [f"regime: {regime} (g={g}, d={d})", head] + [f"  reason: {r}" for r in reasons] + ["positivity:"] + pos_lines

    _emit(cfg, {"git": git_doc, "positivity": pos_doc}, text)


@main.command()
@click.argument("curve")
@click.option("--d", "d", type=int, required=True)
@click.option("--level", type=click.Choice(LEVELS), default="balanced")
@click.pass_obj
def balanced(cfg: RunConfig, curve: str, d: int, level: str) -> None:
    """All multidegrees of total d at the given balance level."""
    X = load_curve(curve)
    found = enumerate_balanced(X, d, level)  # type: ignore[arg-type]
    _emit(
        cfg,
        {"level": level, "d": d, "multidegrees": [m.to_document() for m in found]},
        lambda: [f"{len(found)} {level} multidegrees of total {d} on ({', '.join(X.ids)})"] + [str(m) for m in found],
    )


@main.command()
@click.argument("curve")
@click.option("--d", "d", type=int, default=None, help="total degree for sampled representatives")
@click.option("--sample", type=click.IntRange(min=0), default=0, help="random multidegrees to reduce")
@click.pass_obj
def classgroup(cfg: RunConfig, curve: str, d: int | None, sample: int) -> None:
    """Invariant factors of the degree class group; optionally balanced representatives of random classes."""
    X = load_curve(curve)
    grp = degree_class_group(X)
    reps = []
    if sample:
        if d is None:
            raise CurveError("--sample needs --d")
        rng = random.Random(cfg.seed)
        for _ in range(sample):
            cuts = sorted(rng.randint(-abs(d) - 5, abs(d) + 5) for _ in range(X.n - 1))
            vals = [b - a for a, b in zip([0] + cuts, cuts + [d])]
            src = Multidegree.on(X, vals)
            out = balanced_representative(X, src, cfg.max_iterations)
            reps.append((src, out))
    _emit(
        cfg,
        {
            "invariant_factors": list(grp.invariant_factors),
            "order": grp.order,
            "representatives": [{"input": a.to_document(), "balanced": b.to_document()} for a, b in reps],
        },
        lambda: [f"invariant factors: {list(grp.invariant_factors)}", f"order: {grp.order}"]
        + [f"{a} -> {b}" for a, b in reps],
    )


@main.command()
@click.argument("curve")
@click.option("--kind", type=click.Choice(["wps", "ps"]), default="wps")
@click.pass_obj
def reduce(cfg: RunConfig, curve: str, kind: str) -> None:
    """Contract exceptional components (and elliptic tails for ps)."""
    X = load_curve(curve)
    Y, cmap = (wps_reduce if kind == "wps" else ps_reduce)(X)

    def text() -> list[str]:
        out = [f"reduced curve: genus {Y.genus}, {Y.n} components"]
        out += [f"  {v.id}: genus {v.genus}, cusps {v.cusps}" for v in Y.vertices]
        out += [f"  edge {e.u}-{e.w} length {e.length}" for e in Y.edges]
        for c in cmap.contracted:
            kind_, where = c.target
            out.append(f"  contracted {c.vertex} -> {kind_} {'-'.join(where)}")
        return out

    _emit(cfg, {"curve": Y.to_document(), "contraction": cmap.to_document()}, text)


@main.command()
@click.argument("curve")
@click.option("--kind", type=click.Choice(["quasi_stable", "quasi_p_stable", "quasi_wp_stable"]), default="quasi_wp_stable")
@click.pass_obj
def models(cfg: RunConfig, curve: str, kind: str) -> None:
    """Quasi-models of a (w)p-stable curve up to isomorphism."""
    Y = load_curve(curve)
    found = enumerate_models(Y, kind)  # type: ignore[arg-type]
    _emit(
        cfg,
        {"kind": kind, "models": [X.to_document() for X in found]},
        lambda: [f"{len(found)} {kind} models"] + [X.to_json() for X in found],
    )


@main.command()
@click.argument("curve")
@click.option("--d", "d", type=int, required=True)
@click.option("--kind", type=click.Choice(["quasi_stable", "quasi_p_stable", "quasi_wp_stable"]), default="quasi_wp_stable")
@click.pass_obj
def strata(cfg: RunConfig, curve: str, d: int, kind: str) -> None:
    """Strata poset of properly balanced pairs over a curve, as DOT."""
    Y = load_curve(curve)
    poset = strata_poset(Y, d, kind)  # type: ignore[arg-type]
    if cfg.fmt == "json":
        doc = {
            "nodes": [{"curve": p.curve.to_document(), "multidegree": p.multidegree.to_document()} for p in poset.nodes],
            "covers": [list(c) for c in poset.covers],
        }
        _emit(cfg, doc, lambda: [])
    else:
        click.echo(poset.to_dot(), nl=False)


@main.command()
@click.argument("curve")
@click.argument("multidegree")
@click.pass_obj
def specialize(cfg: RunConfig, curve: str, multidegree: str) -> None:
    """Isotrivially specialize a properly balanced pair to a strictly balanced one."""
    X = load_curve(curve)
    dvec = load_multidegree(multidegree)
    final, steps = specialize_strictly(StratumPair(X, dvec))

    def text() -> list[str]:
        out = [f"{len(steps)} steps"]
        for s in steps:
            nodes = ", ".join("-".join(e) for e in s.blown_up_nodes)
            out.append(f"  Y={{{','.join(sorted(s.subcurve))}}} blow up {nodes} -> {s.result.multidegree}")
        out.append(f"final: {final.curve.to_json()} {final.multidegree}")
        return out

    doc = {
        "steps": [
            {
                "subcurve": sorted(s.subcurve),
                "blown_up_nodes": [list(e) for e in s.blown_up_nodes],
                "curve": s.result.curve.to_document(),
                "multidegree": s.result.multidegree.to_document(),
            }
            for s in steps
        ],
        "curve": final.curve.to_document(),
        "multidegree": final.multidegree.to_document(),
    }
    _emit(cfg, doc, text)


@main.command()
@click.argument("curve", required=False)
@click.argument("multidegree", required=False)
@click.option("--g", "g", type=int, default=None)
@click.option("--d", "d", type=int, default=None)
@click.pass_obj
def certify(cfg: RunConfig, curve: str | None, multidegree: str | None, g: int | None, d: int | None) -> None:
    """Elliptic-tail weight check for (g, d) and, given a pair, a destabilizing subcurve."""
    X = load_curve(curve) if curve else None
    dvec = load_multidegree(multidegree) if multidegree else None
    if X is not None and dvec is None:
        raise CurveError("a curve needs a multidegree")
    g = g if g is not None else (X.genus if X is not None else None)
    d = d if d is not None else (dvec.total if dvec is not None else None)
    if g is None or d is None:
        raise CurveError("give --g and --d or a curve and multidegree")
    tail = elliptic_tail_verdict(g, d)
    cert_doc = None
    lines = [f"elliptic tail: e={tail.e_rho}, w={tail.w_rho}, rhs={tail.rhs}: {tail.verdict}"]
    if X is not None and dvec is not None:
        try:
            cert = destabilizer_certificate(X, dvec, g, d)
        except Unsupported as exc:
            cert = None
            lines.append(f"certificate: undetermined ({exc})")
        else:
            if cert is None:
                lines.append("certificate: none (no destabilizing subcurve)")
            else:
                cert_doc = cert.to_document()
                lines.append(
                    f"certificate: Y={{{','.join(sorted(cert.subcurve))}}}, h0(Y)={cert.h0_Y}, "
                    f"identity {'holds' if cert.identity_holds else 'FAILS'}: {cert.verdict}"
                )
    _emit(cfg, {"elliptic_tail": tail.to_document(), "certificate": cert_doc}, lambda: lines)


@main.command(name="gcd")
@click.option("--g", "g", type=int, required=True)
@click.option("--d", "d", type=int, required=True)
@click.pass_obj
def gcd_cmd(cfg: RunConfig, g: int, d: int) -> None:
    """Whether the compactified Jacobian is a geometric quotient."""
    from math import gcd

    q = is_geometric_quotient(g, d)
    val = gcd(d + 1 - g, 2 * g - 2)
    _emit(
        cfg,
        {"g": g, "d": d, "gcd": val, "geometric_quotient": q},
        lambda: [f"geometric quotient: {'yes' if q else 'no'} (gcd={val})"],
    )


def run(argv: list[str] | None = None) -> int:
    """Invoke the CLI and return its exit status instead of exiting."""
    try:
        rv = main.main(args=argv, prog_name="polcurves", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(run())
