"""Command-line front end.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or input error,
3 a resource cap or truncation limit was hit.
"""

from __future__ import annotations

import argparse
import os
import sys

from .classify import (
    RankCapExceeded,
    classify_system,
    moussong_check,
    simplicity_verdict,
)
from .congruence import (
    BadPrimeError,
    CoverageError,
    build_context,
    gamma_orbits,
    shape,
    torsion_certificate,
)
from .field import PrecisionCapError
from .group import DEFAULT_BALL_CAP, ResourceCapExceeded, group_of
from .harmonic import (
    haagerup_gamma_check,
    haagerup_length_check,
    icc_scan,
    powers_average_experiment,
    realizable_shapes,
)
from .report import Report, fmt
from .system import INF, CoxeterInputError, load_system
from .trees import (
    TruncationTooSmall,
    UnstablePartitionError,
    build_forest,
    certify_free_pair,
    check_acyclic,
    freeness_check,
    valency_profile,
    vertex_orbit_counts,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

# flags that change how a run executes but never what it prints
_EXECUTION_ONLY = {"workers", "func", "command"}


class UsageError(ValueError):
    pass


# ---- helpers -------------------------------------------------------------------

def _system(args):
    system = load_system(args.file)
    G = group_of(system)
    G.cache.cap = args.ball_cap
    return system, G


def _word(system, tokens):
    if isinstance(tokens, str):
        tokens = tokens.split()
    tokens = list(tokens)
    if tokens == ["e"] and "e" not in system.names:
        tokens = []
    try:
        return system.parse_word(tokens)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _context(args, system, rep: Report):
    ctx = build_context(system, args.prime)
    rep.config["prime"] = ctx.prime  # record the resolved default
    return ctx


def _partition(args, ctx):
    return gamma_orbits(ctx, args.refl, args.conj, method=args.method)


def _radii(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}") from None
    if not out or any(r < 0 for r in out):
        raise argparse.ArgumentTypeError("radii must be non-negative integers")
    return out


def _shape_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shape {text!r}") from None


def _context_section(rep: Report, ctx) -> None:
    rep.add("prime", ctx.prime)
    rep.add("residue_degree", ctx.f)
    rep.add("phi", tuple(ctx.phi))
    rep.add("quotient_order", ctx.quotient.order)
    rep.add("nbar_order", ctx.nbar_order)
    rep.add("gamma_index", ctx.index)


def _orbit_section(rep: Report, part) -> None:
    rep.add("lambda", part.lam)
    rep.add("method", part.method)
    rep.add("status", part.status)
    rep.add("certified", part.certified)
    rep.add("lower_bound", part.lower_bound)
    rep.add("history", part.history)
    rep.add("enumerated_orbit_sizes", part.orbit_sizes)


# ---- subcommands --------------------------------------------------------------

def cmd_classify(args, rep: Report) -> None:
    system, _ = _system(args)
    _classify_into(rep, system)


def _classify_into(rep: Report, system) -> None:
    rep.section("classify")
    fc = classify_system(system)
    rep.add("generators", list(system.names))
    rep.add("rank", system.rank)
    rep.add("signature", fc.signature)
    rep.add("category", fc.category)
    verdict = simplicity_verdict(system.cm)
    for k, (comp, cfc, v) in enumerate(verdict.components):
        rep.add(f"component.{k}.generators", list(comp))
        rep.add(f"component.{k}.signature", cfc.signature)
        rep.add(f"component.{k}.category", cfc.category)
        rep.add(f"component.{k}.verdict", v)
    try:
        mr = moussong_check(system.cm)
        rep.add("moussong.hyperbolic", mr.hyperbolic)
        rep.add("moussong.commuting_infinite_pairs", [f"{'+'.join(a)}|{'+'.join(b)}" for a, b in mr.commuting_infinite_pairs])
        rep.add("moussong.affine_subsystems", ["+".join(a) for a in mr.affine_subsystems])
    except RankCapExceeded as exc:
        rep.add("moussong", f"skipped ({exc})")
    rep.add("verdict", verdict.overall)


def cmd_ball(args, rep: Report) -> None:
    system, G = _system(args)
    ball = G.ball(args.n)
    rep.section("ball")
    rep.add("radius", args.n)
    rep.add("size", len(ball))
    rep.add("sphere_sizes", [len(G.cache.sphere_range(k)) for k in range(args.n + 1)])
    for k, g in enumerate(ball):
        if k >= args.list:
            rep.add("elements", f"... {len(ball) - args.list} more")
            break
        rep.add("element", system.format_word(g.word))


def cmd_reflections(args, rep: Report) -> None:
    system, G = _system(args)
    refl = G.reflections_up_to(args.n)
    rep.section("reflections")
    rep.add("max_length", args.n)
    rep.add("count", len(refl))
    for k, t in enumerate(refl):
        if k >= args.list:
            rep.add("reflections", f"... {len(refl) - args.list} more")
            break
        rep.add("reflection", system.format_word(t.word))


def cmd_length(args, rep: Report) -> None:
    system, G = _system(args)
    g = G.element(_word(system, args.word))
    rep.section("length")
    rep.add("input", system.format_word(_word(system, args.word)))
    rep.add("length", len(g.word))
    rep.add("normal_form", system.format_word(g.word))
    inv = G.inversion_set(g)
    rep.add("inversion_count", len(inv))
    rep.check("inversion_count_equals_length", len(inv) == len(g.word))


def cmd_gamma(args, rep: Report) -> None:
    system, G = _system(args)
    ctx = _context(args, system, rep)
    rep.section("gamma")
    _context_section(rep, ctx)
    members = ctx.gamma_ball(args.radius)
    rep.add("radius", args.radius)
    rep.add("ball_size", G.cache.count(args.radius))
    rep.add("gamma_count", len(members))
    for i in members[: args.list]:
        rep.add("member", system.format_word(G.cache.words[i]))
    tr = torsion_certificate(ctx, args.radius)
    rep.add("torsion", tr.summary())
    rep.check("torsion_free", tr.ok)


def cmd_orbits(args, rep: Report) -> None:
    system, _ = _system(args)
    ctx = _context(args, system, rep)
    part = _partition(args, ctx)
    rep.section("orbits")
    rep.add("prime", ctx.prime)
    _orbit_section(rep, part)


def cmd_shape(args, rep: Report) -> None:
    system, G = _system(args)
    ctx = _context(args, system, rep)
    g = G.element(_word(system, args.word))
    if not ctx.is_in_gamma(g):
        raise UsageError(f"{system.format_word(g.word)} is not in Gamma for p = {ctx.prime}")
    part = _partition(args, ctx)
    sv = shape(ctx, part, g)
    rep.section("shape")
    rep.add("element", system.format_word(g.word))
    rep.add("lambda", part.lam)
    rep.add("shape", sv)
    rep.add("support", [i for i, c in enumerate(sv) if c])
    rep.check("shape_sums_to_length", sum(sv) == len(g.word))


def cmd_trees(args, rep: Report) -> None:
    system, G = _system(args)
    ctx = _context(args, system, rep)
    part = _partition(args, ctx)
    _trees_into(rep, ctx, part, args.radius, dump=args.dump)


def _trees_into(rep: Report, ctx, part, radius: int, dump=None) -> None:
    system, G = ctx.system, ctx.group
    forest = build_forest(ctx, part, radius)
    rep.section("trees")
    rep.add("radius", radius)
    rep.add("lambda", part.lam)
    classes: dict[str, int] = {}
    acyclic = True
    orbits = vertex_orbit_counts(forest, 2 * radius)
    for i in range(part.lam):
        tree = forest[i]
        ac = check_acyclic(tree)
        prof = valency_profile(tree)
        acyclic &= ac.ok
        classes[prof.classification] = classes.get(prof.classification, 0) + 1
        rep.add(f"tree.{i}", f"vertices={tree.n_vertices} edges={tree.n_edges} "
                f"boundary={len(tree.boundary)} acyclic={'yes' if ac.ok else 'no'} "
                f"max_valency={prof.max_valency} class={prof.classification} "
                f"gamma_vertex_classes={fmt(orbits[i])}")
    rep.add("classes", sorted(classes.items()))
    rep.check("acyclic", acyclic)
    cm = system.cm
    finite = all(cm.label(s, t) != INF for s in range(cm.rank) for t in range(s + 1, cm.rank))
    rep.add("all_labels_finite", finite)
    rep.add("property_fa", "implied by finite labels (informational, not certified)" if finite
            else "not implied (some label is infinite)")
    if dump is not None:
        if not 0 <= dump < part.lam:
            raise UsageError(f"tree index {dump} out of range")
        rep.section(f"tree {dump}")
        names = lambda rid: system.format_word(G.registry.reflection(rid).word).replace(" ", ".")  # noqa: E731
        rep.lines("edge", forest[dump].dump(names))


def cmd_free(args, rep: Report) -> None:
    system, G = _system(args)
    ctx = _context(args, system, rep)
    part = _partition(args, ctx)
    g = G.element(_word(system, args.gamma))
    if g.is_identity() or not ctx.is_in_gamma(g):
        raise UsageError("--gamma must name a non-trivial element of Gamma")
    _free_into(rep, ctx, part, g, args.radius, args.max_radius, args.maxlen)


def _free_into(rep: Report, ctx, part, h, radius: int, max_radius: int, maxlen: int) -> None:
    system = ctx.system
    pp, r = certify_free_pair(ctx, part, h, radius, max_radius)
    cert = pp.certificate
    rep.section("free")
    rep.add("h", system.format_word(h.word))
    rep.add("v", system.format_word(pp.v.word))
    rep.add("tree", cert.tree)
    rep.add("radius", r)
    rep.add("wall", system.format_word(ctx.group.registry.reflection(cert.wall).word))
    rep.add("v_amplitude", cert.v_amplitude)
    for name, ok in cert.h_checks + cert.v_checks + cert.sample_checks:
        rep.add("certificate", f"{name}: {'yes' if ok else 'no'}")
    rep.check("ping_pong", cert.ok)
    fr = freeness_check(h, pp.v, maxlen)
    rep.add("freeness.max_len", fr.max_len)
    rep.add("freeness.words_checked", fr.words_checked)
    rep.add("freeness.relation", fr.relation)
    rep.check("free", fr.free)


def cmd_haagerup(args, rep: Report) -> None:
    system, _ = _system(args)
    ctx = _context(args, system, rep)
    part = _partition(args, ctx)
    if args.mode == "shape":
        if args.shape is not None:
            shapes = [args.shape]
        else:
            shapes = [s for s in realizable_shapes(ctx, part, args.n) if sum(s) == args.n]
            if not shapes:
                raise UsageError(f"no Gamma element of length {args.n}")
        for sv in shapes:
            res = haagerup_gamma_check(ctx, part, sv, args.trials, args.seed, args.f_radius, args.workers)
            _haagerup_into(rep, res, per_trial=True)
    else:
        res = haagerup_length_check(ctx, part, args.n, args.trials, args.seed, args.f_radius, args.on, args.workers)
        _haagerup_into(rep, res, per_trial=True)


def _haagerup_into(rep: Report, res, per_trial: bool) -> None:
    rep.section(f"haagerup {res.mode} {res.target if res.mode == 'length' else ''}".rstrip())
    rep.add("target", res.target)
    rep.add("bound", res.bound)
    rep.add("seed", res.seed)
    rep.add("f_radius", res.f_radius)
    rep.add("f_support", res.f_support)
    rep.add("h_support", res.h_support)
    if res.shape_count is not None:
        rep.add("shape_count", res.shape_count)
    rep.add("trials", len(res.trials))
    rep.add("max_ratio", res.max_ratio)
    rep.add("asserted", res.asserted)
    if res.asserted:
        rep.check(f"haagerup_{res.mode}", res.ok)
    if per_trial:
        for t in res.trials:
            rep.section(f"trial {t.index}")
            rep.add("ratio", t.ratio)
            rep.add("norm_f", t.norm_f)
            rep.add("norm_h", t.norm_h)
            rep.add("norm_fh", t.norm_fh)


def cmd_powers(args, rep: Report) -> None:
    system, G = _system(args)
    ctx = _context(args, system, rep)
    part = _partition(args, ctx)
    k = G.element(_word(system, args.k))
    if k.is_identity() or not ctx.is_in_gamma(k):
        raise UsageError("--k must name a non-trivial element of Gamma")
    pp, r = certify_free_pair(ctx, part, k, args.radius, args.max_radius)
    res = powers_average_experiment(k, pp.v, args.nmax, args.truncation, args.seed)
    rep.section("powers")
    rep.add("k", system.format_word(k.word))
    rep.add("v", system.format_word(pp.v.word))
    rep.add("ping_pong_radius", r)
    rep.add("truncation_radius", res.radius)
    for n, (val, its) in enumerate(zip(res.values, res.iterations), 1):
        rep.add(f"average.{n}", f"{val:.12g} iterations={its}")
    rep.add("non_increasing", res.non_increasing)
    rep.add("eq3_ratios", res.eq3_ratios)
    rep.add("eq3_within_2", res.eq3_ok)
    rep.check("averages_at_most_1", res.bounded)


def cmd_icc(args, rep: Report) -> None:
    system, G = _system(args)
    w = G.element(_word(system, args.w))
    if w.is_identity():
        raise UsageError("--w must be non-trivial")
    _icc_into(rep, w, args.radii)


def _icc_into(rep: Report, w, radii) -> None:
    system = w.group.system
    res = icc_scan(w, radii)
    rep.section(f"icc {system.format_word(w.word)}")
    rep.add("w", system.format_word(w.word))
    rep.add("radii", res.radii)
    rep.add("conjugates", res.counts)
    rep.add("hypotheses_hold", res.asserted)
    if res.asserted:
        rep.check("icc_growth", res.increasing)


def cmd_report(args, rep: Report) -> None:
    system, G = _system(args)
    _classify_into(rep, system)
    ctx = _context(args, system, rep)
    rep.section("gamma")
    _context_section(rep, ctx)
    tr = torsion_certificate(ctx, args.torsion_radius)
    rep.add("torsion", tr.summary())
    rep.check("torsion_free", tr.ok)
    part = _partition(args, ctx)
    rep.section("orbits")
    _orbit_section(rep, part)
    _trees_into(rep, ctx, part, args.radius)
    gam = [G.cache.element(i) for i in ctx.gamma_ball(args.haagerup_radius)][1:]
    shapes = realizable_shapes(ctx, part, args.haagerup_radius, args.shapes)
    if not gam:
        rep.section("haagerup")
        rep.add("skipped", f"no non-trivial element of Gamma within radius {args.haagerup_radius}")
    for sv in shapes:
        _haagerup_into(rep, haagerup_gamma_check(ctx, part, sv, args.trials, args.seed, workers=args.workers), False)
    for n in sorted({len(g.word) for g in gam})[: args.shapes]:
        _haagerup_into(rep, haagerup_length_check(ctx, part, n, args.trials, args.seed, workers=args.workers), False)
    if gam:
        try:
            _free_into(rep, ctx, part, gam[0], args.radius, args.max_radius, args.maxlen)
        except (TruncationTooSmall, ValueError) as exc:
            rep.section("free")
            rep.add("h", system.format_word(gam[0].word))
            rep.add("ping_pong", f"not found ({exc})")
    gens = [G.gens[0]] + ([G.gens[0] * G.gens[1]] if system.rank > 1 else [])
    for w in gens:
        _icc_into(rep, w, args.icc_radii)


# ---- parser -------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, congruence: bool = False, orbits: bool = False) -> None:
    p.add_argument("file", help="graph file, or builtin:NAME (a2, dinf, t237, figure, a2xa1)")
    p.add_argument("--ball-cap", type=int, default=DEFAULT_BALL_CAP, help="element limit for ball enumeration")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="threads for randomized trials")
    if congruence:
        p.add_argument("--prime", type=int, default=None, help="reduction prime (default: smallest usable)")
    if orbits:
        p.add_argument("--refl", type=int, default=7, help="reflection enumeration radius")
        p.add_argument("--conj", type=int, default=8, help="conjugator radius")
        p.add_argument("--method", choices=("coset", "explicit"), default="coset")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coxtree", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Gram signature, components, Moussong scan, verdict")
    _common(p)
    p.set_defaults(func=cmd_classify)

    for name, fn, what in (("ball", cmd_ball, "elements of length <= n"),
                           ("reflections", cmd_reflections, "reflections of length <= n")):
        p = sub.add_parser(name, help=what)
        _common(p)
        p.add_argument("n", type=int)
        p.add_argument("--list", type=int, default=200, help="print at most this many")
        p.set_defaults(func=fn)

    p = sub.add_parser("length", help="length and ShortLex normal form of a word")
    _common(p)
    p.add_argument("word", nargs="+")
    p.set_defaults(func=cmd_length)

    p = sub.add_parser("gamma", help="Gamma membership in a ball and a torsion certificate")
    _common(p, congruence=True)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--list", type=int, default=200)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("orbits", help="Gamma-orbits of reflections")
    _common(p, congruence=True, orbits=True)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("shape", help="shape vector of an element of Gamma")
    _common(p, congruence=True, orbits=True)
    p.add_argument("word", nargs="+")
    p.set_defaults(func=cmd_shape)

    p = sub.add_parser("trees", help="truncated trees: counts, acyclicity, valency class")
    _common(p, congruence=True, orbits=True)
    p.add_argument("--radius", type=int, default=5)
    p.add_argument("--dump", type=int, default=None, metavar="I", help="print the edge list of tree I")
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("free", help="ping-pong partner and freeness certificate")
    _common(p, congruence=True, orbits=True)
    p.add_argument("--gamma", required=True, help="element of Gamma, e.g. 'b c b c b c'")
    p.add_argument("--maxlen", type=int, default=6)
    p.add_argument("--radius", type=int, default=5)
    p.add_argument("--max-radius", type=int, default=8)
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("haagerup", help="randomized convolution norm inequalities on Gamma")
    _common(p, congruence=True, orbits=True)
    p.add_argument("--mode", choices=("shape", "length"), default="shape")
    p.add_argument("--n", type=int, required=True, help="total length of the shapes / support length")
    p.add_argument("--shape", type=_shape_arg, default=None, help="explicit shape, comma separated")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f-radius", type=int, default=None)
    p.add_argument("--on", choices=("gamma", "G"), default="gamma", help="length mode: support group")
    p.set_defaults(func=cmd_haagerup)

    p = sub.add_parser("powers", help="norms of averaged conjugates along a free partner")
    _common(p, congruence=True, orbits=True)
    p.add_argument("--k", required=True)
    p.add_argument("--nmax", type=int, default=16)
    p.add_argument("--truncation", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=int, default=5)
    p.add_argument("--max-radius", type=int, default=8)
    p.set_defaults(func=cmd_powers)

    p = sub.add_parser("icc", help="growth of conjugacy classes over balls")
    _common(p)
    p.add_argument("--w", required=True)
    p.add_argument("--radii", type=_radii, default=[2, 4, 6])
    p.set_defaults(func=cmd_icc)

    p = sub.add_parser("report", help="full pipeline in one document")
    _common(p, congruence=True, orbits=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--radius", type=int, default=5, help="tree truncation radius")
    p.add_argument("--max-radius", type=int, default=8)
    p.add_argument("--torsion-radius", type=int, default=8)
    p.add_argument("--haagerup-radius", type=int, default=10)
    p.add_argument("--shapes", type=int, default=3)
    p.add_argument("--maxlen", type=int, default=6)
    p.add_argument("--icc-radii", type=_radii, default=[2, 4, 6])
    p.set_defaults(func=cmd_report)
    return ap


def _config(args) -> dict:
    cfg = {"input": args.file}
    for k, v in sorted(vars(args).items()):
        if k not in _EXECUTION_ONLY and k != "file":
            cfg[k] = v
    return cfg


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    rep = Report(args.command, _config(args))
    try:
        args.func(args, rep)
    except (ResourceCapExceeded, TruncationTooSmall, CoverageError, UnstablePartitionError,
            RankCapExceeded, PrecisionCapError) as exc:
        print(f"coxtree: resource limit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (OSError, CoxeterInputError, BadPrimeError, UsageError, KeyError, ValueError) as exc:
        print(f"coxtree: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.write(rep.render())
    return EXIT_OK if rep.ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
