"""Command-line interface: analyze, moments, circulation, equiv,
reconstruct, simulate.

Exit codes: 0 success (or same orbit), 2 invalid input, 3 different
orbit, 4 field not simple Morse, 5 numerical failure.
"""

import argparse
import sys

import numpy as np

from . import jsonio
from .circulation import build_circulation_graph
from .errors import (AntiderivativeViolation, CasimirKitError, CFLViolation,
                     CountMismatch, DivergenceRisk, IllConditioned,
                     Infeasible, NonManifoldError, NonZeroMean, NoSolution,
                     NotSimple, OrientationError, OutOfRange, ParseError,
                     PerturbFailure, TopologyChange)
from .euler import TorusFlowState, casimir_trace, from_modes
from .measure import pushforward_measure
from .meshio import load_surface, read_oneform
from .moments import MomentSequence, hausdorff_check, reconstruct_density
from .orbit import circulation_iso, measured_from_circulation
from .reeb import build_reeb, check_compatibility

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DIFFERENT = 3
EXIT_NOT_SIMPLE = 4
EXIT_NUMERICAL = 5

_INVALID = (ParseError, CountMismatch, NonManifoldError, OrientationError,
            FileNotFoundError, IsADirectoryError, ValueError)
_NUMERICAL = (NoSolution, Infeasible, IllConditioned, DivergenceRisk,
              AntiderivativeViolation, TopologyChange, CFLViolation,
              NonZeroMean, OutOfRange, PerturbFailure)


def _load_pipeline(mesh, field_path, areas=None):
    surface, field = load_surface(mesh, field_path, area_path=areas)
    graph, qmap = build_reeb(surface, field)
    return surface, field, graph, qmap


def cmd_analyze(args):
    surface, field, graph, qmap = _load_pipeline(args.mesh, args.field,
                                                 args.areas)
    ems = pushforward_measure(surface, field, graph, qmap,
                              K=args.samples, N=args.moments)
    doc = jsonio.graph_document(graph, surface=surface, edge_measures=ems)
    doc["compatibility"] = str(check_compatibility(graph, surface))
    jsonio.write(doc, args.output)
    return EXIT_OK


def cmd_moments(args):
    surface, field, graph, qmap = _load_pipeline(args.mesh, args.field,
                                                 args.areas)
    ems = pushforward_measure(surface, field, graph, qmap,
                              K=args.samples, N=args.moments)
    doc = jsonio.moments_document(
        graph,
        np.array([em.moments for em in ems]),
        np.array([em.moments_rescaled for em in ems]))
    for entry, em in zip(doc["arcs"], ems):
        ms = MomentSequence(em.f_lo, em.f_hi, em.moments)
        entry["feasible"] = bool(hausdorff_check(ms))
    jsonio.write(doc, args.output)
    return EXIT_OK


def cmd_circulation(args):
    surface, field, graph, qmap = _load_pipeline(args.mesh, args.field,
                                                 args.areas)
    form = read_oneform(args.form, surface)
    cg = build_circulation_graph(surface, field, form, graph=graph, qmap=qmap,
                                 n_moments=args.moments)
    jsonio.write(jsonio.circulation_document(cg, surface=surface), args.output)
    return EXIT_OK


def cmd_equiv(args):
    def side(mesh, field_path, form_path):
        surface, field, graph, qmap = _load_pipeline(mesh, field_path)
        form = read_oneform(form_path, surface)
        return build_circulation_graph(surface, field, form,
                                       graph=graph, qmap=qmap,
                                       n_moments=args.moments)

    cg_a = side(args.mesh_a, args.field_a, args.form_a)
    cg_b = side(args.mesh_b, args.field_b, args.form_b)
    verdict = circulation_iso(
        measured_from_circulation(cg_a), measured_from_circulation(cg_b),
        n=args.moments, tol_rel=args.tol_rel, tol_f=args.tol_f,
        tol_circ=args.tol_circ)
    doc = {"version": jsonio.VERSION, "same_orbit": bool(verdict)}
    if verdict:
        doc["node_map"] = {str(k): v for k, v in verdict.node_map.items()}
        doc["arc_map"] = {str(k): v for k, v in verdict.arc_map.items()}
        doc["max_moment_discrepancy"] = verdict.max_moment_discrepancy
        doc["max_circulation_discrepancy"] = \
            verdict.max_circulation_discrepancy
    else:
        doc["witness"] = verdict.witness
    jsonio.write(doc, args.output)
    return EXIT_OK if verdict else EXIT_DIFFERENT


def cmd_reconstruct(args):
    lo, hi, m = jsonio.read_moment_sequence(jsonio.load(args.moments),
                                            arc=args.arc)
    ms = MomentSequence(lo, hi, m)
    rec = reconstruct_density(ms, L=args.L, eps=args.eps, grid=args.grid)
    out = sys.stdout if args.output in (None, "-") else open(args.output, "w")
    try:
        out.write("lambda,w\n")
        for x, w in zip(rec.grid, rec.density):
            out.write(f"{x:.12g},{w:.12g}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"# mass defect {rec.defect:.3g} at eps={rec.eps:g}",
          file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    init = jsonio.load(args.init)
    modes = [((int(m["k"][0]), int(m["k"][1])), float(m["amp"]),
              float(m.get("phase", 0.0))) for m in init["modes"]]
    state = from_modes(args.n, modes)
    samples = [float(s) for s in args.sample_times.split(",")] \
        if args.sample_times else [args.T / 2]
    trace = casimir_trace(state, args.T, sample_times=samples,
                          n_moments=args.moments)
    doc = {
        "version": jsonio.VERSION,
        "times": trace.times,
        "moments": [m for m in trace.moments],
        "circulations": trace.circulations,
        "levels": trace.levels,
        "distributions": trace.distributions,
        "drift": {
            "moments": trace.moment_drift,
            "circulations": trace.circulation_drift,
            "distribution": trace.distribution_drift,
        },
    }
    jsonio.write(doc, args.trace)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="casimir",
        description="Classification of 2D vorticity configurations: "
                    "Reeb graphs, enstrophy moments, circulations, "
                    "orbit equivalence, moment reconstruction, Euler runs.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--moments", type=int, default=16,
                        help="number of moments per arc (default 16)")
        sp.add_argument("--samples", type=int, default=256,
                        help="cumulative profile sample count (default 256)")
        sp.add_argument("-o", "--output", default=None,
                        help="output path (default standard output)")

    sp = sub.add_parser("analyze", help="measured Reeb graph of a field")
    sp.add_argument("mesh")
    sp.add_argument("field")
    sp.add_argument("--areas", default=None,
                    help="per-triangle area file overriding positions")
    add_common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("moments", help="per-arc moment sequences")
    sp.add_argument("mesh")
    sp.add_argument("field")
    sp.add_argument("--areas", default=None)
    add_common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("circulation", help="circulation graph of a 1-form")
    sp.add_argument("mesh")
    sp.add_argument("field")
    sp.add_argument("form")
    sp.add_argument("--areas", default=None)
    add_common(sp)
    sp.set_defaults(func=cmd_circulation)

    sp = sub.add_parser("equiv", help="coadjoint-orbit equivalence")
    for side in "ab":
        sp.add_argument(f"mesh_{side}")
        sp.add_argument(f"field_{side}")
        sp.add_argument(f"form_{side}")
    sp.add_argument("--moments", type=int, default=16)
    sp.add_argument("--tol-rel", dest="tol_rel", type=float, default=1e-8,
                    help="relative moment tolerance (default 1e-8)")
    sp.add_argument("--tol-circ", dest="tol_circ", type=float, default=1e-6,
                    help="relative circulation tolerance (default 1e-6)")
    sp.add_argument("--tol-f", dest="tol_f", type=float, default=1e-8,
                    help="node level tolerance x value range (default 1e-8)")
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_equiv)

    sp = sub.add_parser("reconstruct", help="density from a moment sequence")
    sp.add_argument("--moments", required=True,
                    help="JSON moment document")
    sp.add_argument("--arc", type=int, default=None,
                    help="arc id when the document holds several")
    sp.add_argument("--L", type=float, default=None,
                    help="support half-width (default from the interval)")
    sp.add_argument("--eps", type=float, default=None,
                    help="jump-formula offset (default 0.01 L)")
    sp.add_argument("--grid", type=int, default=201)
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("simulate", help="Euler run with Casimir trace")
    sp.add_argument("--n", type=int, default=128, help="grid size")
    sp.add_argument("--T", type=float, default=1.0, help="horizon")
    sp.add_argument("--init", required=True,
                    help="JSON: {modes: [{k: [kx, ky], amp, phase}]}")
    sp.add_argument("--sample-times", default=None,
                    help="comma-separated interior sample times")
    sp.add_argument("--moments", type=int, default=8)
    sp.add_argument("--trace", default=None, help="trace JSON output path")
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the invalid code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NotSimple as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_SIMPLE
    except _NUMERICAL as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CasimirKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
