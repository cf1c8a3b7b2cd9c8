"""JSON documents for the pipeline: stable, versioned, sorted keys."""

import json
import sys

import numpy as np

from .errors import ParseError
from .surface import MAXIMUM, MINIMUM, SADDLE

VERSION = "casimir-kit/1"

_KIND_NAMES = {MINIMUM: "min", MAXIMUM: "max", SADDLE: "saddle"}


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def dump(doc, stream=None):
    """Serialize deterministically (sorted keys, fixed separators)."""
    text = json.dumps(_plain(doc), sort_keys=True, indent=1)
    if stream is None:
        return text
    stream.write(text + "\n")


def write(doc, path):
    if path in (None, "-"):
        dump(doc, sys.stdout)
    else:
        with open(path, "w") as fh:
            dump(doc, fh)


def load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def graph_document(graph, surface=None, edge_measures=None):
    """Measured Reeb graph document (nodes, arcs, moments, profiles)."""
    doc = {
        "version": VERSION,
        "nodes": [
            {"id": n.id, "f": n.f, "kind": _KIND_NAMES[n.kind],
             "vertex": n.vertex}
            for n in graph.nodes
        ],
        "arcs": [
            {"id": a.id, "tail": a.tail, "head": a.head,
             "f_lo": a.f_lo, "f_hi": a.f_hi}
            for a in graph.arcs
        ],
        "betti1": graph.betti1,
    }
    if surface is not None:
        doc["genus"] = surface.genus
        doc["compatible"] = graph.betti1 == surface.genus
        doc["total_area"] = float(surface.triangle_areas.sum())
    if edge_measures is not None:
        for arc_doc, em in zip(doc["arcs"], edge_measures):
            arc_doc["m"] = em.moments
            arc_doc["m_rescaled"] = em.moments_rescaled
            arc_doc["profile_t"] = em.t
            arc_doc["profile_area"] = em.cumulative_area
    return doc


def circulation_document(cg, surface=None):
    """Graph document extended with the circulation antiderivative."""
    doc = graph_document(cg.graph, surface=surface)
    for arc_doc, arc in zip(doc["arcs"], cg.graph.arcs):
        arc_doc["m"] = cg.moments[arc.id]
        arc_doc["m_rescaled"] = cg.moments_rescaled[arc.id]
        mid = 0.5 * (arc.f_lo + arc.f_hi)
        arc_doc["c_tail"] = cg.circulation.tail_limit(arc.id)
        arc_doc["c_head"] = cg.circulation.head_limit(arc.id)
        arc_doc["c_mid"] = cg.circulation.value(arc.id, mid)
        arc_doc["rho_total"] = cg.rho.total(arc.id)
    doc["residuals"] = {
        "newton_leibniz": cg.newton_leibniz_residual,
        "kirchhoff": cg.kirchhoff_residual,
        "rho_deviation": cg.rho_deviation,
    }
    return doc


def moments_document(graph, moments, moments_rescaled):
    return {
        "version": VERSION,
        "arcs": [
            {"id": a.id, "lo": a.f_lo, "hi": a.f_hi,
             "m": moments[a.id], "m_rescaled": moments_rescaled[a.id]}
            for a in graph.arcs
        ],
    }


def read_moment_sequence(doc, arc=None):
    """A (lo, hi, m) triple from a moments document or a bare object."""
    if "arcs" in doc:
        arcs = doc["arcs"]
        if arc is None:
            if len(arcs) != 1:
                raise ParseError(
                    "document has several arcs; select one with --arc")
            entry = arcs[0]
        else:
            match = [e for e in arcs if e.get("id") == arc]
            if not match:
                raise ParseError(f"no arc with id {arc} in document")
            entry = match[0]
    else:
        entry = doc
    try:
        return float(entry["lo"]), float(entry["hi"]), \
            np.asarray(entry["m"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed moment document: {exc}") from exc
