"""
TSV and JSON writers. JSON always goes through the pydantic documents with
sorted keys so that identical runs print identical bytes.
"""
import json
from typing import List

from pydantic import BaseModel

from ..models.element import element_to_json
from ..models.schemas import (
    CheckEntry,
    CohomologyDocument,
    ConnectionDocument,
    DegreeEntry,
    GeneratorEntry,
    HomologyEntry,
    IntersectionDocument,
    LoopReportDocument,
    ProductEntry,
    RingDocument,
    TermDocument,
    VerifyDocument,
)
from .formatting import format_chain, format_polynomial, format_vector, format_window


def to_json(doc: BaseModel) -> str:
    return json.dumps(doc.model_dump(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _terms(space, element) -> List[TermDocument]:
    return [TermDocument(**term) for term in element_to_json(space, element)]


# ===================== DOCUMENTS =====================

def table_to_document(table, model: str, convention: str = "", with_representatives: bool = True) -> CohomologyDocument:
    cx = table.complex
    degrees = []
    for d, data in sorted(table.degrees.items()):
        reps = [_terms(cx.space, r) for r in table.representatives(d)] if with_representatives else []
        degrees.append(DegreeEntry(degree=d, dim=data.dim, representatives=reps))
    return CohomologyDocument(
        model=model,
        complex=cx.name or cx.kind,
        window=format_window(table.window),
        convention=convention,
        degrees=degrees,
    )


def ring_to_document(ring, entries) -> RingDocument:
    space = ring.table.complex.space
    return RingDocument(
        generators=dict(ring.degrees),
        representatives={name: _terms(space, t) for name, t in ring.generators.items()},
        products=[ProductEntry(left=a, right=b, value=value) for a, b, value in entries],
        associativity_failures=[list(triple) for triple in ring.associativity_failures],
    )


def intersection_to_document(report) -> IntersectionDocument:
    return IntersectionDocument(
        images=dict(report.images),
        ring_map_failures=[list(pair) for pair in report.ring_map_failures],
    )


def report_to_document(report, intersection=None) -> LoopReportDocument:
    return LoopReportDocument(
        model=report.model,
        top_degree=report.top_degree,
        convention=report.convention,
        homology=[HomologyEntry(degree=k, dim=v) for k, v in sorted(report.betti.items())],
        shifted=[HomologyEntry(degree=k, dim=v) for k, v in sorted(report.shifted.items())],
        table=table_to_document(report.table, report.model, report.convention),
        ring=ring_to_document(report.ring, report.ring_entries) if report.ring else None,
        intersection=intersection_to_document(intersection) if intersection else None,
    )


def connection_to_document(conn, hd) -> ConnectionDocument:
    names = conn.algebra.basis.names
    generators = [
        GeneratorEntry(name=conn.gens.names[g], degree=conn.gens.degrees[g],
                       dual_class=format_vector(hd.representatives[k], names))
        for g, k in enumerate(hd.reduced_classes)
    ]
    space = conn.space
    return ConnectionDocument(
        model=conn.algebra.name,
        max_len=conn.max_len,
        generators=generators,
        omega=_terms(space, space.element(conn.omega_chain())),
        eth={conn.gens.names[i]: format_polynomial(p, conn.gens.names) for i, p in sorted(conn.eth.items())},
    )


def verify_to_document(model: str, window, checks) -> VerifyDocument:
    entries = [CheckEntry(name=name, ok=ok, detail=detail) for name, ok, detail in checks]
    return VerifyDocument(model=model, window=format_window(window), ok=all(e.ok for e in entries), checks=entries)


# ===================== TSV =====================

def table_to_tsv(table, model: str, convention: str = "") -> str:
    header = f"# model: {model}\tcomplex: {table.complex.name or table.complex.kind}\twindow: {format_window(table.window)}"
    if convention:
        header += f"\tconvention: {convention}"
    lines = [header, "degree\tdim"]
    lines += [f"{d}\t{dim}" for d, dim in table.dims().items()]
    return "\n".join(lines) + "\n"


def report_to_tsv(report, intersection=None) -> str:
    lines = [
        f"# model: {report.model}\twindow: {format_window(report.table.window)}\tconvention: {report.convention}",
        "degree\tdim",
    ]
    lines += [f"{k}\t{v}" for k, v in sorted(report.betti.items())]
    if report.ring is not None:
        space = report.ring.table.complex.space
        for name, t in report.ring.generators.items():
            lines.append(f"# generator {name} (degree {report.ring.degrees[name]}): {format_chain(space, t.chain())}")
        for a, b, value in report.ring_entries:
            lines.append(f"# {a}*{b} = {value}")
        for triple in report.ring.associativity_failures:
            lines.append(f"# associativity fails on {'*'.join(triple)}")
    if intersection is not None:
        for name, image in intersection.images.items():
            lines.append(f"# {name} -> {image}")
        for a, b in intersection.ring_map_failures:
            lines.append(f"# intersection is not multiplicative on {a}*{b}")
    return "\n".join(lines) + "\n"


def connection_to_tsv(conn, hd) -> str:
    doc = connection_to_document(conn, hd)
    space = conn.space
    lines = [f"# model: {doc.model}\tmax_len: {doc.max_len}", "generator\tdegree\tdual_class"]
    lines += [f"{g.name}\t{g.degree}\t{g.dual_class}" for g in doc.generators]
    for k in sorted(conn.omega):
        if conn.omega[k]:
            lines.append(f"omega_{k}\t{format_chain(space, conn.omega[k])}")
    for name, poly in doc.eth.items():
        lines.append(f"eth({name})\t{poly}")
    return "\n".join(lines) + "\n"


def verify_to_tsv(doc: VerifyDocument) -> str:
    lines = [f"# model: {doc.model}\twindow: {doc.window}\tok: {str(doc.ok).lower()}", "check\tok\tdetail"]
    lines += [f"{c.name}\t{'ok' if c.ok else 'FAIL'}\t{c.detail}" for c in doc.checks]
    return "\n".join(lines) + "\n"

