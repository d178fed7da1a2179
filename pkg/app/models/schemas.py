"""
JSON documents read and written by the engine. Scalars travel as strings
("p" or "p/q") so that every value stays exact.
"""
from typing import Dict, List, Optional

from pydantic import BaseModel


# ===================== MODEL INGESTION =====================

class BasisEntry(BaseModel):
    name: str
    degree: int


class MultEntry(BaseModel):
    left: str
    right: str
    value: Dict[str, str]


class ModelDocument(BaseModel):
    name: str
    basis: List[BasisEntry]
    unit: str
    diff: Dict[str, Dict[str, str]] = {}
    mult: List[MultEntry] = []


# ===================== RESULTS =====================

class TermDocument(BaseModel):
    coeff: str
    carrier: str
    word: List[str]


class DegreeEntry(BaseModel):
    degree: int
    dim: int
    representatives: List[List[TermDocument]] = []


class CohomologyDocument(BaseModel):
    model: str
    complex: str
    window: str
    convention: str = ""
    degrees: List[DegreeEntry]


class ProductEntry(BaseModel):
    left: str
    right: str
    value: str


class RingDocument(BaseModel):
    generators: Dict[str, int]
    representatives: Dict[str, List[TermDocument]]
    products: List[ProductEntry]
    associativity_failures: List[List[str]] = []


class HomologyEntry(BaseModel):
    degree: int
    dim: int


class IntersectionDocument(BaseModel):
    images: Dict[str, str]
    ring_map_failures: List[List[str]] = []


class LoopReportDocument(BaseModel):
    model: str
    top_degree: Optional[int] = None
    convention: str
    homology: List[HomologyEntry]
    shifted: List[HomologyEntry]
    table: CohomologyDocument
    ring: Optional[RingDocument] = None
    intersection: Optional[IntersectionDocument] = None


class GeneratorEntry(BaseModel):
    name: str
    degree: int
    dual_class: str


class ConnectionDocument(BaseModel):
    model: str
    max_len: int
    generators: List[GeneratorEntry]
    omega: List[TermDocument]
    eth: Dict[str, str]


class CheckEntry(BaseModel):
    name: str
    ok: bool
    detail: str = ""


class VerifyDocument(BaseModel):
    model: str
    window: str
    ok: bool
    checks: List[CheckEntry]
