"""
FastAPI endpoints for the string-topology pipelines.
Requests name a model by preset spec or carry .dgm source text.
"""
import os
import shutil
import tempfile
from contextlib import contextmanager
from typing import Dict, List, Optional

from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

# Load environment variables
load_dotenv()

# Import pipeline components
from app.core.config import EngineConfig
from app.core.errors import InputError, InvariantError
from app.models.presets import PRESETS
from app.models.schemas import CohomologyDocument, ConnectionDocument, LoopReportDocument, VerifyDocument
from app.services.pipeline import StringTopologyPipeline
from app.services.twisted import parse_window
from app.utils.export import (
    connection_to_document,
    report_to_document,
    table_to_document,
    verify_to_document,
)

# Initialize FastAPI app
app = FastAPI(
    title="dg-loops API",
    description="Exact loop homology, Hochschild cohomology and brane topology from finite dg models",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# ===================== RESPONSE MODELS =====================

class HealthResponse(BaseModel):
    status: str
    message: str

class PresetInfo(BaseModel):
    name: str
    params: int
    description: str

class PresetsResponse(BaseModel):
    success: bool
    presets: List[PresetInfo]


# ===================== REQUEST MODELS =====================

class ModelRequest(BaseModel):
    model: str = ""                     # preset spec, used when `source` is empty
    source: str = ""                    # .dgm text
    single_thread: bool = False

class WindowRequest(ModelRequest):
    window: str

class LoopsRequest(WindowRequest):
    top_degree: Optional[int] = None
    ring: bool = False
    reps: Dict[str, str] = {}
    route: str = "algebra"

class HochschildRequest(WindowRequest):
    module: Optional[str] = None

class BasedRequest(WindowRequest):
    ring: bool = False
    reps: Dict[str, str] = {}

class BraneRequest(WindowRequest):
    sub: str = ""
    sub_source: str = ""
    map: str                            # .dgmap text
    top_degree: Optional[int] = None
    intersection: bool = False
    ring: bool = False
    reps: Dict[str, str] = {}

class ConnectionRequest(ModelRequest):
    max_len: int

class VerifyRequest(WindowRequest):
    oracle: bool = False
    poincare: bool = False
    sub: str = ""
    sub_source: str = ""
    map: str = ""


# ===================== HELPERS =====================

@contextmanager
def _materialized(request: ModelRequest):
    """Write inline sources to a temp dir and yield (model, sub, map) specs"""
    temp_dir = tempfile.mkdtemp()

    def spec(text: str, fallback: str, filename: str) -> str:
        if not text:
            return fallback
        path = os.path.join(temp_dir, filename)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
        return path

    try:
        model = spec(request.source, request.model, "model.dgm")
        if not model:
            raise HTTPException(status_code=400, detail="either model or source is required")
        sub = spec(getattr(request, "sub_source", ""), getattr(request, "sub", ""), "sub.dgm")
        map_path = spec(getattr(request, "map", ""), "", "morphism.dgmap")
        yield model, sub, map_path
    finally:
        shutil.rmtree(temp_dir, ignore_errors=True)


def _pipeline(request: ModelRequest) -> StringTopologyPipeline:
    return StringTopologyPipeline(EngineConfig(workers=1) if request.single_thread else EngineConfig())


@contextmanager
def _errors():
    try:
        yield
    except InputError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except InvariantError as e:
        raise HTTPException(status_code=500, detail=f"Invariant violated: {e}")


# ===================== ENDPOINTS =====================

@app.get("/api/health", response_model=HealthResponse)
def health_check():
    """Health check endpoint"""
    return HealthResponse(status="healthy", message="dg-loops API is running")


@app.get("/api/presets", response_model=PresetsResponse)
def get_presets():
    """List the preset models"""
    presets = [
        PresetInfo(name=name, params=info["params"], description=info["description"])
        for name, info in PRESETS.items()
    ]
    return PresetsResponse(success=True, presets=presets)


@app.post("/api/loops", response_model=LoopReportDocument)
def loops(request: LoopsRequest):
    """Free loop homology with the Chas-Sullivan ring on named generators"""
    with _errors(), _materialized(request) as (model, _, _):
        report = _pipeline(request).loops(model, request.top_degree, request.window, request.ring,
                                          request.reps, request.route)
        return report_to_document(report)


@app.post("/api/hochschild", response_model=CohomologyDocument)
def hochschild(request: HochschildRequest):
    """Hochschild cohomology as the cohomology of the twisted complex"""
    with _errors(), _materialized(request) as (model, _, _):
        table, convention = _pipeline(request).hochschild(model, request.window, request.module)
        return table_to_document(table, request.model or table.complex.conn.algebra.name, convention)


@app.post("/api/based", response_model=LoopReportDocument)
def based(request: BasedRequest):
    """Based loop homology from the words complex"""
    with _errors(), _materialized(request) as (model, _, _):
        report = _pipeline(request).based(model, request.window, request.ring, request.reps)
        return report_to_document(report)


@app.post("/api/brane", response_model=LoopReportDocument)
def brane(request: BraneRequest):
    """Brane homology for f*: A_M -> A_Z, with the intersection map on request"""
    with _errors(), _materialized(request) as (model, sub, map_path):
        if not sub:
            raise HTTPException(status_code=400, detail="either sub or sub_source is required")
        report, images = _pipeline(request).brane(model, sub, map_path, request.top_degree, request.window,
                                                  request.intersection, request.ring, request.reps)
        return report_to_document(report, images)


@app.post("/api/connection", response_model=ConnectionDocument)
def connection(request: ConnectionRequest):
    """Chen connection (ω, ð) up to a word length"""
    with _errors(), _materialized(request) as (model, _, _):
        conn, hd = _pipeline(request).connection(model, request.max_len)
        return connection_to_document(conn, hd)


@app.post("/api/verify", response_model=VerifyDocument)
def verify(request: VerifyRequest):
    """Run the invariant suite; failed checks are reported, not raised"""
    with _errors(), _materialized(request) as (model, sub, map_path):
        checks = _pipeline(request).verify(model, request.window, request.oracle, request.poincare,
                                           sub or None, map_path or None)
        return verify_to_document(request.model or "inline", parse_window(request.window), checks)


# ===================== STARTUP =====================

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
