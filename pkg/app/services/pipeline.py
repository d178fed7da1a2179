import time
from contextlib import contextmanager
from typing import Dict, List, Optional, Tuple

from ..core.config import EngineConfig
from ..models.algebra import DGAlgebra, restrict_along, validate_bimodule, validate_dga
from ..models.element import TensorSpace, TwistedElement
from ..models.presets import based_fixture, brane_fixture, ring_fixture
from ..utils.formatting import format_polynomial, format_seconds
from ..utils.log import get_logger
from .loops import (
    IntersectionReport,
    LoopReport,
    based_loop_ring,
    brane_homology,
    connection_for,
    intersection_report,
    loop_homology,
)
from .model_io import is_model_file, load_model_spec, load_morphism, parse_model_spec, parse_named
from .oracle import hochschild_dims_bruteforce, twisting_cochain_check
from .transfer import Connection, HomotopyData, build_contraction, chen_connection, check_contraction
from .transfer import eth_in_square_ideal, eth_square, mc_residual
from .twisted import (
    CohomologyTable,
    algebra_complex,
    brane_complex,
    check_poincare,
    cohomology,
    d_squared_failures,
    dualize,
    euler_check,
    module_complex,
    parse_window,
    prepare,
    word_complex,
)

LOG = get_logger(__name__)

Check = Tuple[str, bool, str]

# ð² and the Maurer-Cartan residual are always checked at least this far
MIN_VERIFY_LENGTH = 8


class StringTopologyPipeline:
    """
    Runs the string-topology computations end to end: model loading,
    contraction, Chen connection, twisted complexes, cohomology and rings.
    Keeps per-stage timings in `timing`.
    """

    def __init__(self, config: EngineConfig = None):
        self.config = config or EngineConfig()
        self.timing: Dict[str, float] = {}

    @contextmanager
    def _stage(self, key: str, label: str):
        LOG.info(f"🔄 {label}...")
        start = time.time()
        yield
        elapsed = time.time() - start
        self.timing[key] = self.timing.get(key, 0.0) + elapsed
        LOG.info(f"   ⏱️ {label}: {format_seconds(elapsed)}")

    def _start(self, command: str, spec: str):
        self.timing = {}
        self._total_start = time.time()
        LOG.info("=" * 60)
        LOG.info(f"🚀 StringTopologyPipeline - {command}")
        LOG.info("=" * 60)
        LOG.info(f"📁 Model: {spec}")

    def _finish(self):
        self.timing["total"] = time.time() - self._total_start
        LOG.info(f"⏱️ Total processing time: {format_seconds(self.timing['total'])}")

    # ---------- shared stages ----------

    def load(self, spec: str) -> DGAlgebra:
        with self._stage("model", "Loading model"):
            return load_model_spec(spec)

    def prepare_connection(self, A: DGAlgebra, window, length: Optional[int] = None) -> Tuple[HomotopyData, Connection]:
        with self._stage("contraction", "Building contraction"):
            hd = build_contraction(A)
        with self._stage("connection", "Inducing connection"):
            if length is None:
                return connection_for(A, window, hd=hd)
            return hd, chen_connection(A, hd, length)

    def _cohomology(self, cx, window) -> CohomologyTable:
        with self._stage("cohomology", f"Cohomology of {cx.name or cx.kind}"):
            return cohomology(cx, window, self.config)

    @staticmethod
    def named(space: TensorSpace, fixture: Dict[str, str], reps: Optional[Dict[str, str]]) -> Dict[str, TwistedElement]:
        texts = dict(fixture)
        texts.update(reps or {})
        return parse_named(space, texts)

    @staticmethod
    def _preset_spec(spec: str):
        return None if is_model_file(spec) else parse_model_spec(spec)

    # ---------- commands ----------

    def loops(self, spec: str, top_degree: Optional[int], window, ring: bool = False,
              reps: Optional[Dict[str, str]] = None, route: str = "algebra") -> LoopReport:
        self._start("loops", spec)
        lo, hi = parse_window(window)
        A = self.load(spec)
        n = A.max_degree if top_degree is None else top_degree
        hd, conn = self.prepare_connection(A, (lo, hi))
        named = None
        if ring or reps:
            preset = self._preset_spec(spec)
            fixture = ring_fixture(*preset) if (ring and preset) else {}
            named = self.named(conn.space, fixture, reps)
        with self._stage("cohomology", "Loop homology"):
            report = loop_homology(A, n, (lo, hi), named, route=route, config=self.config, conn=conn, hd=hd)
        self._finish()
        return report

    def hochschild(self, spec: str, window, module: Optional[str] = None) -> Tuple[CohomologyTable, str]:
        self._start("hochschild", spec)
        lo, hi = parse_window(window)
        A = self.load(spec)
        hd, conn = self.prepare_connection(A, (lo, hi))
        with self._stage("complex", "Assembling twisted complex"):
            if module == "dual":
                cx = module_complex(conn, dualize(A), hd)
                convention = "Hoch^d(A, A*) = H^d(A*⊗k<X>, d_ω)"
            else:
                cx = algebra_complex(conn, hd)
                convention = "Hoch^d(A, A) = H^d(A⊗k<X>, d_ω)"
        table = self._cohomology(cx, (lo, hi))
        self._finish()
        return table, convention

    def based(self, spec: str, window, ring: bool = False, reps: Optional[Dict[str, str]] = None) -> LoopReport:
        self._start("based", spec)
        lo, hi = parse_window(window)
        A = self.load(spec)
        hd, conn = self.prepare_connection(A, (lo, hi))
        named = None
        if ring or reps:
            preset = self._preset_spec(spec)
            fixture = based_fixture(*preset) if (ring and preset) else {}
            named = self.named(word_complex(conn).space, fixture, reps)
        with self._stage("cohomology", "Based loop homology"):
            report = based_loop_ring(A, (lo, hi), named, config=self.config, conn=conn, hd=hd)
        self._finish()
        return report

    def brane(self, spec: str, sub: str, map_path: str, top_degree: Optional[int], window,
              intersection: bool = False, ring: bool = False,
              reps: Optional[Dict[str, str]] = None) -> Tuple[LoopReport, Optional[IntersectionReport]]:
        self._start("brane", spec)
        lo, hi = parse_window(window)
        A_M = self.load(spec)
        A_Z = self.load(sub)
        with self._stage("model", "Loading morphism"):
            f = load_morphism(map_path, A_M, A_Z)
        p = A_Z.max_degree if top_degree is None else top_degree
        hd, conn = self.prepare_connection(A_M, (lo, hi))

        model_preset, sub_preset = self._preset_spec(spec), self._preset_spec(sub)
        named = None
        if ring or intersection or reps:
            fixture = brane_fixture(model_preset, sub_preset) if (model_preset and sub_preset) else {}
            named = self.named(brane_complex(conn, f).space, fixture, reps)
        with self._stage("cohomology", "Brane homology"):
            report = brane_homology(A_M, A_Z, p, f, (lo, hi), named, config=self.config, conn=conn, hd=hd)

        images = None
        if intersection:
            loop_fixture = ring_fixture(*model_preset) if model_preset else {}
            with self._stage("ring", "Intersection map"):
                loops = loop_homology(A_M, A_M.max_degree, (lo, hi), self.named(conn.space, loop_fixture, None),
                                      config=self.config, conn=conn, hd=hd)
                if loops.ring is not None and report.ring is not None:
                    images = intersection_report(f, loops.ring, report.ring)
        self._finish()
        return report, images

    def connection(self, spec: str, max_len: int) -> Tuple[Connection, HomotopyData]:
        self._start("connection", spec)
        A = self.load(spec)
        hd, conn = self.prepare_connection(A, None, length=max_len)
        self._finish()
        return conn, hd

    # ---------- invariant suite ----------

    def verify(self, spec: str, window, oracle: bool = False, poincare: bool = False,
               sub: Optional[str] = None, map_path: Optional[str] = None) -> List[Check]:
        """Every invariant check as (name, ok, detail); never raises on a failed check"""
        self._start("verify", spec)
        lo, hi = parse_window(window)
        A = self.load(spec)
        checks: List[Check] = []

        report = validate_dga(A)
        checks.append(("validate_dga", report.ok, ", ".join(report.axioms_failed())))
        if not report.ok:
            self._finish()
            return checks

        with self._stage("contraction", "Building contraction"):
            hd = build_contraction(A)
        failures = check_contraction(hd)
        checks.append(("contraction", not failures, "; ".join(failures[:3])))

        length = max(A.max_degree - lo + 1, MIN_VERIFY_LENGTH)
        with self._stage("connection", "Inducing connection"):
            conn = chen_connection(A, hd, min(length, self.config.MAX_WORD_LENGTH_CAP))
        cx = algebra_complex(conn, hd)

        residual = mc_residual(A, conn)
        checks.append(("mc_residual", residual.is_zero, f"{len(residual.terms)} nonzero terms"))
        squares = {name: p for name, p in eth_square(conn).items() if p}
        checks.append(("eth_square", not squares,
                       "; ".join(f"ð²({n}) = {format_polynomial(p, conn.gens.names)}" for n, p in squares.items())))
        checks.append(("eth_in_square_ideal", eth_in_square_ideal(conn), ""))

        with self._stage("complex", "Checking d_ω²"):
            failures = d_squared_failures(prepare(cx, (lo, hi), self.config), (lo, hi))
        checks.append(("d_omega_squared", not failures, "; ".join(failures[:3])))

        table = self._cohomology(cx, (lo, hi))
        longer_length = max(cx.window_length((lo, hi)), conn.max_len) + self.config.TRUNCATION_MARGIN
        longer = self._cohomology(cx.extended(longer_length), (lo, hi))
        checks.append(("truncation", longer.dims() == table.dims(),
                       f"length {conn.max_len} vs {longer_length}"))

        chains, homology = euler_check(table)
        checks.append(("euler", chains == homology, f"{chains} vs {homology}"))

        with self._stage("oracle", "Twisting cochain residual"):
            twisting = twisting_cochain_check(A, hd, conn)
        checks.append(("twisting_cochain", twisting.is_zero, f"{len(twisting.values)} nonzero bar words"))

        if oracle:
            checks.extend(self._oracle_checks(A, conn, hd, table, (lo, hi)))
        if sub and map_path:
            checks.extend(self._brane_checks(A, sub, map_path, conn, hd, (lo, hi), oracle))
        if poincare:
            checks.extend(self._poincare_checks(A, conn, hd, table, (lo, hi)))

        self._finish()
        return checks

    def _oracle_checks(self, A, conn, hd, table, window) -> List[Check]:
        with self._stage("oracle", "Brute-force bar complex"):
            brute = hochschild_dims_bruteforce(A, window, config=self.config)
        checks = [("oracle", brute.dims == table.dims(), _dims_detail(table.dims(), brute.dims))]

        dual = module_complex(conn, dualize(A), hd)
        dual_table = self._cohomology(dual, window)
        with self._stage("oracle", "Brute-force bar complex (dual module)"):
            brute_dual = hochschild_dims_bruteforce(A, window, module=dualize(A), config=self.config)
        checks.append(("oracle_dual", brute_dual.dims == dual_table.dims(),
                       _dims_detail(dual_table.dims(), brute_dual.dims)))
        return checks

    def _brane_checks(self, A_M, sub, map_path, conn, hd, window, oracle: bool) -> List[Check]:
        A_Z = self.load(sub)
        f = load_morphism(map_path, A_M, A_Z)
        module = restrict_along(f)
        report = validate_bimodule(module)
        checks = [("brane_bimodule", report.ok, ", ".join(report.axioms_failed()))]
        cx = brane_complex(conn, f, hd)
        failures = d_squared_failures(prepare(cx, window, self.config), window)
        checks.append(("brane_d_squared", not failures, "; ".join(failures[:3])))
        if oracle:
            table = self._cohomology(cx, window)
            with self._stage("oracle", "Brute-force bar complex (brane)"):
                brute = hochschild_dims_bruteforce(A_M, window, module=module, config=self.config)
            checks.append(("oracle_brane", brute.dims == table.dims(), _dims_detail(table.dims(), brute.dims)))
        return checks

    def _poincare_checks(self, A, conn, hd, table, window) -> List[Check]:
        n = A.max_degree
        lo, hi = window
        dual = module_complex(conn, dualize(A), hd)
        dual_table = self._cohomology(dual, (lo - n, hi - n))
        with self._stage("ring", "Poincaré map"):
            result = check_poincare(table.complex, dual, n, window, config=self.config, tables=(table, dual_table))
        short = [f"{d}: rank {r} of {a}/{b}" for d, (r, a, b) in result.ranks.items() if not r == a == b]
        checks = [("poincare_chain_map", not result.chain_map_failures, "; ".join(result.chain_map_failures[:3])),
                  ("poincare_rank", all(r == a == b for r, a, b in result.ranks.values()), "; ".join(short))]

        via_algebra = loop_homology(A, n, window, config=self.config, conn=conn, hd=hd)
        via_dual = loop_homology(A, n, window, route="dual", config=self.config, conn=conn, hd=hd)
        checks.append(("dual_route", via_algebra.betti == via_dual.betti,
                       _dims_detail(via_algebra.betti, via_dual.betti)))
        return checks


def _dims_detail(expected: Dict[int, int], actual: Dict[int, int]) -> str:
    diffs = [f"{d}: {expected.get(d)} vs {actual.get(d)}" for d in sorted(set(expected) | set(actual))
             if expected.get(d) != actual.get(d)]
    return "; ".join(diffs)
