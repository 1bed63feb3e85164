"""Input files, analysis orchestration and the JSON report."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from . import dmod
from .foliation import (
    FoliationPresentation,
    PoissonError,
    VectorField,
    VectorFieldError,
    check_lie_subalgebra,
    double_orthogonal_check,
    dual_integrability_check,
    hamiltonian_foliation,
    orthogonal_complement,
    rank_profile,
    strata,
)
from .parsing import ParseError
from .poly import parse_poly

PHASES = (
    "lie",
    "orthogonal",
    "integrability",
    "rank",
    "strata",
    "hypotheses",
    "charvar",
    "koszul",
    "cohomology",
    "witness",
    "dirr",
    "first_integrals",
)
DEPENDENT = ("charvar", "koszul", "cohomology", "dirr")


class InputError(ValueError):
    """Schema or expression error in an input file; ``offset`` when known."""

    def __init__(self, message: str, offset: Optional[int] = None, where: str = ""):
        text = message if offset is None else f"{message} (offset {offset})"
        super().__init__(f"{where}: {text}" if where else text)
        self.offset = offset
        self.where = where


def load_presentation(data: dict) -> FoliationPresentation:
    """Build a presentation from the decoded input document."""
    if not isinstance(data, dict):
        raise InputError("top level must be an object")
    variables = data.get("variables")
    if not isinstance(variables, list) or not variables or not all(isinstance(v, str) for v in variables):
        raise InputError("'variables' must be a nonempty list of strings")
    if len(set(variables)) != len(variables) or "i" in variables:
        raise InputError("'variables' must be distinct and must not use the name 'i'")
    unknown = set(data) - {"variables", "fields", "poisson"}
    if unknown:
        raise InputError(f"unknown keys {sorted(unknown)}")
    fields_ = data.get("fields", [])
    if not isinstance(fields_, list) or not all(isinstance(f, str) for f in fields_):
        raise InputError("'fields' must be a list of expression strings")
    generators = []
    if "poisson" in data:
        matrix = data["poisson"]
        if not isinstance(matrix, list) or not all(isinstance(row, list) for row in matrix):
            raise InputError("'poisson' must be a matrix of expression strings")
        entries = []
        for i, row in enumerate(matrix):
            parsed = []
            for j, text in enumerate(row):
                if not isinstance(text, str):
                    raise InputError("'poisson' entries must be strings", where=f"poisson[{i}][{j}]")
                try:
                    parsed.append(parse_poly(text, variables))
                except ParseError as exc:
                    raise InputError(exc.message, exc.offset, f"poisson[{i}][{j}]") from exc
            entries.append(parsed)
        try:
            generators.extend(hamiltonian_foliation(entries, variables).generators)
        except PoissonError as exc:
            raise InputError(str(exc), where="poisson") from exc
    for idx, text in enumerate(fields_):
        try:
            v = VectorField.parse(text, variables)
        except ParseError as exc:
            raise InputError(exc.message, exc.offset, f"fields[{idx}]") from exc
        except VectorFieldError as exc:
            raise InputError(str(exc), where=f"fields[{idx}]") from exc
        if v.is_zero():
            raise InputError("zero vector field", where=f"fields[{idx}]")
        generators.append(v)
    if not generators:
        raise InputError("no vector fields given")
    return FoliationPresentation(tuple(variables), tuple(generators))


def parse_field_file(path) -> FoliationPresentation:
    """Read a JSON input file.  I/O problems raise OSError, content problems InputError."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    return load_presentation(data)


@dataclass
class AnalysisConfig:
    input: str = ""
    truncation: int = 6
    koszul_cap: int = 4
    fi_cap: int = 3
    window: int = 3
    output: Optional[str] = None
    only: tuple = PHASES

    def __post_init__(self):
        if self.truncation < 1:
            raise ValueError("truncation must be at least 1")
        if min(self.koszul_cap, self.fi_cap) < 0:
            raise ValueError("degree caps must be non-negative")
        if self.window < 1:
            raise ValueError("window must be at least 1")
        bad = set(self.only) - set(PHASES)
        if bad:
            raise ValueError(f"unknown phases {sorted(bad)}")


@dataclass
class AnalysisReport:
    input: dict
    config: dict
    lie_closure: Optional[dict] = None
    orthogonal: Optional[dict] = None
    integrability: Optional[dict] = None
    rank_profile: Optional[dict] = None
    strata: Optional[list] = None
    hypotheses: Optional[dict] = None
    characteristic_variety: Optional[dict] = None
    koszul: Optional[dict] = None
    cohomology: Optional[dict] = None
    witness: Optional[dict] = None
    d_irr: Optional[dict] = None
    first_integrals: Optional[dict] = None
    hypothesis_failure: Optional[str] = None
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, timing: bool = True) -> str:
        data = self.to_dict()
        if not timing:
            data.pop("timing")
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))


def _strs(items):
    return [str(p) for p in items]


def _point(point):
    return None if point is None else [str(c) for c in point]


def run_analysis(F: FoliationPresentation, config: AnalysisConfig) -> AnalysisReport:
    selected = [p for p in PHASES if p in config.only]
    report = AnalysisReport(
        input={"variables": list(F.ambient), "fields": _strs(F.generators)},
        config={
            "truncation": config.truncation,
            "koszul_cap": config.koszul_cap,
            "fi_cap": config.fi_cap,
            "window": config.window,
            "only": selected,
        },
    )
    clock = {}

    def timed(name, fn):
        start = time.perf_counter()
        try:
            return fn()
        finally:
            clock[name] = round(time.perf_counter() - start, 4)

    hyp = None
    if "hypotheses" in selected or any(p in selected for p in DEPENDENT):
        hyp = timed("hypotheses", lambda: dmod.check_hypotheses(F))
        if "hypotheses" in selected:
            report.hypotheses = {
                "pairwise_commuting": hyp.pairwise_commuting,
                "failing_pair": list(hyp.failing_pair) if hyp.failing_pair else None,
                "commutator": str(hyp.commutator) if hyp.commutator is not None else None,
                "symbols": _strs(hyp.symbols),
                "symbols_regular_sequence": hyp.symbols_regular_sequence,
                "symbol_ideal_dimension": hyp.symbol_ideal_dimension,
                "regular_in_d_assumed": hyp.regular_in_d_assumed,
                "passed": hyp.passed,
            }

    if "lie" in selected:
        lie = timed("lie", lambda: check_lie_subalgebra(F))
        report.lie_closure = {
            "closed": lie.closed,
            "failing_pair": list(lie.failing_pair) if lie.failing_pair else None,
            "bracket": str(lie.bracket) if lie.bracket is not None else None,
        }
    if "orthogonal" in selected:
        def _orth():
            perp = orthogonal_complement(F)
            return {
                "generators": [_strs(w) for w in perp.generators],
                "double_orthogonal": double_orthogonal_check(F),
            }

        report.orthogonal = timed("orthogonal", _orth)
    if "integrability" in selected:
        integ = timed("integrability", lambda: dual_integrability_check(F))
        report.integrability = {
            "forms": [_strs(w) for w in integ.forms.generators],
            "pairings": [[_strs(row) for row in table] for table in integ.pairings],
            "all_zero": integ.all_zero,
        }
    profile = None
    if "rank" in selected or "strata" in selected:
        profile = timed("rank", lambda: rank_profile(F))
        if "rank" in selected:
            report.rank_profile = {"rk": profile.rk, "cork": profile.cork, "irr": profile.irr}
    if "strata" in selected:
        st = timed("strata", lambda: strata(F, profile))
        report.strata = [
            {
                "j": s.j,
                "vanishing_ideal": _strs(s.vanishing_ideal),
                "nonvanishing_ideal": _strs(s.nonvanishing_ideal),
                "closure_dimension": s.closure_dimension,
                "nonempty": s.nonempty,
            }
            for s in st
        ]
    if "witness" in selected:
        w = timed("witness", lambda: dmod.top_cohomology_witness(F))
        report.witness = {"exists": w.exists, "point": _point(w.point)}
    if "first_integrals" in selected:
        basis = timed("first_integrals", lambda: dmod.first_integrals(F, config.fi_cap))
        report.first_integrals = {"max_degree": config.fi_cap, "basis": _strs(basis)}

    dependent = [p for p in DEPENDENT if p in selected]
    if dependent and not hyp.passed:
        if not hyp.pairwise_commuting:
            reason = f"generators {list(hyp.failing_pair)} do not commute: commutator {hyp.commutator}"
        else:
            reason = (
                f"symbols are not a regular sequence (dimension {hyp.symbol_ideal_dimension}, "
                f"expected {2 * F.n - F.r})"
            )
        report.hypothesis_failure = reason
        failure = {"error": f"hypotheses not verified: {reason}"}
        for p in dependent:
            setattr(report, _SECTION[p], failure)
        dependent = []

    if "charvar" in dependent:
        cv = timed("charvar", lambda: dmod.characteristic_variety(F))
        report.characteristic_variety = {
            "generators": _strs(cv.generators),
            "dimension": cv.dimension,
            "codimension": cv.codimension,
            "rk": cv.rank,
            "codimension_equals_rk": cv.codimension_matches_rank,
        }
    if "koszul" in dependent:
        kz = timed("koszul", lambda: dmod.koszul_graded_exactness(F, config.koszul_cap))
        report.koszul = {
            "degree_cap": kz.degree_cap,
            "dims": kz.dims,
            "homogeneous": kz.homogeneous,
            "exact_below_top": kz.exact_below_top(),
        }
    coh = None
    if "cohomology" in dependent or "dirr" in dependent:
        coh = timed(
            "cohomology",
            lambda: dmod.truncated_endo_cohomology(F, max(config.truncation, _min_level(F)), config.window),
        )
        if "cohomology" in dependent:
            report.cohomology = {
                "levels": coh.levels,
                "dims": coh.dims,
                "window": coh.window,
                "lookahead": coh.lookahead,
                "stabilized": coh.stabilized,
                "constant": coh.constant,
                "d_squared_zero": coh.d_squared_zero,
            }
    if "dirr" in dependent:
        dr = timed("dirr", lambda: dmod.d_irregularity(F, cohomology=coh))
        report.d_irr = {
            "d_irr_sequence": [{"k": k, "evidence": ev} for k, ev in dr.d_irr_sequence],
            "d_irr": dr.d_irr,
            "irr": dr.geometric_irr,
            "d_irr_equals_irr": dr.d_irr_equals_irr,
        }
    report.timing = clock
    return report


def _min_level(F):
    return max(op.bernstein_degree() for op in F.operators())


_SECTION = {
    "charvar": "characteristic_variety",
    "koszul": "koszul",
    "cohomology": "cohomology",
    "dirr": "d_irr",
}
