"""JSON codecs. Every number is exact: integers stay integers, rationals are "p/q"."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any
import json
import pathlib

import structlog

from .cone import GoodCone, ValidityReport, require_good
from .errors import DegenerateInputError
from .euler import EulerReport
from .exactnum import QuadNumber
from .graph import IsotropyGraph
from .reeb import ReebVector
from .surgery import PlanStep, SurgeryPlan

logger = structlog.get_logger(__name__)


def rational_to_json(x: Fraction | int) -> str:
    return str(Fraction(x))


def rational_from_json(x: Any) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise TypeError(f"expected an integer or a 'p/q' string, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise TypeError(f"malformed rational {x!r}") from exc


def quad_to_json(x: QuadNumber) -> dict[str, Any]:
    return {"rat": rational_to_json(x.rat), "irr": rational_to_json(x.irr), "d": x.d}


def default(obj: Any) -> Any:
    """``json.dumps`` hook for the exact number types."""
    if isinstance(obj, Fraction):
        return rational_to_json(obj)
    if isinstance(obj, QuadNumber):
        return quad_to_json(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps(obj: Any) -> str:
    return json.dumps(obj, default=default, sort_keys=True)


def cone_to_json(cone: GoodCone) -> list[list[int]]:
    return [list(n) for n in cone]


def cone_from_json(obj: Any) -> GoodCone:
    if not isinstance(obj, list) or not all(isinstance(n, list) for n in obj):
        raise TypeError("a cone is a list of integer 3-vectors")
    if any(isinstance(a, bool) or not isinstance(a, int) for n in obj for a in n):
        raise TypeError("cone normals must be integers")
    return GoodCone.load(obj)


def reeb_to_json(reeb: ReebVector) -> dict[str, Any]:
    return {
        "p": [rational_to_json(a) for a in reeb.p],
        "q": [rational_to_json(a) for a in reeb.q],
        "d": reeb.d,
    }


def reeb_from_json(obj: dict[str, Any], d: int | None = None) -> ReebVector:
    """Parse a Reeb vector; ``d`` must agree with the stored discriminant when both are given."""
    stored = obj.get("d")
    if stored is not None and d is not None and int(stored) != d:
        raise TypeError(f"Reeb vector uses sqrt({stored}), expected sqrt({d})")
    p = tuple(rational_from_json(a) for a in obj["p"])
    q = tuple(rational_from_json(a) for a in obj.get("q", [0, 0, 0]))
    if stored is None and d is None:
        return ReebVector(p, q)  # type: ignore[arg-type]
    return ReebVector(p, q, int(stored if stored is not None else d))  # type: ignore[arg-type]


def report_to_json(report: ValidityReport) -> dict[str, Any]:
    return {
        "is_good": report.is_good,
        "failures": [{"kind": f.kind, "indices": list(f.indices)} for f in report.failures],
    }


def euler_report_to_json(report: EulerReport) -> dict[str, Any]:
    return {
        "ok": report.ok,
        "lhs": rational_to_json(report.lhs),
        "rhs": rational_to_json(report.rhs),
        "per_chain": [
            {"chain": t.chain, "d": t.d, "lcm": t.lcm, "total": rational_to_json(t.total)}
            for t in report.per_chain
        ],
        "terms": [
            {k: rational_to_json(v) if isinstance(v, Fraction) else v for k, v in term.items()}
            for term in report.terms
        ],
    }


def plan_to_json(plan: SurgeryPlan) -> dict[str, Any]:
    return {
        "start": plan.start,
        "steps": [{"op": s.op, **s.params, "pre": s.pre, "post": s.post} for s in plan.steps],
    }


def plan_from_json(obj: dict[str, Any]) -> SurgeryPlan:
    steps = []
    for raw in obj["steps"]:
        raw = dict(raw)
        op, pre, post = raw.pop("op"), raw.pop("pre", ""), raw.pop("post", "")
        steps.append(PlanStep(op, raw, pre, post))
    return SurgeryPlan(obj["start"], tuple(steps))


def graph_to_json(graph: IsotropyGraph) -> dict[str, Any]:
    def iso(e):
        return {"order": e.isotropy.order, "generator": [rational_to_json(x) for x in e.isotropy.generator]}

    return {
        "regular": [{"id": v.id, "order": v.order, "direction": list(v.direction)} for v in graph.regular],
        "fat": [
            {
                "id": v.id,
                "direction": list(v.direction),
                "genus": v.seifert[0],
                "multiplicities": list(v.seifert[1]),
                "normal_euler": list(v.normal_euler),
            }
            for v in graph.fat
        ],
        "edges": [{"id": e.id, "endpoints": list(e.endpoints), "isotropy": iso(e)} for e in graph.edges],
        "reeb_class": [quad_to_json(x) for x in graph.reeb_class],
        "chains": [{"edges": list(c.edges), "vertices": list(c.vertices)} for c in graph.chains],
    }


@dataclass(slots=True, frozen=True)
class Document:
    cone: GoodCone
    reeb: ReebVector | None = None
    metadata: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"cone": cone_to_json(self.cone), "metadata": dict(self.metadata)}
        if self.reeb is not None:
            obj["reeb"] = reeb_to_json(self.reeb)
        return obj

    @classmethod
    def from_json(cls, obj: Any, d: int | None = None) -> Document:
        """Parse and re-validate a document."""
        if isinstance(obj, list):
            obj = {"cone": obj}
        if not isinstance(obj, dict) or "cone" not in obj:
            raise TypeError("a document is an object with a 'cone' field")
        cone = require_good(cone_from_json(obj["cone"]))
        reeb = reeb_from_json(obj["reeb"], d) if obj.get("reeb") is not None else None
        return cls(cone, reeb, dict(obj.get("metadata") or {}))

    def dumps(self) -> str:
        return dumps(self.to_json())

    @classmethod
    def loads(cls, text: str, d: int | None = None) -> Document:
        return cls.from_json(json.loads(text), d)

    @classmethod
    def load(cls, path: str | pathlib.Path, d: int | None = None) -> Document:
        logger.debug("loading document", path=str(path))
        with open(path) as f:
            return cls.loads(f.read(), d)

    def save(self, path: str | pathlib.Path):
        with open(path, "w") as f:
            f.write(self.dumps())


def require_reeb(doc: Document) -> ReebVector:
    if doc.reeb is None:
        raise DegenerateInputError("document has no Reeb vector")
    return doc.reeb
