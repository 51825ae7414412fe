"""Machine-readable (JSON) and human-readable (text) reports."""
from __future__ import annotations

import json
from typing import Any, Dict, List, Mapping

from . import __version__
from .atoms import Value, format_atom
from .cause import CauseVerdict, Witness
from .collective import AggregateReport
from .harm import HarmAssessment, QualitativeHarm
from .uncertainty import WqhReport

SCHEMA_VERSION = 1


def envelope(command: str, model: str, query: Mapping[str, Any], result: Any) -> Dict[str, Any]:
    return {
        "engine": f"harmcalc {__version__}",
        "schema": SCHEMA_VERSION,
        "command": command,
        "model": model,
        "query": dict(query),
        "result": result,
    }


def settings(pairs) -> Dict[str, Value]:
    return {name: value for name, value in (pairs.items() if isinstance(pairs, Mapping) else pairs)}


def witness(w: Witness) -> Dict[str, Value]:
    return settings(zip(w.held, w.values))


def verdict(v: CauseVerdict) -> Dict[str, Any]:
    return {"holds": v.holds, "ac1": v.ac1, "ac2": v.ac2, "ac3": v.ac3,
            "witnesses": [witness(w) for w in v.witnesses]}


def assessment(a: HarmAssessment) -> Dict[str, Any]:
    return {
        "value": a.value,
        "actual_outcome": a.actual_outcome,
        "actual_utility": a.actual_utility,
        "witnesses": [
            {"alternative": settings(w.alternative), "contrast_outcome": w.contrast_outcome,
             "held": [witness(h) for h in w.held]}
            for w in a.witnesses
        ],
    }


def qualitative(q: QualitativeHarm) -> Dict[str, Any]:
    out = {"harmed": q.harmed, "actual_outcome": q.actual_outcome}
    if q.harmed:
        out["alternative"] = settings(q.alternative)
        out["contrast_outcome"] = q.contrast_outcome
    return out


def wqh_report(r: WqhReport) -> Dict[str, Any]:
    return {
        "total": r.total,
        "per_context": [
            {"context": dict(c.context), "probability": c.literal, "weight": c.weight, "harm": c.harm}
            for c in r.per_context
        ],
    }


def aggregate(r: AggregateReport) -> Dict[str, Any]:
    return {
        "per_agent": dict(r.per_agent),
        "group_stats": dict(r.group_stats),
        "population_average": r.population_average,
        "disproportionate": list(r.disproportionate),
        "penalty": r.penalty,
        "total": r.total,
    }


def to_json(report: Mapping[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- text ------------------------------------------------------------------


def _scalar(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (bool, int, str)):
        return format_atom(v) if not isinstance(v, str) else v
    if isinstance(v, Mapping):
        return ", ".join(f"{k}={_scalar(x)}" for k, x in sorted(v.items())) or "{}"
    if isinstance(v, list):
        return "[" + "; ".join(_scalar(x) for x in v) + "]"
    return str(v)


def _table(rows: List[Mapping[str, Any]], indent: str) -> List[str]:
    cols = sorted({k for r in rows for k in r})
    cells = [[_scalar(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = [indent + "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += [indent + "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in cells]
    return lines


def _lines(value, indent="") -> List[str]:
    out = []
    for key in sorted(value):
        v = value[key]
        if isinstance(v, Mapping) and v and any(isinstance(x, (Mapping, list)) for x in v.values()):
            out.append(f"{indent}{key}:")
            out.extend(_lines(v, indent + "  "))
        elif isinstance(v, list) and any(v) and all(isinstance(x, Mapping) for x in v):
            out.append(f"{indent}{key}:")
            if all(not any(isinstance(y, list) for y in x.values()) for x in v):
                out.extend(_table(v, indent + "  "))
            else:
                for i, x in enumerate(v, 1):
                    out.append(f"{indent}  [{i}]")
                    out.extend(_lines(x, indent + "    "))
        else:
            out.append(f"{indent}{key}: {_scalar(v)}")
    return out


def to_text(report: Mapping[str, Any]) -> str:
    head = f"{report['command']} {report['model']}  ({report['engine']})"
    return "\n".join([head] + _lines({"query": report["query"], "result": report["result"]})) + "\n"
