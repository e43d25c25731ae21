"""Run a fixed sequence of checks on one input and assemble a report.

Reports are plain dicts with a fixed key order. Rationals are rendered as
"p/q" strings so the JSON form round-trips like the input files.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import cbd as cbd_mod
from .cech import all_obstructions
from .errors import InvariantBreach, ParseError, SignallingError
from .glue import global_sections, non_extendable, signalling_report, support_model
from .lp import DEFAULT_MAX_COLUMNS, contextual_fraction, noncontextuality_lp
from .scenario import EmpiricalModel, Section, format_rational, load_json, model_from_dict

CHECKS = ("signalling", "logical", "strong", "lp", "fraction", "cech", "cbd", "qq")
SCENARIO_CHECKS = CHECKS[:6]
CBD_CHECKS = CHECKS[6:]


class UsageError(ValueError):
    exit_code = 64


@dataclass
class AnalysisRequest:
    checks: tuple[str, ...]
    fmt: str = "text"
    max_columns: int = DEFAULT_MAX_COLUMNS
    timing: bool = False
    path: str | None = field(default=None)

    def __post_init__(self):
        if not self.checks:
            raise UsageError("at least one check is required")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s) {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
        if self.fmt not in ("text", "json"):
            raise UsageError(f"unknown format {self.fmt!r}")
        self.checks = tuple(c for c in CHECKS if c in self.checks)


def load_input(text: str | bytes):
    """Parse either file format; returns ("scenario" | "cbd", object)."""
    data = load_json(text)
    if "observables" in data:
        return "scenario", model_from_dict(data)
    if "contents" in data:
        return "cbd", cbd_mod.system_from_dict(data)
    raise ParseError("input is neither a scenario file (observables) nor a CbD file (contents)")


def q(x: Fraction) -> str:
    return format_rational(x)


def section_json(s: Section) -> dict:
    return {"context": list(s.context.observables), "values": s.as_dict()}


def _signalling(m: EmpiricalModel, req) -> dict:
    rep = signalling_report(m)
    return {
        "signalling": rep.signalling,
        "violations": [
            {
                "contexts": list(v.pair),
                "overlap": list(v.overlap.observables),
                "section": v.section.as_dict(),
                "p_i": q(v.p_i),
                "p_j": q(v.p_j),
            }
            for v in rep.violations
        ],
    }


def _logical(m: EmpiricalModel, req) -> dict:
    blocked = non_extendable(support_model(m))
    return {
        "logically_contextual": bool(blocked),
        "witness": section_json(blocked[0]) if blocked else None,
        "non_extendable": [section_json(s) for s in blocked],
    }


def _strong(m: EmpiricalModel, req) -> dict:
    gs = global_sections(support_model(m))
    return {
        "strongly_contextual": not gs,
        "global_sections": len(gs),
        "witness": gs[0].as_dict() if gs else None,
    }


def _lp(m: EmpiricalModel, req) -> dict:
    res = noncontextuality_lp(m, req.max_columns)
    out = {"feasible": res.feasible}
    if res.feasible:
        sc = m.scenario
        out["joint"] = [
            {"assignment": g.as_dict(), "weight": q(w)}
            for g, w in sorted(res.joint.weights.items(), key=lambda kv: sc.sort_key(kv[0]))
        ]
    else:
        out["farkas"] = {
            "rows": [{"context": i, "section": s.as_dict()} for i, s in res.incidence.rows],
            "y": [q(v) for v in res.certificate],
        }
    return out


def _fraction(m: EmpiricalModel, req) -> dict:
    try:
        return {"contextual_fraction": q(contextual_fraction(m, req.max_columns))}
    except SignallingError as exc:
        return {"contextual_fraction": None, "refused": str(exc)}


def _cech(m: EmpiricalModel, req) -> dict:
    results = all_obstructions(support_model(m))
    return {
        "all_vanish": all(r.vanishes for r in results),
        "sections": [
            {
                "context": r.context_index,
                "section": r.section.as_dict(),
                "vanishes": r.vanishes,
                "witness": [list(z) for z in r.witness] if r.witness else None,
                "note": r.note,
            }
            for r in results
        ],
    }


def _cbd(sys: cbd_mod.CbDSystem, req) -> dict:
    verdict = cbd_mod.cbd_contextual(sys, req.max_columns)
    out = {
        "contextual": verdict.contextual,
        "delta": {k: q(v) for k, v in verdict.delta.items()},
        "total_delta": q(verdict.total_delta),
        "variables": [f"{c}@{ctx}" for c, ctx in verdict.variables],
    }
    try:
        D, contextual = cbd_mod.cyclic_criterion(sys)
    except ValueError:
        out["cyclic"] = None
    else:
        if contextual != verdict.contextual:
            raise InvariantBreach("cyclic criterion disagrees with the coupling LP")
        out["cyclic"] = {"D": q(D), "contextual": contextual}
    if verdict.coupling is not None:
        out["coupling"] = [
            {"values": "".join(map(str, bits)), "weight": q(w)}
            for bits, w in sorted(verdict.coupling.items())
        ]
    else:
        out["certificate"] = [q(v) for v in verdict.certificate]
    return out


def _qq(sys: cbd_mod.CbDSystem, req) -> dict:
    stat = cbd_mod.qq_statistic(cbd_mod.order_effect_from_system(sys))
    return {"q": q(stat), "qq_equality": stat == 0}


RUNNERS = {
    "signalling": _signalling,
    "logical": _logical,
    "strong": _strong,
    "lp": _lp,
    "fraction": _fraction,
    "cech": _cech,
    "cbd": _cbd,
    "qq": _qq,
}


def analyze(obj, req: AnalysisRequest, kind: str | None = None) -> dict:
    if kind is None:
        kind = "scenario" if isinstance(obj, EmpiricalModel) else "cbd"
    allowed = SCENARIO_CHECKS if kind == "scenario" else CBD_CHECKS
    wrong = [c for c in req.checks if c not in allowed]
    if wrong:
        raise UsageError(f"check(s) {', '.join(wrong)} do not apply to a {kind} input")

    results = {}
    timing = {}
    for name in req.checks:
        t0 = time.perf_counter()
        results[name] = RUNNERS[name](obj, req)
        timing[name] = round(time.perf_counter() - t0, 6)

    report = {"kind": kind, "checks": list(req.checks), "results": results}
    if kind == "scenario":
        report["verdict"] = _verdict(results)
    if req.timing:
        report["timing"] = timing
    return report


def _verdict(results: dict) -> dict:
    v = {}
    if "signalling" in results:
        v["signalling"] = results["signalling"]["signalling"]
    if "lp" in results:
        v["probabilistically_contextual"] = not results["lp"]["feasible"]
    if "logical" in results:
        v["logically_contextual"] = results["logical"]["logically_contextual"]
    if "strong" in results:
        v["strongly_contextual"] = results["strong"]["strongly_contextual"]
    if v.get("strongly_contextual") and v.get("logically_contextual") is False:
        raise InvariantBreach("strong contextuality without logical contextuality")
    if v.get("signalling"):
        v["confounded_by_direct_influence"] = True
        v["note"] = "overlap marginals differ; use the cbd checks on a CbD encoding of this system"
    elif v.get("logically_contextual") and v.get("probabilistically_contextual") is False:
        raise InvariantBreach("logically contextual model admits a global distribution")
    return v


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _fmt_section(d: dict) -> str:
    return "(" + ",".join(f"{k}={v}" for k, v in d.items()) + ")"


def to_text(report: dict) -> str:
    lines = [f"input: {report['kind']}"]
    r = report["results"]
    if "signalling" in r:
        x = r["signalling"]
        lines.append(f"signalling: {'yes' if x['signalling'] else 'no'} ({len(x['violations'])} overlap disagreements)")
        for v in x["violations"]:
            lines.append(
                f"  contexts {v['contexts'][0]},{v['contexts'][1]} on {_fmt_section(v['section'])}: "
                f"{v['p_i']} vs {v['p_j']}"
            )
    if "logical" in r:
        x = r["logical"]
        if x["logically_contextual"]:
            lines.append(f"logical: yes, witness {_fmt_section(x['witness']['values'])}"
                         f" ({len(x['non_extendable'])} non-extendable sections)")
        else:
            lines.append("logical: no")
    if "strong" in r:
        x = r["strong"]
        if x["strongly_contextual"]:
            lines.append("strong: yes (no global section)")
        else:
            lines.append(f"strong: no, global section {_fmt_section(x['witness'])} ({x['global_sections']} total)")
    if "lp" in r:
        x = r["lp"]
        if x["feasible"]:
            lines.append(f"lp: feasible, joint over {len(x['joint'])} global assignments")
        else:
            lines.append("lp: infeasible, Farkas certificate verified")
    if "fraction" in r:
        x = r["fraction"]
        if x["contextual_fraction"] is None:
            lines.append(f"fraction: refused ({x['refused']})")
        else:
            lines.append(f"fraction: {x['contextual_fraction']}")
    if "cech" in r:
        x = r["cech"]
        bad = [s for s in x["sections"] if not s["vanishes"]]
        lines.append(f"cech: {len(bad)} of {len(x['sections'])} supported sections obstructed")
        for s in bad:
            lines.append(f"  obstructed {_fmt_section(s['section'])}")
    if "cbd" in r:
        x = r["cbd"]
        line = f"cbd: {'contextual' if x['contextual'] else 'noncontextual'}, delta {x['total_delta']}"
        if x["cyclic"]:
            line += f", D {x['cyclic']['D']}"
        lines.append(line)
    if "qq" in r:
        x = r["qq"]
        lines.append(f"qq: q = {x['q']}{' (QQ equality holds)' if x['qq_equality'] else ''}")
    v = report.get("verdict", {})
    if v.get("confounded_by_direct_influence"):
        lines.append(f"note: {v['note']}")
    if "timing" in report:
        lines.append("timing: " + ", ".join(f"{k} {t}s" for k, t in report["timing"].items()))
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    return to_json(report) if fmt == "json" else to_text(report)

