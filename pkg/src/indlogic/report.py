"""JSON reports and their human-readable rendering.

Every command produces a plain JSON-compatible dict; the text output is
computed from that dict alone, so a report that is dumped, re-read and
rendered again yields the same text.  Rationals are ``"num/den"`` strings
(integers as ``"n"``), events are hex bit masks, and every report carries
``"schema": SCHEMA``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

SCHEMA = "indlogic-report/1"


def rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dumps(report: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)


def new_report(command: str, **fields: Any) -> dict:
    out = {"schema": SCHEMA, "command": command}
    out.update(fields)
    return out


# ---------------------------------------------------------------------------
# Result encoders


def space_json(space) -> dict:
    """A finite probability space on strict models: outcome labels with their masses."""
    return {"outcomes": [{"outcome": o, "mass": rat(m)} for o, m in zip(space.outcomes, space.masses) if m]}


def derive_result_json(query_text: str, r, explain: bool) -> dict:
    out: dict = {"query": query_text, "status": r.status}
    if r.status == "forced":
        out["value"] = rat(r.value)
        if explain:
            out["measurability_forced"] = r.measurability_forced
            if r.witness is not None:
                out["witness"] = space_json(r.witness)
    elif r.status == "interval":
        out.update(lower=rat(r.lower), upper=rat(r.upper),
                   lower_attained=r.lower_attained, upper_attained=r.upper_attained,
                   witness_values=[rat(v) for v in r.witness_values])
        if explain and r.witnesses:
            out["witnesses"] = [space_json(w) for w in r.witnesses]
    return out


def fin_model_json(model) -> dict:
    return {"outcomes": [{"structure": w.text(), "mass": rat(m)} for w, m in model.outcomes if m]}


def poi_result_json(query_text: str, r, explain: bool) -> dict:
    out: dict = {"query": query_text, "status": r.status}
    if r.status == "forced":
        out["value"] = rat(r.value)
        if explain:
            out["certificate"] = [c.text() for c in r.certificate]
            if r.witness is not None:
                out["witness"] = fin_model_json(r.witness)
    elif r.status == "not-forced":
        out.update(lower=rat(r.lower), upper=rat(r.upper),
                   lower_attained=r.lower_attained, upper_attained=r.upper_attained,
                   witness_values=[rat(v) for v in r.witness_values],
                   equalities=list(r.equalities))
        if explain and r.witnesses:
            out["witnesses"] = [fin_model_json(w) for w in r.witnesses]
    else:
        out["reason"] = r.reason
    return out


# ---------------------------------------------------------------------------
# Text rendering


def _describe(res: dict) -> str:
    st = res["status"]
    if st == "forced":
        return f"forced {res['value']}"
    if st in ("interval", "not-forced"):
        lo = "[" if res["lower_attained"] else "("
        hi = "]" if res["upper_attained"] else ")"
        word = "interval" if st == "interval" else "not forced"
        text = f"{word} {lo}{res['lower']}, {res['upper']}{hi}"
        if res.get("witness_values"):
            text += "; witnesses give " + " and ".join(res["witness_values"])
        return text
    if st == "inconsistent":
        return "inconsistent" + (f" ({res['reason']})" if res.get("reason") else "")
    if st == "undefined":
        return "undefined (" + res.get("reason", "") + ")"
    return st


def _masses(block: dict, indent: str) -> list[str]:
    lines = []
    for o in block["outcomes"]:
        label = o.get("outcome", o.get("structure"))
        lines.append(f"{indent}{o['mass']} : {label}")
    return lines


def render_text(report: dict) -> str:
    """Human-readable text for a report dict."""
    lines = []
    cmd = report["command"]
    head = report.get("problem")
    if head:
        lines.append(f"{cmd} {head} ({report.get('kind', '')})".rstrip())
    else:
        lines.append(cmd)
    for c in report.get("caveats", []):
        lines.append(f"  caveat: {c}")
    if "invariant_permutations" in report:
        lines.append(f"  invariant permutations: {', '.join(report['invariant_permutations'])}")
    if "universe_size" in report:
        lines.append(f"  model classes up to the bound: {report['universe_size']}")
    if "consistent" in report and cmd in ("consistency", "poi"):
        lines.append(f"  consistent: {_yes_no(report['consistent'])}")
    if "model" in report and report["model"] is not None:
        lines.append("  model:")
        lines += _masses(report["model"], "    ")
    for res in report.get("results", []):
        lines.append(f"  {res['query']}: {_describe(res)}")
        for eq in res.get("equalities", []):
            lines.append(f"    equality: {eq}")
        for c in res.get("certificate", []):
            lines.append(f"    by {c}")
        if "measurability_forced" in res and not res["measurability_forced"]:
            lines.append("    note: the query event is not pinned by the constraint events at every witness")
        if "witness" in res:
            lines.append("    witness:")
            lines += _masses(res["witness"], "      ")
        for k, w in enumerate(res.get("witnesses", [])):
            lines.append(f"    witness {k + 1}:")
            lines += _masses(w, "      ")
    for key in ("rules", "violations"):
        if key in report:
            items = report[key]
            lines.append(f"  {key}: {len(items)}" if items else f"  {key}: none")
            for v in items:
                lines.append(f"    {v}")
    for key in ("entire", "complete", "satisfies_assumptions", "indifference_ok", "full_check",
                "iso_sufficient"):
        if key in report:
            lines.append(f"  {key.replace('_', ' ')}: {_yes_no(report[key])}")
    if "bertrand" in report:
        lines += _bertrand_lines(report["bertrand"])
    for b in report.get("schemes", []):
        lines += _bertrand_lines(b)
    for e in report.get("examples_list", []):
        lines.append(f"  {e['name']:<24} {e['command']:<10} {e['description']}")
    if "examples" in report:
        for e in report["examples"]:
            mark = "ok  " if e["passed"] else "FAIL"
            lines.append(f"  {mark} {e['name']}: {e['summary']}")
    if "verdict" in report:
        lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"


def _yes_no(v) -> str:
    return "unknown" if v is None else "yes" if v else "no"


def _bertrand_lines(b: dict) -> list[str]:
    lines = [f"  scheme: {b['scheme']}"]
    if "exact" in b:
        lines.append(f"  exact: {b['exact']}")
    if "mc" in b:
        m = b["mc"]
        lines.append(f"  monte carlo: {m['hits']}/{m['samples']} = {m['estimate_float']} "
                     f"(seed {m['seed']}, {m['deviation_sigmas']} sigma from exact)")
    if "invariance" in b:
        inv = b["invariance"]
        lines.append(f"  rotation invariance (k={inv['k']}): {'pass' if inv['passed'] else 'FAIL'}; "
                     f"P(midpoint radius < 1/2) = {inv['p']}")
    return lines
