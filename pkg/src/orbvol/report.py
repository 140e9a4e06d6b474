"""Report container and its JSON / text renderings."""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from typing import Any

from . import constants as C
from .bounds import BoundChain


@dataclass
class Verdict:
    claim: str
    passed: bool
    citation: str = ""


@dataclass
class Report:
    command: str
    constants: list[str] = field(default_factory=list)
    chains: list[BoundChain] = field(default_factory=list)
    searches: list[Any] = field(default_factory=list)  # SlopeSearchResult
    verdicts: list[Verdict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    tables: dict[str, list[dict]] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc)
                           .replace(microsecond=0).isoformat())

    def use(self, *names: str) -> None:
        for n in names:
            if n not in self.constants:
                self.constants.append(n)

    def verdict(self, claim: str, ok: bool, citation: str = "") -> bool:
        self.verdicts.append(Verdict(claim, bool(ok), citation))
        return bool(ok)

    def add_chain(self, chain: BoundChain) -> BoundChain:
        self.chains.append(chain)
        for claim, ok in chain.checks:
            self.verdict(f"{chain.title}: {claim}", ok, chain.steps[-1].citation if chain.steps else "")
        self.verdict(f"{chain.title}: chain replays from recorded inputs", chain.replay())
        return chain

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self, timestamp: bool = True) -> dict:
        out = {
            "command": self.command,
            "constants": [{"name": n, "value": C.value(n), "citation": C.citation(n)}
                          for n in self.constants],
            "chains": [
                {
                    "title": ch.title,
                    "steps": [{"name": s.name, "operation": s.operation, "inputs": s.inputs,
                               "output": s.output, "citation": s.citation} for s in ch.steps],
                    "final": ch.final,
                }
                for ch in self.chains
            ],
            "searches": [s.to_dict() for s in self.searches],
            "tables": self.tables,
            "verdicts": [{"claim": v.claim, "pass": v.passed, "citation": v.citation}
                         for v in self.verdicts],
            "notes": list(self.notes),
            "pass": self.passed,
        }
        if timestamp:
            out["timestamp"] = self.timestamp
        return out

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2, sort_keys=False)

    def to_text(self, timestamp: bool = True) -> str:
        lines = [f"# {self.command}"]
        if timestamp:
            lines.append(f"# generated {self.timestamp}")
        if self.constants:
            lines.append("")
            lines.append("constants")
            for n in self.constants:
                lines.append(f"  {n:24s} {C.value(n):<10g} [{C.citation(n)}]")
        for ch in self.chains:
            lines.append("")
            lines.append(f"chain: {ch.title}")
            for s in ch.steps:
                args = ", ".join(f"{k}={v:.6g}" for k, v in s.inputs.items())
                cite = f"  [{s.citation}]" if s.citation else ""
                lines.append(f"  {s.name:18s} {s.operation}({args}) = {s.output:.10g}{cite}")
            lines.append(f"  final = {ch.final:.10g}")
        for name, rows in self.tables.items():
            lines.append("")
            lines.append(f"table: {name}")
            for row in rows:
                lines.append("  " + "  ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
        for s in self.searches:
            lines.append("")
            lines.extend(s.to_text_lines())
        if self.notes:
            lines.append("")
            lines.extend(f"note: {n}" for n in self.notes)
        lines.append("")
        lines.append("verdicts")
        for v in self.verdicts:
            cite = f"  [{v.citation}]" if v.citation else ""
            lines.append(f"  {'PASS' if v.passed else 'FAIL'}  {v.claim}{cite}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str = "text", timestamp: bool = True) -> str:
        return self.to_json(timestamp) if fmt == "json" else self.to_text(timestamp)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)
