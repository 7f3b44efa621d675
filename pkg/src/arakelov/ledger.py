"""Named constants filling the implicit O(.) slots of the height-bound pipeline.

Only Bruin's three coefficients for the sup of the Arakelov-Green function
are pinned by the literature; every other constant is a configurable
placeholder that defaults to 1.

Ledger file format (one key per line, ``#`` comments otherwise ignored)::

    # provenance: paper-pinned
    bruin_a = 11/125
    c_MU = 3/2   #provenance: placeholder

Every key needs a provenance tag, either on the same line or in a
``#provenance:`` comment immediately above it.  Keys absent from the file
keep their built-in default.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .encoding import frac_str, parse_frac
from .errors import LedgerError

__all__ = ["LedgerEntry", "ConstantLedger", "DEFAULT_LEDGER", "PROVENANCE_TAGS", "ENV_VAR", "resolve_ledger"]

PROVENANCE_TAGS = ("paper-pinned", "placeholder")
ENV_VAR = "ARAKELOV_LEDGER"


@dataclass(frozen=True)
class LedgerEntry:
    name: str
    value: Fraction
    provenance: str
    description: str = ""


_DEFAULTS = (
    LedgerEntry("bruin_a", Fraction(11, 125), "paper-pinned", "p^2 coefficient of sup g_mu (0.088)"),
    LedgerEntry("bruin_b", Fraction(77, 10), "paper-pinned", "p coefficient of sup g_mu (7.7)"),
    LedgerEntry("bruin_c", Fraction(16000), "paper-pinned", "constant term of sup g_mu (1.6e4)"),
    LedgerEntry("c_MU", Fraction(1), "placeholder", "essential minimum: mu_ess(X0(p)) <= c_MU log p"),
    LedgerEntry("a0_integral", Fraction(1), "placeholder", "A_0: int log(|j|^2+1) mu_0 <= (p+1) A_0"),
    LedgerEntry("ae_integral", Fraction(1), "placeholder", "A_e: int log(|j|^2+1) mu_e <= (p+1) A_e"),
    LedgerEntry("c_mumford", Fraction(1), "placeholder", "coefficient of the p^2 error in Mumford repulsion"),
    LedgerEntry("c_bezout_err3", Fraction(1), "placeholder", "coefficient of the O(p^3) Bezout error"),
    LedgerEntry("c_bezout_err1", Fraction(1), "placeholder", "coefficient of the O(p log p) Bezout error (Autissier)"),
    LedgerEntry("gamma", Fraction(1), "placeholder", "p^3 coefficient, j-height vs shifted theta height"),
    LedgerEntry("gamma1", Fraction(1), "placeholder", "p^3 coefficient, j-height vs theta height of P - inf"),
)


class ConstantLedger(Mapping):
    """Immutable mapping name -> Fraction with a provenance tag per entry."""

    def __init__(self, entries):
        table = {}
        for e in entries:
            if e.provenance not in PROVENANCE_TAGS:
                raise LedgerError(f"{e.name}: provenance must be one of {PROVENANCE_TAGS}, got {e.provenance!r}")
            if e.value <= 0:
                raise LedgerError(f"{e.name}: constants must be positive, got {e.value}")
            table[e.name] = e
        self._entries = MappingProxyType(table)

    def __getitem__(self, name: str) -> Fraction:
        return self._entries[name].value

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConstantLedger) and dict(self._entries) == dict(other._entries)

    def __hash__(self):
        return hash(tuple(sorted(self._entries.items())))

    def entry(self, name: str) -> LedgerEntry:
        return self._entries[name]

    def provenance(self, name: str) -> str:
        return self._entries[name].provenance

    def placeholders(self) -> list[str]:
        return [n for n, e in self._entries.items() if e.provenance == "placeholder"]

    def with_values(self, **values) -> "ConstantLedger":
        """Copy with some values replaced (provenance unchanged)."""
        unknown = set(values) - set(self._entries)
        if unknown:
            raise LedgerError(f"unknown ledger keys: {sorted(unknown)}")
        return ConstantLedger(
            replace(e, value=Fraction(values[n])) if n in values else e for n, e in self._entries.items()
        )

    def dominates(self, other: "ConstantLedger", names=None) -> bool:
        names = list(self) if names is None else names
        return all(self[n] >= other[n] for n in names)

    def to_json(self) -> dict:
        return {n: {"value": frac_str(e.value), "provenance": e.provenance} for n, e in sorted(self._entries.items())}

    def dumps(self) -> str:
        lines = []
        for n, e in self._entries.items():
            if e.description:
                lines.append(f"# {e.description}")
            lines.append(f"# provenance: {e.provenance}")
            lines.append(f"{n} = {frac_str(e.value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, base: "ConstantLedger | None" = None) -> "ConstantLedger":
        base = DEFAULT_LEDGER if base is None else base
        prov_re = re.compile(r"#\s*provenance\s*:\s*([\w-]+)")
        pending = None
        updates = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                pending = None
                continue
            if line.startswith("#"):
                m = prov_re.match(line)
                if m:
                    pending = m.group(1)
                continue
            body, _, comment = line.partition("#")
            if "=" not in body:
                raise LedgerError(f"line {lineno}: expected 'key = num/den'")
            key, _, val = body.partition("=")
            key = key.strip()
            if key not in base:
                raise LedgerError(f"line {lineno}: unknown ledger key {key!r}")
            m = prov_re.search("#" + comment) if comment else None
            tag = m.group(1) if m else pending
            if tag is None:
                raise LedgerError(f"line {lineno}: {key} has no '#provenance:' tag")
            try:
                value = parse_frac(val.strip().strip('"'))
            except ValueError as exc:
                raise LedgerError(f"line {lineno}: {exc}") from None
            if key in updates:
                raise LedgerError(f"line {lineno}: duplicate key {key}")
            updates[key] = (value, tag)
            pending = None
        return cls(
            replace(e, value=updates[n][0], provenance=updates[n][1]) if n in updates else e
            for n, e in base._entries.items()
        )

    @classmethod
    def load(cls, path) -> "ConstantLedger":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise LedgerError(f"cannot read ledger {path}: {exc}") from None
        return cls.parse(text)


DEFAULT_LEDGER = ConstantLedger(_DEFAULTS)


def resolve_ledger(path=None) -> tuple[ConstantLedger, str | None]:
    """Ledger from ``path``, else from $ARAKELOV_LEDGER, else the defaults.

    Returns the ledger and the path actually used (None for defaults).
    """
    path = path or os.environ.get(ENV_VAR) or None
    if path is None:
        return DEFAULT_LEDGER, None
    return ConstantLedger.load(path), str(path)
