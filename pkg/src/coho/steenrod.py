"""Steenrod squares on the detecting rings and the published identities.

The nine detecting rings carry the standard Steenrod action determined
on generators by instability: Sq0 is the identity, the top square is the
cup square, and squares above the degree vanish.  For a degree-1
polynomial class l that reads Sq1(l) = l^2; a degree-1 exterior class e
has Sq1(e) = e^2 = 0.  The degree-2 polynomial generator b of the 4x2x2
rings and the b_i of the 4^3 ring restrict from order-4 subgroups, so
their first Bockstein vanishes and the action is Sq1(b) = 0 and
Sq2(b) = b^2 (the integral lift sits behind a higher Bockstein).
Everything else follows from the Cartan formula; Adem relations are
never needed because the action is evaluated, not presented.

Squares of the seventeen ring generators themselves are recorded as
published identities in a data file.  Each identity is checked by
restricting both sides to all nine detecting rings, which requires a
resolved generator dictionary; identities whose terms only involve
generators with fixed published images are checked unconditionally.
The identities for Sq2 of the n and p rows also pin down the images of
the degree-6 and degree-5 generators j and k, which the published
tables leave out.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict

from . import datafiles
from .detection import (RingElement, Row, restrict_with, row_add,
                        row_is_zero, row_text)
from .ringcalc import VARIABLES, WEIGHTS, GradedPolynomial

IDENTITIES_FILE = "steenrod_identities.txt"


def _binomial_odd(a: int, k: int) -> bool:
    # Lucas: C(a, k) is odd exactly when k's bits sit inside a's.
    return a & k == k


def _factor_components(ring, var_index: int, exponent: int) -> list:
    """Steenrod components of one generator power, as (extra, new_exp).

    The total square of an exterior degree-1 class is the class itself;
    a polynomial generator g of degree w has total square g + g^2, so
    g^a picks up binomial terms g^(a+k) in degrees shifted by k*w.
    """
    if ring.exterior[var_index]:
        return [(0, exponent)]
    w = ring.degrees[var_index]
    return [(k * w, exponent + k) for k in range(exponent + 1)
            if _binomial_odd(exponent, k)]


def sq(k: int, elem: RingElement) -> RingElement:
    """The k-th Steenrod square of a homogeneous element."""
    if k < 0:
        raise ValueError("negative Steenrod square")
    ring = elem.ring
    if elem.is_zero():
        return elem
    if k == 0:
        return elem
    acc: set = set()
    for term in elem.terms:
        # states: extra degree so far -> set of partial exponent tuples
        states = {0: {()}}
        for var_index, exponent in enumerate(term):
            options = ([(0, 0)] if exponent == 0 else
                       _factor_components(ring, var_index, exponent))
            nxt: dict = {}
            for extra, prefixes in states.items():
                for shift, new_exp in options:
                    if extra + shift > k:
                        continue
                    bucket = nxt.setdefault(extra + shift, set())
                    for p in prefixes:
                        grown = p + (new_exp,)
                        if grown in bucket:
                            bucket.discard(grown)
                        else:
                            bucket.add(grown)
            states = nxt
        for full in states.get(k, ()):
            if any(e > 1 for e, ext in zip(full, ring.exterior) if ext):
                continue
            if full in acc:
                acc.discard(full)
            else:
                acc.add(full)
    return RingElement(ring, tuple(acc))


def sq_row(k: int, row: Row) -> Row:
    """Apply the k-th square in every detecting ring at once."""
    return tuple(sq(k, elem) for elem in row)


def total_degrees(elem: RingElement) -> dict:
    """All nonzero squares of an element, keyed by k."""
    if elem.is_zero():
        return {}
    out = {}
    for k in range(elem.degree + 1):
        val = sq(k, elem)
        if not val.is_zero():
            out[k] = val
    return out


@dataclass(frozen=True)
class SteenrodIdentity:
    """One published square of a ring generator, Sq^op(generator) = value."""

    operation: int
    generator: str
    value: GradedPolynomial

    def __str__(self) -> str:
        return f"Sq{self.operation}({self.generator}) = {self.value}"


_IDENTITY_RE = re.compile(r"^Sq(\d+)\((\w+)\)\s*=\s*(.+)$")


@lru_cache(maxsize=1)
def load_identities() -> tuple:
    """Parse the identity file; absent squares are simply not checked."""
    text = datafiles.load_text(IDENTITIES_FILE)
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        m = _IDENTITY_RE.match(line)
        if m is None:
            raise ValueError(f"unreadable identity line {line!r}")
        op, gen, rhs = int(m.group(1)), m.group(2), m.group(3)
        if gen not in VARIABLES:
            raise ValueError(f"unknown generator {gen!r} in identity")
        value = GradedPolynomial.parse(rhs)
        expected = WEIGHTS[VARIABLES.index(gen)] + op
        if not value.is_zero() and value.degree != expected:
            raise ValueError(
                f"identity Sq{op}({gen}) has degree {value.degree}, "
                f"expected {expected}")
        out.append(SteenrodIdentity(op, gen, value))
    return tuple(out)


def identity_for(operation: int, generator: str) -> SteenrodIdentity:
    for ident in load_identities():
        if ident.operation == operation and ident.generator == generator:
            return ident
    raise KeyError(f"no identity for Sq{operation}({generator})")


def _poly_support(poly: GradedPolynomial) -> set:
    used = set()
    for term in poly.terms:
        for var, exp in zip(VARIABLES, term):
            if exp:
                used.add(var)
    return used


def _bare_generator_term(poly: GradedPolynomial, generator: str):
    target = tuple(1 if v == generator else 0 for v in VARIABLES)
    return target if target in poly.terms else None


def derive_k_row(rows: Dict[str, Row]) -> Row:
    """Image of the degree-5 generator k forced by the Sq2(p) identity.

    The identity writes Sq2(p) as decomposables plus k, so k restricts
    to Sq2 of the p row minus the restricted decomposable part.  rows
    must cover p and the decomposable support (z, y, t, w, u, v, m, q,
    p, r).
    """
    ident = identity_for(2, "p")
    bare = _bare_generator_term(ident.value, "k")
    if bare is None:
        raise ValueError("Sq2(p) identity lost its k term")
    decomposable = ident.value + GradedPolynomial((bare,))
    return row_add(sq_row(2, rows["p"]),
                   restrict_with(rows, decomposable))


def derive_j_row(rows: Dict[str, Row]) -> Row:
    """Image of the degree-6 generator j as Sq2 of the n row."""
    return sq_row(2, rows["n"])


def derive_secondary_rows(rows: Dict[str, Row]) -> Dict[str, Row]:
    """The j and k images the published tables leave implicit."""
    return {"j": derive_j_row(rows), "k": derive_k_row(rows)}


def verify_identities(rows: Dict[str, Row]) -> dict:
    """Check each published identity by restriction to all nine rings.

    An identity is verified when Sq^op of the generator's row equals the
    restricted right-hand side everywhere, failed when a residue
    survives, and blocked when rows is missing a generator it needs.
    """
    verified, failed, blocked = [], [], []
    for ident in load_identities():
        needed = {ident.generator} | _poly_support(ident.value)
        missing = sorted(needed - set(rows))
        label = f"Sq{ident.operation}({ident.generator})"
        if missing:
            blocked.append({"identity": label, "missing": missing})
            continue
        lhs = sq_row(ident.operation, rows[ident.generator])
        rhs = restrict_with(rows, ident.value)
        residue = row_add(lhs, rhs)
        if row_is_zero(residue):
            verified.append({"identity": label})
        else:
            failed.append({"identity": label,
                           "residue": row_text(residue)})
    return {
        "total": len(load_identities()),
        "verified": verified,
        "failed": failed,
        "blocked": blocked,
        "all_verified": len(verified) == len(load_identities()),
    }


def verification_report() -> dict:
    """Identity check against the resolved dictionary when one exists.

    Falls back to the dictionary-independent rows when the generator
    dictionary is unsolved, so the report still states exactly which
    identities could be checked and which are blocked.
    """
    from .detection import (DictionaryUnsolvedError, fixed_generator_rows,
                            resolved_table)
    try:
        rows = dict(resolved_table().rows)
        resolved = True
    except DictionaryUnsolvedError:
        rows = fixed_generator_rows()
        resolved = False
    report = verify_identities(rows)
    report["dictionary_resolved"] = resolved
    return report
