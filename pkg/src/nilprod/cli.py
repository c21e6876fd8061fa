"""Expression-language front end.

Grammar (whitespace-insensitive)::

    expr := atom | "nil2(" expr "," expr ")" | "nil(" expr {"," expr}+ ")"
          | "dsum(" expr {"," expr}+ ")" | "wreath(" expr "," expr ")"
    atom := "Z" | "Z/" nat | "D" nat | "S" nat | "A" nat | "Heis(" atom ")"

Every diagnostic carries the byte offset where parsing gave up.  Element
literals appearing as command arguments are parsed by the group they
belong to.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .groups import (
    CyclicGroup,
    DihedralGroup,
    DirectSumGroup,
    Group,
    HeisenbergGroup,
    InfiniteGroupError,
    IntegerGroup,
    alternating,
    derived_subgroup,
    lower_central_series,
    nilpotency_class,
    symmetric,
)
from .abelian import tensor
from .nilfam import FamilyGroup, FiniteIndexSet
from .nilprod2 import Nil2Group, nil2
from .wreath import WreathGroup


# -- AST -----------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    kind: str  # "Z", "Zn", "D", "S", "A"
    n: int | None = None


@dataclass(frozen=True)
class HeisNode:
    inner: "Expr"


@dataclass(frozen=True)
class Nil2Node:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class NilNode:
    parts: tuple


@dataclass(frozen=True)
class DSumNode:
    parts: tuple


@dataclass(frozen=True)
class WreathNode:
    fiber: "Expr"
    actor: "Expr"


Expr = object


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"parse error at offset {offset}: {message}")


class EvalError(ValueError):
    pass


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def nat(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected a number", self.pos)
        value = int(self.text[start:self.pos])
        if value == 0:
            raise ParseError("n must be >= 1", start)
        return value

    def ident(self) -> tuple[str, int]:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos], start

    def args(self, minimum: int) -> list:
        self.expect("(")
        parts = [self.expr()]
        while self.peek() == ",":
            self.expect(",")
            parts.append(self.expr())
        self.skip_ws()
        if self.peek() != ")":
            raise ParseError("expected ',' or ')'", self.pos)
        if len(parts) < minimum:
            raise ParseError(f"needs at least {minimum} arguments", self.pos)
        self.expect(")")
        return parts

    def expr(self) -> Expr:
        self.skip_ws()
        start = self.pos
        word, word_start = self.ident()
        if not word:
            raise ParseError("expected an expression", self.pos)
        if word == "nil2":
            parts = self.args(2)
            if len(parts) != 2:
                raise ParseError("nil2 takes exactly 2 arguments", self.pos)
            return Nil2Node(parts[0], parts[1])
        if word == "nil":
            return NilNode(tuple(self.args(2)))
        if word == "dsum":
            return DSumNode(tuple(self.args(2)))
        if word == "wreath":
            parts = self.args(2)
            if len(parts) != 2:
                raise ParseError("wreath takes exactly 2 arguments", self.pos)
            return WreathNode(parts[0], parts[1])
        if word == "Heis":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return HeisNode(inner)
        if word == "Z":
            if self.peek() == "/":
                self.expect("/")
                return Atom("Zn", self.nat())
            return Atom("Z")
        # single letter possibly glued to a number, as in D3 / S4 / A5
        if word and word[0] in ("D", "S", "A"):
            rest = word[1:]
            if rest.isdigit():
                if int(rest) == 0:
                    raise ParseError("n must be >= 1", word_start + 1)
                return Atom(word[0], int(rest))
            if not rest:
                return Atom(word[0], self.nat())
        raise ParseError(f"unknown name {word!r}", start)


def parse(text: str) -> Expr:
    p = _Parser(text)
    ast = p.expr()
    p.skip_ws()
    if p.pos != len(text):
        raise ParseError("trailing input", p.pos)
    return ast


def pretty(ast: Expr) -> str:
    if isinstance(ast, Atom):
        if ast.kind == "Z":
            return "Z"
        if ast.kind == "Zn":
            return f"Z/{ast.n}"
        return f"{ast.kind}{ast.n}"
    if isinstance(ast, HeisNode):
        return f"Heis({pretty(ast.inner)})"
    if isinstance(ast, Nil2Node):
        return f"nil2({pretty(ast.left)}, {pretty(ast.right)})"
    if isinstance(ast, NilNode):
        return "nil(" + ", ".join(pretty(p) for p in ast.parts) + ")"
    if isinstance(ast, DSumNode):
        return "dsum(" + ", ".join(pretty(p) for p in ast.parts) + ")"
    if isinstance(ast, WreathNode):
        return f"wreath({pretty(ast.fiber)}, {pretty(ast.actor)})"
    raise TypeError(f"not an expression node: {ast!r}")


def evaluate(ast: Expr) -> Group:
    if isinstance(ast, Atom):
        if ast.kind == "Z":
            return IntegerGroup()
        if ast.kind == "Zn":
            return CyclicGroup(ast.n)
        if ast.kind == "D":
            return DihedralGroup(ast.n)
        if ast.kind == "S":
            return symmetric(ast.n)
        if ast.kind == "A":
            return alternating(ast.n)
    if isinstance(ast, HeisNode):
        inner = ast.inner
        if isinstance(inner, Atom) and inner.kind == "Z":
            return HeisenbergGroup(None)
        if isinstance(inner, Atom) and inner.kind == "Zn":
            return HeisenbergGroup(inner.n)
        raise EvalError("Heis expects Z or Z/n")
    if isinstance(ast, Nil2Node):
        return nil2(evaluate(ast.left), evaluate(ast.right))
    if isinstance(ast, NilNode):
        return FamilyGroup(FiniteIndexSet(tuple(evaluate(p) for p in ast.parts)))
    if isinstance(ast, DSumNode):
        return DirectSumGroup(tuple(evaluate(p) for p in ast.parts))
    if isinstance(ast, WreathNode):
        return WreathGroup(evaluate(ast.fiber), evaluate(ast.actor))
    raise TypeError(f"not an expression node: {ast!r}")


def eval_text(text: str) -> Group:
    return evaluate(parse(text))


# -- command implementations -------------------------------------------------------


def _order_str(g: Group) -> str:
    return "infinite" if g.order is None else str(g.order)


def cmd_order(args) -> dict:
    g = eval_text(args.expr)
    return {"expr": args.expr.strip(), "order": _order_str(g)}


def cmd_tensor(args) -> dict:
    a = eval_text(args.left)
    b = eval_text(args.right)
    return {"tensor": str(tensor(a.abelian, b.abelian))}


def cmd_abelianization(args) -> dict:
    g = eval_text(args.expr)
    return {"abelianization": str(g.abelian.canonicalized())}


def cmd_derived(args) -> dict:
    g = eval_text(args.expr)
    if isinstance(g, HeisenbergGroup) and g.n is None:
        return {"derived_order": "infinite", "abelian_form": "Z"}
    if isinstance(g, IntegerGroup):
        return {"derived_order": "1", "abelian_form": "0"}
    if g.order is None:
        raise EvalError("derived subgroup enumeration needs a finite group")
    der = derived_subgroup(g)
    out = {"derived_order": str(der.order)}
    if der.is_abelian():
        from .groups import abelian_decomposition

        grp, _ = abelian_decomposition(der.elements(), g.mul, g.identity)
        out["abelian_form"] = str(grp)
    return out


def cmd_lcs(args) -> dict:
    g = eval_text(args.expr)
    series = lower_central_series(g)
    cls = nilpotency_class(g)
    return {
        "series_orders": [s.order for s in series],
        "class": cls if cls is not None else "not nilpotent",
    }


def cmd_mult(args) -> dict:
    g = eval_text(args.expr)
    x = g.parse_element(args.x)
    y = g.parse_element(args.y)
    return {"product": g.format_element(g.mul(x, y))}


def cmd_inv(args) -> dict:
    g = eval_text(args.expr)
    x = g.parse_element(args.x)
    return {"inverse": g.format_element(g.inv(x))}


def cmd_support(args) -> dict:
    g = eval_text(args.expr)
    if isinstance(g, WreathGroup):
        w = g.parse_element(args.x)
        fam, x = g.base, w.base
    elif isinstance(g, FamilyGroup):
        fam, x = g, g.parse_element(args.x)
    else:
        raise EvalError("support applies to nil(...) or wreath(...) elements")
    supp = sorted(fam.support(x), key=fam.index_set.key)
    return {"support": [fam.index_set.format_index(i) for i in supp]}


def cmd_iso_check(args) -> dict:
    from .oracle import enumerate_group, find_isomorphism

    a = eval_text(args.left)
    b = eval_text(args.right)
    if a.order is None or b.order is None:
        raise EvalError("isomorphism search needs finite groups")
    if a.order != b.order:
        return {"isomorphic": False, "reason": "orders differ"}
    check = find_isomorphism(
        enumerate_group(a), enumerate_group(b), max_order=args.max_order
    )
    out = {"isomorphic": check.ok}
    if not check.ok:
        out["reason"] = check.reason
    return out


def cmd_verify(args) -> dict:
    from .oracle import claims_suite

    results = claims_suite(seed=args.seed, samples=args.samples)
    return {
        "claims": [r.as_dict() for r in results],
        "failures": sum(1 for r in results if r.status != "pass"),
    }


def cmd_cnd_report(args) -> dict:
    from .haagerup import (
        default_psi,
        delta_kernel,
        gram_value,
        properness_box_check,
        u_value,
        u_value_direct,
    )
    import random

    g = eval_text(args.expr)
    if not isinstance(g, WreathGroup):
        raise EvalError("cnd-report expects a wreath(H, G) expression")
    if g.H.order is None:
        raise EvalError("cnd-report needs a finite fiber")
    rng = random.Random(args.seed)
    kernel = delta_kernel(g.H)
    base = g.base
    actor = g.G

    invariance = 0
    for _ in range(args.samples):
        x = base.sample(rng)
        gg = actor.sample(rng)
        if u_value(base, kernel, g.shift(gg, x)) != u_value(base, kernel, x):
            raise RuntimeError("shift invariance failed")
        invariance += 1
    split_checks = 0
    if actor.order is not None:
        for _ in range(min(args.samples, 200)):
            x = base.sample(rng)
            if u_value(base, kernel, x) != u_value_direct(base, kernel, x):
                raise RuntimeError("split disagrees with the direct sum")
            split_checks += 1
    max_q = Fraction(0)
    for _ in range(args.samples):
        points = [base.sample(rng) for _ in range(4)]
        coeffs = [Fraction(rng.randrange(-3, 4)) for _ in range(3)]
        coeffs.append(-sum(coeffs))
        max_q = max(max_q, gram_value(base, kernel, points, coeffs))
    if actor.order is not None:
        window = actor.elements()[: min(3, actor.order)]
    else:
        window = [actor.element_at(k) for k in range(3)]
    tables = {}
    for m in (Fraction(1, 2), Fraction(1), Fraction(2)):
        level, contained = properness_box_check(base, kernel, window, m)
        tables[str(m)] = {"sublevel_size": len(level), "box_containment": contained}
    psi = default_psi(actor)
    return {
        "phi": kernel.label,
        "psi": f"canonical enumeration of {actor.name}, psi(e) = 0",
        "samples": args.samples,
        "max_Q": str(max_q),
        "invariance_checks": invariance,
        "split_checks": split_checks,
        "properness_tables": tables,
        "psi_spot_check": psi(actor.identity),
    }


# -- entry point --------------------------------------------------------------------


def _render(payload: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(payload, indent=2, sort_keys=True)
    lines = []
    for key, value in payload.items():
        if key == "claims":
            for claim in value:
                lines.append(
                    f"[{claim['status']}] {claim['claim_id']}: "
                    f"computed {claim['computed']} expected {claim['expected']}"
                )
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="nilprod",
        description="second nilpotent products of groups: orders, structure, certificates",
    )
    top.add_argument("--json", action="store_true", help="emit a JSON report")
    top.add_argument("--seed", type=int, default=0)
    top.add_argument("--samples", type=int, default=1000)
    top.add_argument("--max-order", type=int, default=64)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("order", help="order of a group expression")
    p.add_argument("expr")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("tensor", help="tensor product of two abelianizations")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("abelianization", help="abelianization in canonical form")
    p.add_argument("expr")
    p.set_defaults(func=cmd_abelianization)

    p = sub.add_parser("derived", help="derived subgroup order (and form when abelian)")
    p.add_argument("expr")
    p.set_defaults(func=cmd_derived)

    p = sub.add_parser("lcs", help="lower central series and nilpotency class")
    p.add_argument("expr")
    p.set_defaults(func=cmd_lcs)

    p = sub.add_parser("mult", help="multiply two element literals")
    p.add_argument("expr")
    p.add_argument("x")
    p.add_argument("y")
    p.set_defaults(func=cmd_mult)

    p = sub.add_parser("inv", help="invert an element literal")
    p.add_argument("expr")
    p.add_argument("x")
    p.set_defaults(func=cmd_inv)

    p = sub.add_parser("support", help="support of a family or wreath element")
    p.add_argument("expr")
    p.add_argument("x")
    p.set_defaults(func=cmd_support)

    p = sub.add_parser("iso-check", help="search for an isomorphism (orders <= bound)")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_iso_check)

    p = sub.add_parser("verify", help="run the full battery of example claims")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cnd-report", help="exact kernel certificate report for wreath(H, G)")
    p.add_argument("expr")
    p.set_defaults(func=cmd_cnd_report)

    return top


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.samples == 1000:
        args.samples = 10_000
    try:
        payload = args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (EvalError, InfiniteGroupError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(_render(payload, args.json))
    if args.command == "verify" and payload.get("failures"):
        return 1
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
