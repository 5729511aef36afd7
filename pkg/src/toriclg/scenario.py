"""Scenario files: one JSON document per run, with a tiny expression grammar
for path reparametrizations like t(lam) = lam^(2/3) + lam^(2/5)."""
from __future__ import annotations

import json

from . import errors
from .lattice import AbelianLattice, VectorSet


class ExprParser:
    """Recursive descent for {+, -, *, /, ^ with rational exponents} over a
    single variable; ^ binds tightest, unary minus allowed."""

    def __init__(self, text, varname):
        self.text = text.replace(" ", "")
        self.pos = 0
        self.varname = varname

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def eat(self, ch):
        if self.peek() != ch:
            raise errors.ScenarioError(
                f"expected '{ch}' at {self.pos} in {self.text!r}")
        self.pos += 1

    def parse(self):
        node = self.expr()
        if self.pos != len(self.text):
            raise errors.ScenarioError(
                f"trailing input at {self.pos} in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.peek()
            self.pos += 1
            rhs = self.term()
            node = ("+" if op == "+" else "-", node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.peek()
            self.pos += 1
            rhs = self.factor()
            node = ("*" if op == "*" else "/", node, rhs)
        return node

    def factor(self):
        if self.peek() == "-":
            self.pos += 1
            return ("neg", self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            expo = self.factor()
            return ("^", base, expo)
        return base

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.eat("(")
            node = self.expr()
            self.eat(")")
            return node
        if ch is not None and (ch.isdigit() or ch == "."):
            start = self.pos
            while self.peek() is not None and (self.peek().isdigit()
                                               or self.peek() == "."):
                self.pos += 1
            return ("num", float(self.text[start:self.pos]))
        if ch is not None and ch.isalpha():
            start = self.pos
            while self.peek() is not None and (self.peek().isalnum()
                                               or self.peek() == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name == self.varname:
                return ("var",)
            if name == "i":
                return ("num", 1j)
            raise errors.ScenarioError(f"unknown name {name!r}")
        raise errors.ScenarioError(f"parse error at {self.pos} in {self.text!r}")


def eval_expr(node, value):
    op = node[0]
    if op == "num":
        return complex(node[1])
    if op == "var":
        return complex(value)
    if op == "neg":
        return -eval_expr(node[1], value)
    a = eval_expr(node[1], value)
    if op == "^":
        return a ** eval_expr(node[2], value)
    b = eval_expr(node[2], value)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise errors.ScenarioError(f"bad node {node!r}")


def compile_expr(text, varname):
    node = ExprParser(str(text), varname).parse()

    def fn(value):
        return eval_expr(node, value)
    return fn


class Scenario:
    """Validated scenario document."""

    REQUIRED = ("name",)

    def __init__(self, doc: dict):
        for key in self.REQUIRED:
            if key not in doc:
                raise errors.ScenarioError(f"scenario missing '{key}'")
        self.doc = doc
        self.name = doc["name"]
        self.vector_set = None
        if "lattice" in doc and "S" in doc:
            lat = AbelianLattice(doc["lattice"].get("rank"),
                                 doc["lattice"].get("torsion", ()))
            if not doc["S"]:
                raise errors.ScenarioError("S must be nonempty")
            self.vector_set = VectorSet(lat, [self._elt(lat, b)
                                              for b in doc["S"]])
        self.fans = doc.get("fans", {})
        for fname, cones in self.fans.items():
            if not isinstance(cones, list):
                raise errors.ScenarioError(f"fan {fname}: cones must be a list")
        wall = doc.get("wall")
        if wall is not None:
            for side in ("plus", "minus"):
                if side in wall and wall[side] not in self.fans:
                    raise errors.ScenarioError(
                        f"wall references unknown fan {wall[side]!r}")
        self.tolerances = doc.get("tolerances", {})

    @staticmethod
    def _elt(lat, b):
        if lat.torsion and len(b) == 2 and isinstance(b[0], list):
            return lat.element(b[0], b[1])
        return lat.element(b)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls(json.load(fh))

    def named_fan(self, name):
        from .fans import StackyFan
        if name not in self.fans:
            raise errors.ScenarioError(f"unknown fan {name!r}")
        return StackyFan(self.vector_set, [set(c) for c in self.fans[name]])

    def path_values(self):
        p = self.doc.get("path")
        if p is None:
            raise errors.ScenarioError("scenario has no path")
        if "values" in p:
            return [complex(v) if not isinstance(v, list)
                    else complex(v[0], v[1]) for v in p["values"]]
        import numpy as np
        a, b, steps = p["from"], p["to"], int(p["steps"])
        kind = p.get("grid", "geometric")
        if kind == "geometric":
            import math
            vals = np.exp(np.linspace(math.log(a), math.log(b), steps))
        else:
            vals = np.linspace(a, b, steps)
        pref = p.get("prefactor")
        prefc = complex(pref[0], pref[1]) if pref else 1.0
        return [prefc * complex(v) for v in vals]

    def path_variable(self):
        return self.doc.get("path", {}).get("variable", "lam")
