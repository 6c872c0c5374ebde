"""Construction parameters {n_k}, target complexity {p_n} and growth conditions.

Every condition is evaluated with :class:`fractions.Fraction`.  Infinite sums and
products are split into an exact partial part over ``k <= horizon`` and a tail.
The tail is bounded rigorously only when ``n`` is given by a recognised geometric
rule ``n_k = c * r**k``; otherwise the result is flagged ``finite-horizon``.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

__all__ = [
    "ParamError",
    "ParamSeq",
    "Condition",
    "ConditionReport",
    "GammaSeq",
    "validate",
    "gamma",
    "gamma_by_recurrence",
    "PRule",
]

# Exact factors n**e with more bits than this are replaced by a conservative bound.
EXACT_BITS = 1 << 14


class ParamError(ValueError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Pow: operator.pow,
    ast.FloorDiv: operator.floordiv,
}


def _eval_rule(expr: ast.AST, k: int) -> int:
    if isinstance(expr, ast.Expression):
        return _eval_rule(expr.body, k)
    if isinstance(expr, ast.Constant) and isinstance(expr.value, int):
        return expr.value
    if isinstance(expr, ast.Name) and expr.id == "k":
        return k
    if isinstance(expr, ast.BinOp) and type(expr.op) in _BINOPS:
        return _BINOPS[type(expr.op)](_eval_rule(expr.left, k), _eval_rule(expr.right, k))
    if isinstance(expr, ast.UnaryOp) and isinstance(expr.op, ast.USub):
        return -_eval_rule(expr.operand, k)
    raise ParamError(f"unsupported token in rule: {ast.dump(expr)}")


_GEOMETRIC = [
    # (pattern, (coef, ratio) builder)
    (re.compile(r"^(\d+)$"), lambda g: (Fraction(int(g[0])), 1)),
    (re.compile(r"^(\d+)\^k$"), lambda g: (Fraction(1), int(g[0]))),
    (re.compile(r"^(\d+)\^\(k([+-]\d+)\)$"),
     lambda g: (Fraction(int(g[0])) ** int(g[1]), int(g[0]))),
    (re.compile(r"^(\d+)\*(\d+)\^k$"), lambda g: (Fraction(int(g[0])), int(g[1]))),
    (re.compile(r"^(\d+)\*(\d+)\^\(k([+-]\d+)\)$"),
     lambda g: (int(g[0]) * Fraction(int(g[1])) ** int(g[2]), int(g[1]))),
]


def _geometric_form(rule: str) -> Optional[tuple[Fraction, int]]:
    s = rule.replace(" ", "").replace("**", "^")
    for pat, build in _GEOMETRIC:
        m = pat.match(s)
        if m:
            return build(m.groups())
    return None


@dataclass(frozen=True)
class PRule:
    """Closed-form target complexity p_n.

    kinds: ``nlog`` (p_n = n * bit_length(n)), ``power`` (p_n = floor(n**exponent)
    for a rational exponent), ``table`` (explicit values, p_n = last value beyond).
    """

    kind: str
    exponent: Fraction = Fraction(3, 2)
    values: tuple[int, ...] = ()

    def __call__(self, n: int) -> int:
        if self.kind == "nlog":
            return n * max(1, n.bit_length())
        if self.kind == "power":
            a, b = self.exponent.numerator, self.exponent.denominator
            return _iroot(n**a, b)
        if self.kind == "table":
            return self.values[min(n, len(self.values) - 1)]
        raise ParamError(f"unknown p rule {self.kind!r}")

    @classmethod
    def from_config(cls, cfg: dict) -> "PRule":
        kind = cfg.get("rule")
        if kind == "power":
            return cls("power", exponent=Fraction(str(cfg.get("exponent", "3/2"))))
        if kind == "table":
            return cls("table", values=tuple(int(v) for v in cfg["values"]))
        if kind == "nlog":
            return cls("nlog")
        raise ParamError(f"unknown p rule {kind!r}")

    def to_config(self) -> dict:
        if self.kind == "power":
            return {"rule": "power", "exponent": str(self.exponent)}
        if self.kind == "table":
            return {"rule": "table", "values": list(self.values)}
        return {"rule": self.kind}


def _iroot(x: int, b: int) -> int:
    """floor(x ** (1/b)) for non-negative integers."""
    if b == 1 or x < 2:
        return x
    r = int(round(math.exp(math.log(x) / b))) if x.bit_length() < 1000 else 1 << (x.bit_length() // b)
    # Newton refinement from above
    r = max(r, 1)
    while r**b > x:
        r = ((b - 1) * r + x // r ** (b - 1)) // b
    while (r + 1) ** b <= x:
        r += 1
    return r


@dataclass(frozen=True)
class ParamSeq:
    """The sequence n_0, n_1, ... plus an optional target complexity rule.

    ``n`` holds explicitly known terms.  Beyond ``len(n)`` the sequence continues
    with ``rule`` when one is given and with the last listed value otherwise.
    """

    n: tuple[int, ...]
    rule: Optional[str] = None
    p: Optional[PRule] = None
    strict: bool = False
    _tree: Optional[ast.Expression] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.n:
            raise ParamError("empty parameter sequence")
        if any(not isinstance(v, int) or v <= 0 for v in self.n):
            raise ParamError("all n_k must be positive integers")
        if self.n[0] < 2:
            raise ParamError(f"n_0 must be >= 2, got {self.n[0]}")
        for a, b in zip(self.n, self.n[1:]):
            if b < a or (self.strict and b == a):
                kind = "increasing" if self.strict else "non-decreasing"
                raise ParamError(f"sequence must be {kind}: {a} then {b}")

    @classmethod
    def from_list(cls, values: Sequence[int], p: Optional[PRule] = None, strict: bool = False):
        return cls(tuple(int(v) for v in values), p=p, strict=strict)

    @classmethod
    def from_rule(cls, rule: str, K: int, p: Optional[PRule] = None, strict: bool = False):
        tree = ast.parse(rule.replace("^", "**"), mode="eval")
        values = tuple(_eval_rule(tree, k) for k in range(K + 1))
        return cls(values, rule=rule, p=p, strict=strict, _tree=tree)

    @classmethod
    def from_config(cls, cfg: dict) -> "ParamSeq":
        p = PRule.from_config(cfg["p"]) if cfg.get("p") else None
        strict = bool(cfg.get("strict", False))
        n = cfg.get("n")
        if n is None:
            raise ParamError("config has no 'n'")
        if isinstance(n, dict):
            return cls.from_rule(str(n["rule"]), int(n.get("K", 10)), p=p, strict=strict)
        return cls.from_list(n, p=p, strict=strict)

    def to_config(self) -> dict:
        out: dict = {"n": {"rule": self.rule, "K": len(self.n) - 1} if self.rule else list(self.n)}
        if self.p is not None:
            out["p"] = self.p.to_config()
        return out

    def __getitem__(self, k: int) -> int:
        return self.n_at(k)

    def n_at(self, k: int) -> int:
        if k < 0:
            raise IndexError(k)
        if k < len(self.n):
            return self.n[k]
        if self.rule is not None:
            tree = self._tree or ast.parse(self.rule.replace("^", "**"), mode="eval")
            return _eval_rule(tree, k)
        return self.n[-1]

    @property
    def geometric(self) -> Optional[tuple[Fraction, int]]:
        """(c, r) when ``rule`` is recognisably n_k = c * r**k."""
        if self.rule is None:
            return None
        return _geometric_form(self.rule)

    def tail_sum(self, H: int, power: int = 1, scale: int = 1) -> Optional[Fraction]:
        """Exact value of sum_{k>H} scale / n_k**power for geometric rules, else None.

        Returns ``None`` also when the tail diverges.
        """
        geo = self.geometric
        if geo is None:
            return None
        c, r = geo
        if r == 1:
            return None
        q = Fraction(1, r**power)
        first = Fraction(scale) / (c**power * Fraction(r) ** (power * (H + 1)))
        return first / (1 - q)


# ---------------------------------------------------------------------------
# growth conditions


@dataclass
class Condition:
    name: str
    description: str
    holds: Optional[bool]
    value: Optional[Fraction] = None
    threshold: Optional[Fraction] = None
    slack: Optional[Fraction] = None
    scope: str = "finite-horizon"
    note: str = ""
    details: list = field(default_factory=list)


@dataclass
class ConditionReport:
    params: ParamSeq
    horizon: int
    conditions: list[Condition]

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        """True iff every evaluated product/sum condition (a)-(d) holds."""
        return all(self[c].holds is True for c in "abcd")


def _cond_a(ps: ParamSeq, H: int) -> Condition:
    desc = "prod_k n_k/(n_k-2) <= 2"
    if any(ps[k] <= 2 for k in range(H + 1)):
        bad = next(k for k in range(H + 1) if ps[k] <= 2)
        return Condition("a", desc, False, note=f"n_{bad} = {ps[bad]} makes n_k/(n_k-2) undefined or negative")
    prod = Fraction(1)
    for k in range(H + 1):
        prod *= Fraction(ps[k], ps[k] - 2)
    thr = Fraction(2)
    tail = ps.tail_sum(H, scale=2)
    scope = "finite-horizon"
    value = prod
    note = ""
    if tail is not None:
        if tail < 1:
            # prod 1/(1-x_k) <= 1/(1 - sum x_k)
            value = prod / (1 - tail)
            scope = "certified"
        else:
            note = "tail bound unusable (sum of 2/n_k beyond horizon >= 1)"
    elif ps.geometric is not None:
        note = "tail diverges"
        return Condition("a", desc, False, value, thr, thr - value, "certified", note)
    return Condition("a", desc, value <= thr, value, thr, thr - value, scope, note)


def _cond_b(ps: ParamSeq, H: int) -> Condition:
    desc = "sum_k 2/n_k <= 1/32"
    total = sum((Fraction(2, ps[k]) for k in range(H + 1)), Fraction(0))
    thr = Fraction(1, 32)
    tail = ps.tail_sum(H, scale=2)
    scope = "finite-horizon"
    if tail is not None:
        total += tail
        scope = "certified"
    elif ps.geometric is not None:
        # constant sequence: the sum diverges
        return Condition("b", desc, False, None, thr, None, "certified", "sum diverges")
    # partial sums only grow, so a finite-horizon failure is already certified
    if total > thr:
        scope = "certified"
    return Condition("b", desc, total <= thr, total, thr, thr - total, scope)


def _constant_rule(ps: ParamSeq) -> bool:
    geo = ps.geometric
    return geo is not None and geo[1] == 1


def _cond_c(ps: ParamSeq, H: int) -> Condition:
    desc = "prod_k x_k/(x_k+1) > 7/8 with x_k = n_k^(4 n_{k+1} + 3)"
    if _constant_rule(ps):
        return Condition("c", desc, False, Fraction(0), Fraction(7, 8), Fraction(-7, 8),
                         "certified", "infinite product of a constant factor < 1 is 0")
    exact = Fraction(1)
    bounded = Fraction(0)  # sum of upper bounds on 1/(x_k+1) for huge x_k
    last = H if (ps.rule is not None or H + 1 < len(ps.n)) else H - 1
    for k in range(last + 1):
        nk, e = ps[k], 4 * ps[k + 1] + 3
        if e * nk.bit_length() <= EXACT_BITS:
            x = nk**e
            exact *= Fraction(x, x + 1)
        else:
            bounded += Fraction(1, nk ** min(e, 64))
    # prod (1 - u_k) >= 1 - sum u_k
    tail = ps.tail_sum(last, power=3)
    scope = "finite-horizon"
    if tail is not None:
        bounded += tail
        scope = "certified"
    value = exact * (1 - bounded)
    thr = Fraction(7, 8)
    note = "lower bound" if bounded else "exact partial product"
    return Condition("c", desc, value > thr, value, thr, value - thr, scope, note)


def _cond_d(ps: ParamSeq, H: int) -> Condition:
    desc = "for each m: prod_{k>=m} (1 - 1/n_k) > 1 - 1/4^(m+1)"
    if _constant_rule(ps):
        return Condition("d", desc, False, Fraction(0), None, None,
                         "certified", "infinite product of a constant factor < 1 is 0")
    tail = ps.tail_sum(H)
    scope = "certified" if tail is not None else "finite-horizon"
    ok = True
    worst: Optional[Fraction] = None
    details = []
    for m in range(1, H + 1):
        prod = Fraction(1)
        for k in range(m, H + 1):
            prod *= 1 - Fraction(1, ps[k])
        if tail is not None:
            prod *= 1 - tail
        thr = 1 - Fraction(1, 4 ** (m + 1))
        slack = prod - thr
        details.append({"m": m, "value": prod, "threshold": thr, "holds": slack > 0})
        ok = ok and slack > 0
        if worst is None or slack < worst:
            worst = slack
    if not details:
        return Condition("d", desc, None, note="horizon < 1: nothing to check")
    return Condition("d", desc, ok, None, None, worst, scope, details=details)


def _cond_e(ps: ParamSeq, H: int, length_fn: Optional[Callable[[ParamSeq, int], int]],
            max_bits: int) -> Condition:
    desc = "p_m > k(6+3n_k)m at m = L_k n_k^(2 n_{k+1} + 2)"
    if ps.p is None or length_fn is None:
        return Condition("e", desc, None, note="no target complexity rule or no length function")
    ok: Optional[bool] = True
    details = []
    for k in range(H + 1):
        nk, nk1 = ps[k], ps[k + 1]
        if (2 * nk1 + 2) * nk.bit_length() > max_bits:
            details.append({"k": k, "holds": None, "note": "magnitude cap"})
            ok = None if ok else ok
            break
        L = length_fn(ps, k)
        if L.bit_length() > max_bits:
            details.append({"k": k, "holds": None, "note": "magnitude cap"})
            ok = None if ok else ok
            break
        m = L * nk ** (2 * nk1 + 2)
        lhs, rhs = ps.p(m), k * (6 + 3 * nk) * m
        holds = lhs > rhs
        details.append({"k": k, "m_bits": m.bit_length(), "holds": holds})
        if not holds:
            ok = False
    return Condition("e", desc, ok, scope="finite-horizon", details=details)


def validate(params: ParamSeq, horizon: int,
             length_fn: Optional[Callable[[ParamSeq, int], int]] = None,
             max_bits: int = 1 << 20) -> ConditionReport:
    """Check growth conditions (a)-(e) on k = 0..horizon with exact rationals.

    For a listed sequence the horizon is clipped to the last listed index; the
    report's ``horizon`` is the one actually used.
    """
    if horizon < 0:
        raise ParamError("horizon must be non-negative")
    # a listed sequence is only checked on its listed terms
    if params.rule is None:
        horizon = min(horizon, len(params.n) - 1)
    conds = [
        _cond_a(params, horizon),
        _cond_b(params, horizon),
        _cond_c(params, horizon),
        _cond_d(params, horizon),
        _cond_e(params, horizon, length_fn, max_bits),
    ]
    return ConditionReport(params, horizon, conds)


# ---------------------------------------------------------------------------
# Gamma sequence


@dataclass
class GammaSeq:
    gamma: list[Fraction]

    @property
    def bounded(self) -> bool:
        return max(self.gamma) <= Fraction(1, 8)


def _ratios(params: ParamSeq, K: int) -> list[Fraction]:
    out = []
    for i in range(K):
        if params[i] <= 2:
            raise ParamError(f"n_{i} = {params[i]} <= 2: n/(n-2) is undefined or negative")
        out.append(Fraction(params[i], params[i] - 2))
    return out


def gamma(params: ParamSeq, K: int) -> GammaSeq:
    """Gamma_0..Gamma_K from the closed-form double sum."""
    r = _ratios(params, K)
    seq = [Fraction(0)]
    for k in range(1, K + 1):
        total = Fraction(0)
        prod = Fraction(1)
        for i in range(k - 1, -1, -1):
            prod *= r[i]  # prod_{j=i}^{k-1} r_j
            total += prod * prod * Fraction(2, params[i])
        seq.append(total)
    return GammaSeq(seq)


def gamma_by_recurrence(params: ParamSeq, K: int) -> GammaSeq:
    """Same sequence from Gamma_{k+1} = r_k^2 (Gamma_k + 2/n_k), r_k = n_k/(n_k-2)."""
    r = _ratios(params, K)
    seq = [Fraction(0)]
    for k in range(K):
        seq.append(r[k] * r[k] * (seq[-1] + Fraction(2, params[k])))
    return GammaSeq(seq)
