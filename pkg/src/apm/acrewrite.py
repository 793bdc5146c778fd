"""Rewriting with the module rules ring1-ring9, mod1-mod10 modulo AC.

An independent route to the module normal form: terms are kept flattened
under the AC symbols ``add``, ``mul`` and ``oplus`` (arguments sorted), and
each oriented rule is coded as a function listing its redexes at a node.
Reduction picks a random redex at every step, so running it with several
seeds exercises several reduction orders.
"""
from __future__ import annotations

import random
from collections import Counter

from .terms import App, Signature, Term

AC_OPS = ("add", "mul", "oplus")

ZERO = ("0", ())
ONE = ("1", ())
ZEROM = ("0m", ())


def mk(op: str, args) -> tuple:
    if op not in AC_OPS:
        return (op, tuple(args))
    flat = []
    for a in args:
        if a[0] == op:
            flat.extend(a[1])
        else:
            flat.append(a)
    if len(flat) == 1:
        return flat[0]
    return (op, tuple(sorted(flat)))


def from_term(t: Term) -> tuple:
    return mk(t.op.name, [from_term(a) for a in t.args])


def to_term(n: tuple, sig: Signature) -> Term:
    op, args = n
    if op in AC_OPS:
        acc = to_term(args[-1], sig)
        for a in reversed(args[:-1]):
            acc = App(sig.op(op), (to_term(a, sig), acc))
        return acc
    return App(sig.op(op), [to_term(a, sig) for a in args])


def _minus(args, remove):
    c = Counter(args)
    c.subtract(remove)
    if any(v < 0 for v in c.values()):
        return None
    return tuple(sorted(c.elements()))


def _flat(u, op):
    return u[1] if u[0] == op else (u,)


def _split(items, rng):
    """Random partition of ``items`` into two nonempty parts."""
    items = list(items)
    while True:
        mask = [rng.random() < 0.5 for _ in items]
        if any(mask) and not all(mask):
            return [x for x, m in zip(items, mask) if m], [x for x, m in zip(items, mask) if not m]


def _subset(items, rng):
    """Random nonempty sub-multiset of ``items``, and the remainder."""
    items = list(items)
    while True:
        mask = [rng.random() < 0.5 for _ in items]
        if any(mask):
            return [x for x, m in zip(items, mask) if m], [x for x, m in zip(items, mask) if not m]


def _with_rest(op, rest, new):
    return mk(op, list(rest) + [new]) if rest else new


# each rule: node, rng -> list of reducts (empty when not applicable)


def ring1(n, rng):
    if n[0] == "add" and ZERO in n[1]:
        return [mk("add", _minus(n[1], [ZERO]))]
    return []


def ring2(n, rng):
    out = []
    if n[0] != "add":
        return out
    for i, el in enumerate(n[1]):
        if el[0] == "neg":
            rest = n[1][:i] + n[1][i + 1:]
            left = _minus(rest, _flat(el[1][0], "add"))
            if left is not None:
                out.append(_with_rest("add", left, ZERO))
    return out


def ring3(n, rng):
    return [ZERO] if n == ("neg", (ZERO,)) else []


def ring4(n, rng):
    if n[0] == "neg" and n[1][0][0] == "neg":
        return [n[1][0][1][0]]
    return []


def ring5(n, rng):
    if n[0] == "neg" and n[1][0][0] == "add":
        a, b = _split(n[1][0][1], rng)
        return [mk("add", [("neg", (mk("add", a),)), ("neg", (mk("add", b),))])]
    return []


def _mul_with(n, pred, build, rng):
    out = []
    if n[0] != "mul":
        return out
    for i, el in enumerate(n[1]):
        if pred(el):
            others = n[1][:i] + n[1][i + 1:]
            x, rest = _subset(others, rng)
            out.append(_with_rest("mul", rest, build(mk("mul", x), el)))
    return out


def ring6(n, rng):
    def build(x, el):
        y, z = _split(el[1], rng)
        return mk("add", [mk("mul", [x, mk("add", y)]), mk("mul", [x, mk("add", z)])])

    return _mul_with(n, lambda el: el[0] == "add", build, rng)


def ring7(n, rng):
    return _mul_with(n, lambda el: el == ZERO, lambda x, el: ZERO, rng)


def ring8(n, rng):
    return _mul_with(n, lambda el: el[0] == "neg", lambda x, el: ("neg", (mk("mul", [x, el[1][0]]),)), rng)


def ring9(n, rng):
    if n[0] == "mul" and ONE in n[1]:
        return [mk("mul", _minus(n[1], [ONE]))]
    return []


def mod1(n, rng):
    if n[0] == "oplus" and ZEROM in n[1]:
        return [mk("oplus", _minus(n[1], [ZEROM]))]
    return []


def mod2(n, rng):
    if n[0] == "act" and n[1][1][0] == "act":
        x, (_, (y, a)) = n[1]
        return [("act", (mk("mul", [x, y]), a))]
    return []


def mod3(n, rng):
    return [n[1][1]] if n[0] == "act" and n[1][0] == ONE else []


def mod4(n, rng):
    out = []
    if n[0] != "oplus":
        return out
    args = n[1]
    for i in range(len(args)):
        for j in range(i + 1, len(args)):
            u, v = args[i], args[j]
            if u[0] == "act" and v[0] == "act" and u[1][1] == v[1][1]:
                rest = args[:i] + args[i + 1:j] + args[j + 1:]
                new = ("act", (mk("add", [u[1][0], v[1][0]]), u[1][1]))
                out.append(_with_rest("oplus", rest, new))
    return out


def mod5(n, rng):
    if n[0] == "act" and n[1][1][0] == "oplus":
        x = n[1][0]
        a, b = _split(n[1][1][1], rng)
        return [mk("oplus", [("act", (x, mk("oplus", a))), ("act", (x, mk("oplus", b)))])]
    return []


def mod6(n, rng):
    out = []
    if n[0] != "oplus":
        return out
    for i, el in enumerate(n[1]):
        if el[0] == "act":
            x, a = el[1]
            rest = n[1][:i] + n[1][i + 1:]
            left = _minus(rest, _flat(a, "oplus"))
            if left is not None:
                out.append(_with_rest("oplus", left, ("act", (mk("add", [ONE, x]), a))))
    return out


def mod7(n, rng):
    if n[0] != "oplus":
        return []
    half = []
    for el, k in Counter(n[1]).items():
        half.extend([el] * (k // 2))
    if not half:
        return []
    a, _ = _subset(half, rng)
    rest = _minus(n[1], a + a)
    return [_with_rest("oplus", rest, ("act", (mk("add", [ONE, ONE]), mk("oplus", a))))]


def mod8(n, rng):
    return [ZEROM] if n[0] == "act" and n[1][1] == ZEROM else []


def mod9(n, rng):
    return [ZEROM] if n[0] == "act" and n[1][0] == ZERO else []


def mod10(n, rng):
    return [("act", (("neg", (ONE,)), n[1][0]))] if n[0] == "inv" else []


RULES = {
    "add": (ring1, ring2),
    "neg": (ring3, ring4, ring5),
    "mul": (ring6, ring7, ring8, ring9),
    "oplus": (mod1, mod4, mod6, mod7),
    "act": (mod2, mod3, mod5, mod8, mod9),
    "inv": (mod10,),
}


def _redexes(n, rng, path=()):
    out = []
    for rule in RULES.get(n[0], ()):
        for r in rule(n, rng):
            out.append((path, rule.__name__, r))
    for i, a in enumerate(n[1]):
        out.extend(_redexes(a, rng, path + (i,)))
    return out


def _replace(n, path, new):
    if not path:
        return new
    i = path[0]
    args = list(n[1])
    args[i] = _replace(args[i], path[1:], new)
    return mk(n[0], args)


def random_normal_form(n: tuple, rng: random.Random, limit: int = 10000):
    """Reduce the flattened term ``n`` choosing uniformly among all redexes.

    Returns the normal form and the list of rule names used.
    """
    used = []
    for _ in range(limit):
        reds = _redexes(n, rng)
        if not reds:
            return n, used
        path, name, new = rng.choice(reds)
        used.append(name)
        n = _replace(n, path, new)
    raise RuntimeError("module rewriting did not terminate within the step limit")


def is_normal(n: tuple) -> bool:
    return not _redexes(n, random.Random(0))


def modc_normal_form(t: Term, sig: Signature, seed: int = 0) -> Term:
    nf, _ = random_normal_form(from_term(t), random.Random(seed))
    return to_term(nf, sig)
