"""Block automata for Cayley representations, boundedness and product automata."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

from ..wreath import WreathProduct
from .cayley import CellExpr, Factor, Marked, one

State = Hashable
Label = Optional[Marked]  # None is an epsilon move

TOP = "⊤"
UNIT = "1"
UNIT_END = "1⊤"


@dataclass
class NFA:
    states: Set[State] = field(default_factory=set)
    transitions: Dict[State, List[Tuple[Label, State]]] = field(default_factory=dict)
    initial: Set[State] = field(default_factory=set)
    final: Set[State] = field(default_factory=set)

    def add(self, p: State, label: Label, q: State) -> None:
        self.states.update((p, q))
        edges = self.transitions.setdefault(p, [])
        if (label, q) not in edges:
            edges.append((label, q))

    def edges(self, p: State) -> List[Tuple[Label, State]]:
        return self.transitions.get(p, [])

    @property
    def alphabet(self) -> Set[Marked]:
        return {a for es in self.transitions.values() for a, _ in es if a is not None}

    def size(self) -> int:
        return len(self.states)

    def closure(self, qs: Iterable[State]) -> Set[State]:
        seen = set(qs)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for a, q in self.edges(p):
                if a is None and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    def step(self, qs: Set[State], letter: Marked) -> Set[State]:
        return self.closure(q for p in qs for a, q in self.edges(p) if a == letter)

    def accepts(self, word: Sequence[Marked]) -> bool:
        cur = self.closure(self.initial)
        for x in word:
            cur = self.step(cur, x)
            if not cur:
                return False
        return bool(cur & self.final)


BlockNfa = NFA


def _block_b(f: Dict[int, CellExpr], lo: int, hi: int, d: int, G) -> NFA:
    """The arithmetic-progression automaton for (f, d) with d > 0 on [lo, hi]."""
    ident = CellExpr.constant(G.identity())

    def val(c: int) -> CellExpr:
        return f.get(c, ident)

    def alpha(s: Tuple[int, ...]) -> Marked:
        acc = ident
        for c in s:
            acc = acc.add(val(c), G)
        return Marked(acc, top=s[0] == 0, bottom=s[-1] == d)

    nfa = NFA()
    start = (lo,)
    nfa.initial.add(start)
    nfa.final.add(TOP)
    nfa.states.update((start, TOP))
    todo, seen = [start], {start}

    def go(p, label, q):
        nfa.add(p, label, q)
        if q != TOP and q not in seen:
            seen.add(q)
            todo.append(q)

    while todo:
        s = todo.pop()
        if s[-1] == lo + d:
            go(s, None, s + (lo,))
        g = alpha(s)
        if s[0] < hi:
            go(s, g, tuple(c + 1 for c in s))
        elif len(s) > 1:
            go(s, g, tuple(c + 1 for c in s[1:]))
        else:
            go(s, g, TOP)
    return nfa


def reverse(nfa: NFA) -> NFA:
    out = NFA(set(nfa.states), {}, set(nfa.final), set(nfa.initial))
    for p, es in nfa.transitions.items():
        for a, q in es:
            out.add(q, a, p)
    return out


def build_block_nfa(word: Sequence[str], var: Optional[str], group: WreathProduct) -> NFA:
    """Automaton accepting a set representation of word^var (or of the constant word)."""
    G = group.base
    g = group.evaluate_word(list(word))
    lo, hi = group.support_interval(g)
    d = g.shift
    if var is None or d == 0:
        cells = dict(g.support)
        nfa = NFA()
        prev: State = ("c", lo)
        nfa.initial.add(prev)
        nfa.states.add(prev)
        for c in range(lo, hi + 1):
            v = cells.get(c, G.identity())
            e = CellExpr.power(v, var, G) if var is not None else CellExpr.constant(v)
            nxt: State = ("c", c + 1)
            nfa.add(prev, Marked(e, top=c == 0, bottom=c == d), nxt)
            prev = nxt
        nfa.final.add(prev)
        return nfa
    if d > 0:
        f = {p: CellExpr.constant(v) for p, v in g.support}
        nfa = _block_b(f, lo, hi, d, G)
    else:
        f = {-p: CellExpr.constant(v) for p, v in g.support}
        mirrored = _block_b(f, -hi, -lo, -d, G)
        nfa = reverse(mirrored)
        # marks keep their meaning: the origin stays the top, the mirrored end is at d
    # the empty power is represented by a single doubly marked identity cell
    nfa.initial.add(UNIT)
    nfa.add(UNIT, one(G, True, True), UNIT_END)
    nfa.final.add(UNIT_END)
    return nfa


def factor_nfa(factor: Factor, group: WreathProduct) -> NFA:
    return build_block_nfa(factor.word, factor.var, group)


def pad(nfa: NFA, G) -> NFA:
    """Accept 1* L 1* using two extra states."""
    ident = one(G)
    out = NFA(set(nfa.states), {p: list(es) for p, es in nfa.transitions.items()}, {"pre"}, {"post"})
    out.add("pre", ident, "pre")
    out.add("post", ident, "post")
    for q in nfa.initial:
        out.add("pre", None, q)
    for q in nfa.final:
        out.add(q, None, "post")
    return out


def remove_epsilon(nfa: NFA) -> NFA:
    out = NFA()
    out.initial = set(nfa.initial)
    out.states = set(nfa.states)
    for p in nfa.states:
        cl = nfa.closure([p])
        if cl & nfa.final:
            out.final.add(p)
        for r in cl:
            for a, q in nfa.edges(r):
                if a is not None:
                    out.add(p, a, q)
    return trim(out)


def trim(nfa: NFA) -> NFA:
    fwd = _reach(nfa, nfa.initial, forward=True)
    bwd = _reach(nfa, nfa.final, forward=False)
    keep = fwd & bwd
    out = NFA(set(keep), {}, nfa.initial & keep, nfa.final & keep)
    for p in keep:
        for a, q in nfa.edges(p):
            if q in keep:
                out.add(p, a, q)
    return out


def _reach(nfa: NFA, start: Iterable[State], forward: bool) -> Set[State]:
    if forward:
        adj = {p: [q for _, q in es] for p, es in nfa.transitions.items()}
    else:
        adj: Dict[State, List[State]] = {}
        for p, es in nfa.transitions.items():
            for _, q in es:
                adj.setdefault(q, []).append(p)
    seen = set(start)
    stack = list(seen)
    while stack:
        p = stack.pop()
        for q in adj.get(p, []):
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


# -- boundedness ---------------------------------------------------------------


def sccs(nfa: NFA) -> List[List[State]]:
    """Strongly connected components (iterative Tarjan), in reverse topological order."""
    index: Dict[State, int] = {}
    low: Dict[State, int] = {}
    on: Set[State] = set()
    stack: List[State] = []
    out: List[List[State]] = []
    counter = 0
    for root in sorted(nfa.states, key=repr):
        if root in index:
            continue
        work = [(root, iter(nfa.edges(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            p, it = work[-1]
            advanced = False
            for _, q in it:
                if q not in index:
                    index[q] = low[q] = counter
                    counter += 1
                    stack.append(q)
                    on.add(q)
                    work.append((q, iter(nfa.edges(q))))
                    advanced = True
                    break
                if q in on:
                    low[p] = min(low[p], index[q])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[p])
            if low[p] == index[p]:
                comp = []
                while True:
                    q = stack.pop()
                    on.discard(q)
                    comp.append(q)
                    if q == p:
                        break
                out.append(comp)
    return out


def check_bounded(nfa: NFA) -> bool:
    """Every strongly connected component is a single directed cycle (or a loop-free state)."""
    for comp in sccs(nfa):
        members = set(comp)
        for p in comp:
            inner = [q for _, q in nfa.edges(p) if q in members]
            if len(comp) == 1:
                if len(inner) > 1:
                    return False
            elif len(inner) != 1:
                return False
    return True


def _shortest_words(nfa: NFA, members: Set[State], p: State) -> Dict[State, Tuple[Marked, ...]]:
    """Shortest non-empty-path words from p to every state of its component (p itself via a cycle)."""
    out: Dict[State, Tuple[Marked, ...]] = {}
    queue = deque([(p, ())])
    seen = set()
    while queue:
        r, w = queue.popleft()
        for a, q in nfa.edges(r):
            if q not in members:
                continue
            w2 = w + ((a,) if a is not None else ())
            if q not in out:
                out[q] = w2
            if q not in seen:
                seen.add(q)
                queue.append((q, w2))
    return out


def bounded_decomposition(nfa: NFA) -> List[Tuple[Marked, ...]]:
    """Words b1..bn with L(nfa) inside b1* ... bn*.

    Components are layered by longest distance in the component DAG; inside a
    component (a cycle) a path from p to q reads w_pq w_qq^k.  Letters on edges
    leaving a layer come right after that layer.
    """
    if not check_bounded(nfa):
        raise ValueError("automaton is not bounded by the cycle criterion")
    nfa = remove_epsilon(nfa)
    comps = sccs(nfa)
    comp_of = {p: i for i, c in enumerate(comps) for p in c}
    order = list(range(len(comps)))[::-1]  # topological
    layer = {i: 0 for i in order}
    for i in order:
        for p in comps[i]:
            for _, q in nfa.edges(p):
                j = comp_of[q]
                if j != i:
                    layer[j] = max(layer[j], layer[i] + 1)
    betas: List[Tuple[Marked, ...]] = []
    for lv in range(max(layer.values(), default=-1) + 1):
        exits: List[Tuple[Marked, ...]] = []
        for i in order:
            if layer[i] != lv:
                continue
            members = set(comps[i])
            for p in comps[i]:
                words = _shortest_words(nfa, members, p)
                for q in comps[i]:
                    if q in words:
                        w_pq = words[q]
                        w_qq = _shortest_words(nfa, members, q).get(q, ())
                        for w in (w_pq, w_qq):
                            if w and w not in betas[-2:]:
                                betas.append(w)
                for a, q in nfa.edges(p):
                    if comp_of[q] != i and (a,) not in exits:
                        exits.append((a,))
        betas.extend(exits)
    return betas


def in_bounded_product(word: Sequence[Marked], betas: Sequence[Sequence[Marked]]) -> bool:
    """Is word in b1* b2* ... bn*?"""
    n = len(word)
    reach = {0}
    for b in betas:
        b = tuple(b)
        frontier = list(reach)
        while frontier and b:
            nxt = []
            for i in frontier:
                j = i + len(b)
                if j <= n and tuple(word[i:j]) == b and j not in reach:
                    reach.add(j)
                    nxt.append(j)
            frontier = nxt
    return n in reach


# -- runs and sampling ---------------------------------------------------------


def run_trace(nfa: NFA, word: Sequence[Marked]) -> Optional[List[State]]:
    """States of one accepting run, epsilon moves included, or None."""
    start = [(q, 0) for q in nfa.initial]
    parent: Dict[Tuple[State, int], Optional[Tuple[State, int]]] = {s: None for s in start}
    queue = deque(start)
    goal = None
    while queue:
        q, i = queue.popleft()
        if i == len(word) and q in nfa.final:
            goal = (q, i)
            break
        for a, r in nfa.edges(q):
            if a is None:
                nxt = (r, i)
            elif i < len(word) and a == word[i]:
                nxt = (r, i + 1)
            else:
                continue
            if nxt not in parent:
                parent[nxt] = (q, i)
                queue.append(nxt)
    if goal is None:
        return None
    path = []
    node = goal
    while node is not None:
        path.append(node[0])
        node = parent[node]
    return path[::-1]


def sample_accepted(nfa: NFA, rng: random.Random, max_len: int = 40, tries: int = 200) -> Optional[List[Marked]]:
    """Random walk restricted to states that can still reach a final state."""
    alive = _reach(nfa, nfa.final, forward=False)
    starts = [q for q in nfa.initial if q in alive]
    if not starts:
        return None
    for _ in range(tries):
        q = rng.choice(sorted(starts, key=repr))
        word: List[Marked] = []
        steps = 0
        while steps < 4 * max_len + 10:
            steps += 1
            moves = [(a, r) for a, r in nfa.edges(q) if r in alive]
            if q in nfa.final and (not moves or rng.random() < 0.15):
                return word
            if not moves:
                break
            a, q = rng.choice(moves)
            if a is not None:
                word.append(a)
            if len(word) > max_len:
                break
    return None


# -- products --------------------------------------------------------------------


def merge_tuple(gammas: Sequence[Marked], G) -> Optional[Marked]:
    """Label of a tuple of cells, or None when the tuple is not consistent."""
    for g1, g2 in zip(gammas, gammas[1:]):
        if g1.bottom and not g2.top:
            return None
    acc = CellExpr.constant(G.identity())
    for g in gammas:
        acc = acc.add(g.expr, G)
    return Marked(acc, top=gammas[0].top, bottom=gammas[-1].bottom)


def product_nfa(nfas: Sequence[NFA], G, max_states: int = 200000) -> NFA:
    """Synchronous product over consistent tuples; inputs should be padded."""
    parts = [remove_epsilon(n) for n in nfas]
    out = NFA()
    starts = [tuple(s) for s in _cartesian([sorted(p.initial, key=repr) for p in parts])]
    out.initial = set(starts)
    out.states = set(starts)
    todo = list(starts)
    while todo:
        s = todo.pop()
        if all(q in p.final for q, p in zip(s, parts)):
            out.final.add(s)
        for combo in _cartesian([p.edges(q) for q, p in zip(s, parts)]):
            label = merge_tuple([a for a, _ in combo], G)
            if label is None:
                continue
            t = tuple(q for _, q in combo)
            if t not in out.states:
                if len(out.states) >= max_states:
                    raise RuntimeError("product automaton too large")
                todo.append(t)
            out.add(s, label, t)
    return out


def _cartesian(lists):
    out = [()]
    for options in lists:
        out = [o + (x,) for o in out for x in options]
    return out
