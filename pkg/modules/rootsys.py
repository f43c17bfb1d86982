"""
rootsys.py — Root systems of types A–G in simple-root coordinates, and the
relative root system of a standard parabolic (projection π_{J,Γ}).
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from sympy import Matrix, Rational

from modules.errors import RejectedInput

logger = logging.getLogger(__name__)

Root = tuple[int, ...]

# ── Classical data ───────────────────────────────────────────────────────────

_E_EDGES = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]


def _gram_matrix(letter: str, rank: int) -> list[list[int]]:
    """Inner products of simple roots, short roots normalized to (α,α)=2 (Bourbaki numbering)."""
    n = rank
    g = [[0] * n for _ in range(n)]

    def edge(i: int, j: int, value: int) -> None:
        g[i - 1][j - 1] = g[j - 1][i - 1] = value

    if letter == "A":
        for i in range(n):
            g[i][i] = 2
        for i in range(1, n):
            edge(i, i + 1, -1)
    elif letter == "B":
        for i in range(n - 1):
            g[i][i] = 4
        g[n - 1][n - 1] = 2
        for i in range(1, n):
            edge(i, i + 1, -2)
    elif letter == "C":
        for i in range(n - 1):
            g[i][i] = 2
        g[n - 1][n - 1] = 4
        for i in range(1, n - 1):
            edge(i, i + 1, -1)
        edge(n - 1, n, -2)
    elif letter == "D":
        for i in range(n):
            g[i][i] = 2
        for i in range(1, n - 1):
            edge(i, i + 1, -1)
        edge(n - 2, n, -1)
    elif letter == "E":
        for i in range(n):
            g[i][i] = 2
        for i, j in _E_EDGES:
            if i <= n and j <= n:
                edge(i, j, -1)
    elif letter == "F":
        g[0][0] = g[1][1] = 4
        g[2][2] = g[3][3] = 2
        edge(1, 2, -2)
        edge(2, 3, -2)
        edge(3, 4, -1)
    elif letter == "G":
        g[0][0], g[1][1] = 2, 6
        edge(1, 2, -3)
    return g


def _check_label(letter: str, rank: int) -> None:
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }.get(letter, False)
    if not ok:
        raise RejectedInput(f"invalid root system type {letter}{rank}")


def parse_label(text: str, rank: int | None = None) -> tuple[str, int]:
    """'G2' or ('D', 12) -> ('D', 12)."""
    text = text.strip().upper()
    if not text or text[0] not in "ABCDEFG":
        raise RejectedInput(f"invalid root system type '{text}'")
    letter, digits = text[0], text[1:]
    if digits:
        if not digits.isdigit():
            raise RejectedInput(f"invalid root system type '{text}'")
        if rank is not None and rank != int(digits):
            raise RejectedInput(f"type {text} conflicts with rank {rank}")
        rank = int(digits)
    if rank is None:
        raise RejectedInput(f"type {letter} needs a rank")
    _check_label(letter, rank)
    return letter, rank


# ── Absolute root data ───────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class RootDatum:
    letter: str
    rank: int
    gram: tuple[tuple[int, ...], ...]
    cartan: tuple[tuple[int, ...], ...]
    roots: tuple[Root, ...]
    reduced: bool = True

    @property
    def label(self) -> str:
        return f"{self.letter}{self.rank}"

    @property
    def simple_roots(self) -> tuple[Root, ...]:
        return tuple(tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank))

    @property
    def positive_roots(self) -> tuple[Root, ...]:
        return self.roots[: len(self.roots) // 2]

    @property
    def negative_roots(self) -> tuple[Root, ...]:
        return self.roots[len(self.roots) // 2:]

    @property
    def root_set(self) -> frozenset:
        return _root_set(self)

    def is_root(self, v) -> bool:
        return tuple(v) in self.root_set

    def index(self, root: Root) -> int:
        return _root_index(self)[tuple(root)]

    @staticmethod
    def height(root: Root) -> int:
        return sum(root)

    def inner(self, a, b) -> int:
        g = self.gram
        return sum(a[i] * b[j] * g[i][j] for i in range(self.rank) if a[i] for j in range(self.rank) if b[j])

    def norm(self, a) -> int:
        return self.inner(a, a)

    def pairing(self, beta, j: int) -> int:
        """⟨β, α_j^∨⟩ = Σ_i b_i A_ij."""
        return sum(beta[i] * self.cartan[i][j] for i in range(self.rank))

    def reflect(self, beta, j: int) -> Root:
        c = self.pairing(beta, j)
        return tuple(b - c * (i == j) for i, b in enumerate(beta))

    def coroot_coeffs(self, alpha) -> tuple[int, ...]:
        """α^∨ = Σ m_i (α_i,α_i)/(α,α) α_i^∨."""
        na = self.norm(alpha)
        return tuple(alpha[i] * self.gram[i][i] // na for i in range(self.rank))

    @property
    def highest_root(self) -> Root:
        return self.positive_roots[-1]

    def coeffs(self, alpha) -> tuple[int, ...]:
        """m_i(α) for α = Σ m_i α_i."""
        return tuple(alpha)

    def highest_root_and_coeffs(self) -> tuple[Root, tuple[int, ...]]:
        top = self.highest_root
        return top, self.coeffs(top)

    def to_dict(self) -> dict:
        return {
            "type": self.label,
            "rank": self.rank,
            "cartan": [list(r) for r in self.cartan],
            "simple_roots": [list(r) for r in self.simple_roots],
            "roots": [list(r) for r in self.roots],
            "count": len(self.roots),
            "highest_root": list(self.highest_root),
            "reduced": self.reduced,
        }


@lru_cache(maxsize=None)
def _root_set(rd: RootDatum) -> frozenset:
    return frozenset(rd.roots)


@lru_cache(maxsize=None)
def _root_index(rd: RootDatum) -> dict:
    return {r: i for i, r in enumerate(rd.roots)}


def root_order_key(root: Root) -> tuple:
    return (sum(root), root)


def build_root_system(letter: str, rank: int | None = None) -> RootDatum:
    """Enumerate Φ by closing the simple roots under simple reflections."""
    letter, rank = parse_label(letter, rank)
    return _build(letter, rank)


@lru_cache(maxsize=None)
def _build(letter: str, rank: int) -> RootDatum:
    gram = _gram_matrix(letter, rank)
    cartan = [
        [2 * gram[i][j] // gram[j][j] for j in range(rank)] for i in range(rank)
    ]
    simple = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    seen = set(simple)
    queue = deque(simple)
    while queue:
        beta = queue.popleft()
        for j in range(rank):
            c = sum(beta[i] * cartan[i][j] for i in range(rank))
            image = tuple(b - c * (i == j) for i, b in enumerate(beta))
            if image not in seen:
                seen.add(image)
                queue.append(image)
    positive = sorted((r for r in seen if all(x >= 0 for x in r)), key=root_order_key)
    negative = [tuple(-x for x in r) for r in positive]
    rd = RootDatum(
        letter=letter,
        rank=rank,
        gram=tuple(tuple(r) for r in gram),
        cartan=tuple(tuple(r) for r in cartan),
        roots=tuple(positive + negative),
    )
    logger.debug(f"built {rd.label}: {len(rd.roots)} roots")
    return rd


# ── Relative root data ───────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class RelativeRootDatum:
    source: RootDatum
    J: tuple[int, ...]                      # surviving nodes, 1-based
    gamma: tuple[tuple[int, ...], ...] = ()  # node permutations, 1-based images
    orbits: tuple[tuple[int, ...], ...] = ()
    relative_roots: tuple[Root, ...] = ()
    fibers: tuple[tuple[Root, tuple[Root, ...]], ...] = ()
    levi_roots: tuple[Root, ...] = ()
    gram: tuple[tuple[Fraction, ...], ...] = ()
    type_label: str = ""
    reduced: bool = True
    _fiber_map: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def rank(self) -> int:
        return len(self.orbits)

    @property
    def key(self) -> tuple:
        return (self.source.label, self.J, self.gamma)

    @property
    def positive_roots(self) -> tuple[Root, ...]:
        return self.relative_roots[: len(self.relative_roots) // 2]

    def project(self, beta) -> Root:
        return tuple(sum(beta[i - 1] for i in orbit) for orbit in self.orbits)

    def fiber(self, alpha) -> tuple[Root, ...]:
        alpha = tuple(alpha)
        if alpha not in self._fiber_map:
            raise RejectedInput(f"{list(alpha)} is not a relative root of {self.type_label}")
        return self._fiber_map[alpha]

    def is_root(self, alpha) -> bool:
        return tuple(alpha) in self._fiber_map

    def degree(self, beta) -> int:
        """J-height of an absolute root (sum of its surviving coordinates)."""
        return sum(beta[i - 1] for orbit in self.orbits for i in orbit)

    def multiple(self, alpha) -> int:
        alpha = tuple(alpha)
        self.fiber(alpha)
        k = 1
        while self.is_root(tuple((k + 1) * a for a in alpha)):
            k += 1
        return k

    def relative_multiples(self, alpha) -> tuple[int, list[tuple[Root, ...]]]:
        m = self.multiple(alpha)
        return m, [self.fiber(tuple(k * a for a in alpha)) for k in range(1, m + 1)]

    def inner(self, a, b) -> Fraction:
        g = self.gram
        return sum((a[i] * b[j] * g[i][j] for i in range(self.rank) for j in range(self.rank)),
                   Fraction(0))

    def cartan(self) -> list[list[int]]:
        g = self.gram
        return [[int(2 * g[i][j] / g[j][j]) for j in range(self.rank)] for i in range(self.rank)]

    def to_dict(self) -> dict:
        index = {r: i for i, r in enumerate(self.source.roots)}
        return {
            "source": self.source.label,
            "J": list(self.J),
            "gamma": [list(p) for p in self.gamma],
            "type": self.type_label,
            "rank": self.rank,
            "reduced": self.reduced,
            "relative_roots": [list(a) for a in self.relative_roots],
            "cartan": self.cartan(),
            "fibers": [
                {"root": list(a), "fiber": [index[b] for b in fib], "multiple": self.multiple(a)}
                for a, fib in self.fibers
            ],
            "levi_roots": len(self.levi_roots),
        }


def _orbits(nodes: tuple[int, ...], gamma: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    parent = {v: v for v in nodes}

    def find(v: int) -> int:
        while parent[v] != v:
            v = parent[v]
        return v

    for perm in gamma:
        for v in nodes:
            a, b = find(v), find(perm[v - 1])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict = {}
    for v in nodes:
        groups.setdefault(find(v), []).append(v)
    return tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))


def _check_gamma(rd: RootDatum, gamma) -> tuple[tuple[int, ...], ...]:
    out = []
    n = rd.rank
    for perm in gamma:
        perm = tuple(int(x) for x in perm)
        if sorted(perm) != list(range(1, n + 1)):
            raise RejectedInput(f"{list(perm)} is not a permutation of the Dynkin nodes")
        for i in range(n):
            for j in range(n):
                if rd.cartan[perm[i] - 1][perm[j] - 1] != rd.cartan[i][j]:
                    raise RejectedInput(f"{list(perm)} is not a Dynkin diagram automorphism")
        out.append(perm)
    return tuple(out)


def relative_projection(rd: RootDatum, J, gamma=()) -> RelativeRootDatum:
    """Project Φ through ℤΦ → ℤΦ/⟨Π∖J, α−σ(α)⟩ and classify the image."""
    J = tuple(sorted(set(int(j) for j in J)))
    if not J:
        raise RejectedInput("J must contain at least one node")
    if any(j < 1 or j > rd.rank for j in J):
        raise RejectedInput(f"J={list(J)} has nodes outside 1..{rd.rank}")
    gamma = _check_gamma(rd, gamma)
    for perm in gamma:
        if {perm[j - 1] for j in J} != set(J):
            raise RejectedInput(f"J={list(J)} is not Γ-invariant")
    orbits = _orbits(J, gamma)

    def project(beta):
        return tuple(sum(beta[i - 1] for i in orbit) for orbit in orbits)

    fibers: dict = {}
    levi = []
    for beta in rd.roots:
        image = project(beta)
        if any(image):
            fibers.setdefault(image, []).append(beta)
        else:
            levi.append(beta)
    positive = sorted((a for a in fibers if all(x >= 0 for x in a)), key=root_order_key)
    relative = tuple(positive + [tuple(-x for x in a) for a in positive])
    fiber_map = {a: tuple(sorted(fibers[a])) for a in relative}

    gram = _relative_gram(rd, J, gamma, orbits)
    reduced = not any(tuple(2 * x for x in a) in fiber_map for a in relative)
    rrd = RelativeRootDatum(
        source=rd,
        J=J,
        gamma=gamma,
        orbits=orbits,
        relative_roots=relative,
        fibers=tuple((a, fiber_map[a]) for a in relative),
        levi_roots=tuple(levi),
        gram=gram,
        reduced=reduced,
        _fiber_map=fiber_map,
    )
    label = classify(rrd)
    object.__setattr__(rrd, "type_label", label)
    logger.info(f"{rd.label} with J={list(J)}: relative type {label}, {len(relative)} roots")
    return rrd


def split_datum(rd: RootDatum) -> RelativeRootDatum:
    """The Borel case: every node survives, relative roots are the absolute ones."""
    return _split_cached(rd)


@lru_cache(maxsize=None)
def _split_cached(rd: RootDatum) -> RelativeRootDatum:
    return relative_projection(rd, range(1, rd.rank + 1))


def _relative_gram(rd: RootDatum, J, gamma, orbits) -> tuple[tuple[Fraction, ...], ...]:
    """Inner products of the projected simple roots, orthogonal to the Levi span."""
    n = rd.rank
    G = Matrix(n, n, lambda i, j: Rational(rd.gram[i][j]))
    kernel = [tuple(int(i == k) for i in range(n)) for k in range(n) if k + 1 not in J]
    for perm in gamma:
        for j in J:
            if perm[j - 1] != j:
                kernel.append(tuple(int(i == j - 1) - int(i == perm[j - 1] - 1) for i in range(n)))

    def proj(v):
        vec = Matrix(n, 1, list(v))
        if not kernel:
            return vec
        W = Matrix([list(w) for w in kernel]).T
        A = W.T * G * W
        rhs = W.T * G * vec
        coeffs = A.pinv() * rhs if A.det() == 0 else A.LUsolve(rhs)
        return vec - W * coeffs

    reps = [proj(tuple(int(i == orbit[0] - 1) for i in range(n))) for orbit in orbits]
    out = []
    for a in reps:
        row = []
        for b in reps:
            val = (a.T * G * b)[0, 0]
            row.append(Fraction(int(val.p), int(val.q)))
        out.append(tuple(row))
    return tuple(out)


# ── Classification ───────────────────────────────────────────────────────────

def classify(rrd: RelativeRootDatum) -> str:
    """Type label of Φ_P from its simple-root Cartan matrix, BC when α and 2α both occur."""
    r = rrd.rank
    cartan = rrd.cartan()
    adj = {i: [j for j in range(r) if j != i and cartan[i][j]] for i in range(r)}
    seen, parts = set(), []
    for start in range(r):
        if start in seen:
            continue
        comp, stack = [], [start]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            comp.append(v)
            stack.extend(adj[v])
        comp.sort()
        parts.append(_classify_component(rrd, comp, cartan, adj))
    return "+".join(parts)


def _classify_component(rrd: RelativeRootDatum, comp, cartan, adj) -> str:
    r = len(comp)
    multiplied = any(
        tuple(2 * x for x in a) in rrd._fiber_map
        for a in rrd.relative_roots
        if any(a[i] for i in comp) and not any(a[i] for i in range(rrd.rank) if i not in comp)
    )
    if multiplied:
        return f"BC{r}"
    if r == 1:
        return "A1"
    bonds = {}
    for i in comp:
        for j in adj[i]:
            if i < j:
                bonds[(i, j)] = cartan[i][j] * cartan[j][i]
    if 3 in bonds.values():
        return "G2"
    degree = {i: len(adj[i]) for i in comp}
    if 2 in bonds.values():
        if r == 2:
            return "B2"
        (i, j), = [e for e, b in bonds.items() if b == 2]
        if r == 4 and degree[i] == 2 and degree[j] == 2:
            return "F4"
        end = i if degree[i] == 1 else j
        other = j if end == i else i
        short_end = rrd.gram[end][end] < rrd.gram[other][other]
        return f"B{r}" if short_end else f"C{r}"
    branch = [i for i in comp if degree[i] == 3]
    if not branch:
        return f"A{r}"
    b = branch[0]
    arms = []
    for start in adj[b]:
        length, prev, cur = 1, b, start
        while degree[cur] == 2:
            nxt = [x for x in adj[cur] if x != prev][0]
            prev, cur = cur, nxt
            length += 1
        arms.append(length)
    arms.sort()
    if arms[:2] == [1, 1]:
        return f"D{r}"
    return f"E{r}"


# ── Choice of α₁ ─────────────────────────────────────────────────────────────

def highest_relative_root(rrd: RelativeRootDatum) -> Root:
    return rrd.positive_roots[-1]


def pick_alpha1(rrd: RelativeRootDatum) -> tuple[int, int]:
    """Return (1-based relative node, m₁(α̃)) following the terminal/adjacent dichotomy."""
    if rrd.rank < 2:
        raise RejectedInput("isotropic rank must be at least 2")
    if "+" in rrd.type_label:
        raise RejectedInput(f"relative system {rrd.type_label} is not irreducible")
    top = highest_relative_root(rrd)
    cartan = rrd.cartan()
    r = rrd.rank
    degree = [sum(1 for j in range(r) if j != i and cartan[i][j]) for i in range(r)]
    for i in range(r):
        if degree[i] <= 1 and top[i] == 1:
            return i + 1, 1
    simple = [tuple(int(k == i) for k in range(r)) for i in range(r)]
    for i in range(r):
        if top[i] == 2 and rrd.inner(simple[i], top) != 0:
            return i + 1, 2
    raise RejectedInput(f"no admissible α₁ in {rrd.type_label}")


def relative_multiples(rrd: RelativeRootDatum, alpha) -> tuple[int, list[tuple[Root, ...]]]:
    return rrd.relative_multiples(alpha)


def weyl_reduced_word(rd: RootDatum, target_pairings) -> list[int]:
    """Reduced word (0-based nodes) of the w with w(ρ) having the given coroot pairings."""
    c = list(target_pairings)
    word = []
    n = rd.rank
    while True:
        for i in range(n):
            if c[i] < 0:
                ci = c[i]
                c = [c[j] - ci * rd.cartan[i][j] for j in range(n)]
                word.append(i)
                break
        else:
            return word


def apply_reflections(rd: RootDatum, word, pairings) -> list[int]:
    """Apply s_{w[0]} ... s_{w[-1]} (rightmost first) to a weight given by its pairings."""
    c = list(pairings)
    for i in reversed(word):
        ci = c[i]
        c = [c[j] - ci * rd.cartan[i][j] for j in range(rd.rank)]
    return c


def apply_reflections_to_root(rd: RootDatum, word, beta) -> Root:
    for i in reversed(word):
        beta = rd.reflect(beta, i)
    return beta


def parabolic_weyl_word(rrd: RelativeRootDatum) -> list[int]:
    """Reduced word for w₀·w₀,L, rejecting parabolics not stable under −w₀."""
    rd = rrd.source
    n = rd.rank
    rho = [1] * n
    w0 = weyl_reduced_word(rd, [-1] * n)
    levi = [i for i in range(n) if i + 1 not in rrd.J]
    c = list(rho)
    w0l = []
    while True:
        for i in levi:
            if c[i] > 0:
                ci = c[i]
                c = [c[j] - ci * rd.cartan[i][j] for j in range(n)]
                w0l.insert(0, i)
                break
        else:
            break
    for j in rrd.J:
        image = apply_reflections_to_root(rd, w0, rd.simple_roots[j - 1])
        neg = tuple(-x for x in image)
        if sum(neg) != 1 or (neg.index(1) + 1) not in rrd.J:
            raise RejectedInput("J is not stable under -w0; n_P does not normalize L")
    target = apply_reflections(rd, w0, apply_reflections(rd, w0l, rho))
    return weyl_reduced_word(rd, target)


@lru_cache(maxsize=None)
def _relative_cached(label: str, J: tuple, gamma: tuple) -> RelativeRootDatum:
    return relative_projection(build_root_system(label), J, gamma)


def relative_datum(label: str, J, gamma=()) -> RelativeRootDatum:
    """Cached relative_projection keyed by (type, J, Γ)."""
    J = tuple(sorted(set(int(j) for j in J)))
    gamma = tuple(tuple(int(x) for x in p) for p in gamma)
    return _relative_cached(build_root_system(label).label, J, gamma)
