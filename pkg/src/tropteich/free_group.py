"""Free groups of finite rank: reduced words, homomorphisms, Nielsen reduction
and simultaneous conjugacy of tuples.

Letters are signed generator indices: k stands for x_k and -k for its inverse.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


class FreeGroupError(ValueError):
    pass


class BadLetter(FreeGroupError):
    pass


class RankMismatch(FreeGroupError):
    pass


class NotAnAutomorphism(FreeGroupError):
    pass


class LengthMismatch(FreeGroupError):
    pass


class WordSyntaxError(FreeGroupError):
    pass


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    rank: int
    letters: tuple[int, ...] = ()

    def __mul__(self, other: "Word") -> "Word":
        if other.rank != self.rank:
            raise RankMismatch(f"rank {self.rank} vs {other.rank}")
        return Word(self.rank, _free_reduce(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(self.rank, tuple(-a for a in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        return Word(self.rank, _free_reduce(base.letters * abs(n)))

    def __len__(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def conjugate(self, w: "Word") -> "Word":
        """w * self * w^-1."""
        return w * self * w.inverse()

    def __str__(self) -> str:
        return format_word(self)


def reduce(letters: Sequence[int], rank: int) -> Word:
    for a in letters:
        if not isinstance(a, int) or a == 0 or abs(a) > rank:
            raise BadLetter(a)
    return Word(rank, _free_reduce(letters))


def identity_word(rank: int) -> Word:
    return Word(rank, ())


def generator(k: int, rank: int) -> Word:
    return reduce([k], rank)


_TOKEN = re.compile(r"x(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, rank: int) -> Word:
    """Parse ``x1*x2^-1*x1``; ``1`` is the identity."""
    text = text.strip()
    if text == "1":
        return identity_word(rank)
    if not text:
        raise WordSyntaxError("empty word literal")
    letters: list[int] = []
    for pos, tok in enumerate(text.split("*")):
        m = _TOKEN.match(tok.strip())
        if not m:
            raise WordSyntaxError(f"bad factor {tok!r} at position {pos}")
        k = int(m.group(1))
        e = int(m.group(2)) if m.group(2) is not None else 1
        if k < 1 or k > rank:
            raise BadLetter(f"x{k} outside rank {rank}")
        letters.extend([k if e > 0 else -k] * abs(e))
    return Word(rank, _free_reduce(letters))


def format_word(w: Word) -> str:
    if not w.letters:
        return "1"
    return "*".join(f"x{a}" if a > 0 else f"x{-a}^-1" for a in w.letters)


# homomorphisms


@dataclass(frozen=True)
class GroupMap:
    domain_rank: int
    codomain_rank: int
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != self.domain_rank:
            raise RankMismatch("image count differs from domain rank")
        for w in self.images:
            if w.rank != self.codomain_rank:
                raise RankMismatch("image word has the wrong rank")

    def __call__(self, w: Word) -> Word:
        return apply_map(self, w)

    def compose(self, inner: "GroupMap") -> "GroupMap":
        """self after inner."""
        if inner.codomain_rank != self.domain_rank:
            raise RankMismatch("maps are not composable")
        return GroupMap(inner.domain_rank, self.codomain_rank, tuple(self(w) for w in inner.images))

    def __str__(self) -> str:
        return "(" + ", ".join(format_word(w) for w in self.images) + ")"


def group_map(images: Sequence[Sequence[int] | Word | str], rank: int | None = None) -> GroupMap:
    """Endomorphism-style constructor from letter lists, words or literals."""
    n = len(images) if rank is None else rank
    words = []
    for im in images:
        if isinstance(im, Word):
            words.append(im)
        elif isinstance(im, str):
            words.append(parse_word(im, n))
        else:
            words.append(reduce(list(im), n))
    return GroupMap(len(words), n, tuple(words))


def identity_map(rank: int) -> GroupMap:
    return GroupMap(rank, rank, tuple(generator(k, rank) for k in range(1, rank + 1)))


def apply_map(m: GroupMap, w: Word) -> Word:
    if w.rank != m.domain_rank:
        raise RankMismatch(f"word of rank {w.rank} given to map on F_{m.domain_rank}")
    out: list[int] = []
    for a in w.letters:
        img = m.images[abs(a) - 1].letters
        if a < 0:
            img = tuple(-b for b in reversed(img))
        for b in img:
            if out and out[-1] == -b:
                out.pop()
            else:
                out.append(b)
    return Word(m.codomain_rank, tuple(out))


def conjugation(w: Word) -> GroupMap:
    """Inner automorphism x -> w x w^-1."""
    r = w.rank
    return GroupMap(r, r, tuple(generator(k, r).conjugate(w) for k in range(1, r + 1)))


# Nielsen reduction

# An elementary move is ("mul", i, j, e, side) meaning x_i -> x_i x_j^e
# (side "R") or x_j^e x_i (side "L"), or ("inv", i) meaning x_i -> x_i^-1.
# Indices are 0-based.


def _move_map(move: tuple, rank: int) -> GroupMap:
    ims = [generator(k, rank) for k in range(1, rank + 1)]
    if move[0] == "inv":
        ims[move[1]] = ims[move[1]].inverse()
    else:
        _, i, j, e, side = move
        xj = generator(j + 1, rank) ** e
        ims[i] = ims[i] * xj if side == "R" else xj * ims[i]
    return GroupMap(rank, rank, tuple(ims))


def _apply_move(u: tuple[Word, ...], move: tuple) -> tuple[Word, ...]:
    """Precompose the map with image tuple u by the elementary move."""
    v = list(u)
    if move[0] == "inv":
        v[move[1]] = v[move[1]].inverse()
    else:
        _, i, j, e, side = move
        uj = u[j] ** e
        v[i] = v[i] * uj if side == "R" else uj * v[i]
    return tuple(v)


def _mul_moves(r: int):
    for i in range(r):
        for j in range(r):
            if i != j:
                for e in (1, -1):
                    for side in ("R", "L"):
                        yield ("mul", i, j, e, side)


def _reducing_move(u: tuple[Word, ...]):
    r = len(u)
    for move in _mul_moves(r):
        i = move[1]
        if len(_apply_move(u, move)[i]) < len(u[i]):
            return move
    return None


def _is_signed_permutation(u: tuple[Word, ...]) -> bool:
    if any(len(w) != 1 for w in u):
        return False
    return sorted(abs(w.letters[0]) for w in u) == list(range(1, len(u) + 1))


def nielsen_reduce(images: Sequence[Word]) -> tuple[tuple[Word, ...], list[tuple]] | None:
    """Reduce an image tuple by elementary moves towards a signed permutation.

    Moves are chosen in a fixed order, the first length-reducing one winning.
    When no single move reduces length, the finite set of tuples reachable by
    length-preserving moves is searched for one that does. Returns the final
    tuple and the move sequence, or None when the tuple is not a basis.
    """
    u = tuple(images)
    moves: list[tuple] = []
    total = sum(len(w) for w in u)
    while True:
        if any(w.is_identity() for w in u):
            return None
        if _is_signed_permutation(u):
            return u, moves
        move = _reducing_move(u)
        if move is not None:
            u = _apply_move(u, move)
            moves.append(move)
            continue
        path = _plateau_search(u)
        if path is None:
            return None
        for move in path:
            u = _apply_move(u, move)
            moves.append(move)
        new_total = sum(len(w) for w in u)
        assert new_total < total or _is_signed_permutation(u)
        total = new_total


def _plateau_search(u: tuple[Word, ...]) -> list[tuple] | None:
    """Breadth-first search over equal-total-length tuples for a reducible one."""
    r = len(u)
    start = u
    parent: dict[tuple[Word, ...], tuple] = {start: None}
    queue = deque([start])
    moves = list(_mul_moves(r)) + [("inv", i) for i in range(r)]
    while queue:
        cur = queue.popleft()
        red = _reducing_move(cur)
        if red is not None or _is_signed_permutation(cur):
            path = []
            node = cur
            while parent[node] is not None:
                prev, mv = parent[node]
                path.append(mv)
                node = prev
            path.reverse()
            return path + ([red] if red is not None else [])
        for mv in moves:
            nxt = _apply_move(cur, mv)
            i = mv[1]
            if len(nxt[i]) == len(cur[i]) and nxt not in parent:
                parent[nxt] = (cur, mv)
                queue.append(nxt)
    return None


def is_automorphism(m: GroupMap) -> bool:
    if m.domain_rank != m.codomain_rank:
        raise RankMismatch("automorphisms need equal ranks")
    return nielsen_reduce(m.images) is not None


def invert_automorphism(m: GroupMap) -> GroupMap:
    if m.domain_rank != m.codomain_rank:
        raise RankMismatch("automorphisms need equal ranks")
    r = m.domain_rank
    result = nielsen_reduce(m.images)
    if result is None:
        raise NotAnAutomorphism(str(m))
    final, moves = result
    # m o nu_1 o ... o nu_k = p with p a signed permutation, so
    # m^-1 = nu_1 o ... o nu_k o p^-1
    p_inv = [None] * r
    for k, w in enumerate(final):
        a = w.letters[0]
        p_inv[abs(a) - 1] = generator(k + 1, r) ** (1 if a > 0 else -1)
    inv = GroupMap(r, r, tuple(p_inv))
    for move in reversed(moves):
        inv = _move_map(move, r).compose(inv)
    return inv


def nielsen_generators(rank: int) -> list[GroupMap]:
    """Transpositions, inversions and left/right transvections of F_rank."""
    if rank < 1:
        raise FreeGroupError("rank must be positive")
    gens = []
    for i in range(rank):
        for j in range(i + 1, rank):
            ims = [generator(k, rank) for k in range(1, rank + 1)]
            ims[i], ims[j] = ims[j], ims[i]
            gens.append(GroupMap(rank, rank, tuple(ims)))
    for i in range(rank):
        gens.append(_move_map(("inv", i), rank))
    for move in _mul_moves(rank):
        gens.append(_move_map(move, rank))
    return gens


# conjugacy


def cyclic_reduction(w: Word) -> tuple[Word, Word]:
    """Split w = p c p^-1 with c cyclically reduced; returns (p, c)."""
    a = w.letters
    k = 0
    while k < len(a) // 2 and a[k] == -a[len(a) - 1 - k]:
        k += 1
    return Word(w.rank, a[:k]), Word(w.rank, a[k:len(a) - k])


def root(w: Word) -> Word:
    """The maximal root of a nontrivial word: w = root^n with n maximal."""
    p, c = cyclic_reduction(w)
    n = len(c)
    for d in range(1, n + 1):
        if n % d == 0 and c.letters[:d] * (n // d) == c.letters:
            return Word(w.rank, p.letters + c.letters[:d] + p.inverse().letters)
    return w


def conjugator(u: Word, v: Word) -> Word | None:
    """Some w with u = w v w^-1, or None."""
    if u.rank != v.rank:
        raise RankMismatch("ranks differ")
    a, uc = cyclic_reduction(u)
    b, vc = cyclic_reduction(v)
    if len(uc) != len(vc):
        return None
    n = len(vc)
    if n == 0:
        return identity_word(u.rank)
    for k in range(n):
        # vc = c d with c = vc[:k]; need uc == d c
        if vc.letters[k:] + vc.letters[:k] == uc.letters:
            c = Word(u.rank, vc.letters[:k])
            return a * c.inverse() * b.inverse()
    return None


def tuples_conjugate(t1: Sequence[Word], t2: Sequence[Word]) -> Word | None:
    """Some w with t1[k] = w t2[k] w^-1 for every k, or None."""
    if len(t1) != len(t2):
        raise LengthMismatch(f"{len(t1)} vs {len(t2)}")
    if not t1:
        return None
    rank = t1[0].rank
    if any(w.rank != rank for w in list(t1) + list(t2)):
        raise RankMismatch("words of different ranks")
    for x, y in zip(t1, t2):
        if x.is_identity() != y.is_identity():
            return None
    nontrivial = [k for k, y in enumerate(t2) if not y.is_identity()]
    if not nontrivial:
        return identity_word(rank)
    k0 = nontrivial[0]
    w0 = conjugator(t1[k0], t2[k0])
    if w0 is None:
        return None
    r = root(t2[k0])
    rest = [k for k in nontrivial if not _commute(t2[k], r)]
    if not rest:
        return w0 if _is_conjugator(w0, t1, t2) else None
    s = t2[rest[0]]
    t = t1[rest[0]].conjugate(w0.inverse())
    bound = len(t) + 3 * len(s) + 4 * len(r) + 4
    for n in sorted(range(-bound, bound + 1), key=lambda n: (abs(n), n < 0)):
        w = w0 * r ** n
        if s.conjugate(r ** n) == t and _is_conjugator(w, t1, t2):
            return w
    return None


def _commute(a: Word, b: Word) -> bool:
    return a * b == b * a


def _is_conjugator(w: Word, t1: Sequence[Word], t2: Sequence[Word]) -> bool:
    return all(x == y.conjugate(w) for x, y in zip(t1, t2))


def _letter_key(a: int) -> tuple[int, int]:
    return (abs(a), 0 if a > 0 else 1)


def _tuple_key(t: Sequence[Word]) -> tuple:
    return tuple((len(w), tuple(_letter_key(a) for a in w.letters)) for w in t)


def conjugacy_normal_form(t: Sequence[Word]) -> tuple[Word, ...]:
    """Canonical representative of a tuple up to simultaneous conjugation.

    Descend to the minimum of the total length over the conjugacy orbit by
    single-letter conjugations, then collect every tuple on that minimal level
    reachable by single-letter steps and return the least under a fixed order.
    """
    t = tuple(t)
    if not t:
        return t
    rank = t[0].rank
    letters = [a for k in range(1, rank + 1) for a in (k, -k)]

    def total(x):
        return sum(len(w) for w in x)

    cur = t
    while True:
        best = None
        for a in letters:
            x = Word(rank, (a,))
            nxt = tuple(w.conjugate(x) for w in cur)
            if total(nxt) < total(cur):
                best = nxt
                break
        if best is None:
            break
        cur = best
    level = total(cur)
    seen = {cur}
    queue = deque([cur])
    while queue:
        c = queue.popleft()
        for a in letters:
            x = Word(rank, (a,))
            nxt = tuple(w.conjugate(x) for w in c)
            if total(nxt) == level and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return min(seen, key=_tuple_key)
