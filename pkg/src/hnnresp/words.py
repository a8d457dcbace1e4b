"""Words in G* = <G, t | t^-1 a t = φ(a)> and Britton reduction.

A word is a tuple of letters: a G-letter is an element tuple, a stable letter is
the int +1 (t) or -1 (t^-1).  Normal words never hold two adjacent G-letters
nor an identity G-letter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from .groups import Element, Group, Subgroup
from .hnn import HnnPair, OracleDisagreement, core_fixpoint

Letter = Union[Element, int]

MAX_WORD_LENGTH = 64


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if len(self.letters) > MAX_WORD_LENGTH:
            raise WordError(f"word longer than {MAX_WORD_LENGTH} letters")
        for x in self.letters:
            if isinstance(x, int) and x not in (1, -1):
                raise WordError(f"stable letter exponent must be ±1, got {x}")

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def t_length(self) -> int:
        return sum(1 for x in self.letters if isinstance(x, int))

    def is_in_base(self) -> bool:
        """No stable letters: the word is an element of G (or empty)."""
        return self.t_length() == 0

    def to_json(self) -> list:
        return [("t" if x == 1 else "T") if isinstance(x, int) else list(x) for x in self.letters]


def stable(k: int) -> Word:
    """t^k as a word."""
    return Word((1,) * k if k >= 0 else (-1,) * (-k))


def make_word(G: Group, letters: Iterable[Letter]) -> Word:
    """Normalise raw letters: merge adjacent G-letters, drop identities."""
    out: list[Letter] = []
    for x in letters:
        if isinstance(x, int):
            if x not in (1, -1):
                raise WordError(f"stable letter exponent must be ±1, got {x}")
            out.append(x)
            continue
        if not G.contains(x):
            raise WordError(f"{x} is not an element of the base group")
        if out and not isinstance(out[-1], int):
            x = G.mul(out.pop(), x)
        if x != G.identity:
            out.append(x)
    return Word(tuple(out))


def parse_word(G: Group, data: Sequence) -> Word:
    """JSON letters: "t", "T" (t^-1), "t^-1", or an element as a list of ints."""
    letters: list[Letter] = []
    for item in data:
        if isinstance(item, str):
            token = item.replace(" ", "")
            if token in ("t", "t^1"):
                letters.append(1)
            elif token in ("T", "t^-1"):
                letters.append(-1)
            else:
                raise WordError(f"unknown letter {item!r}")
        elif isinstance(item, (list, tuple)):
            letters.append(G.decode(item))
        else:
            raise WordError(f"unknown letter {item!r}")
    return make_word(G, letters)


def britton_reduce(pair: HnnPair, w: Word) -> Word:
    """Remove pinches t^-1 a t → φ(a) (a ∈ A) and t b t^-1 → φ^-1(b) (b ∈ B).

    Letters are pushed left to right; a pinch is resolved as soon as it is
    completed, which is the leftmost-innermost order.
    """
    G = pair.G
    t, ti = pair.phi.table, pair.phi_inv
    A, B = pair.A, pair.B
    e = G.identity
    stack: list[Letter] = []

    def push_g(x):
        if stack and not isinstance(stack[-1], int):
            x = G.mul(stack.pop(), x)
        if x != e:
            stack.append(x)

    for x in w.letters:
        if not isinstance(x, int):
            push_g(x)
            continue
        # candidate pinch: stack ends with (-x) [g] and we push x
        if stack and isinstance(stack[-1], int):
            if stack[-1] == -x:
                stack.pop()
                if stack and not isinstance(stack[-1], int):
                    g = stack.pop()
                    push_g(g)
                continue
            stack.append(x)
            continue
        if len(stack) >= 2 and isinstance(stack[-2], int) and stack[-2] == -x:
            g = stack[-1]
            if x == 1 and g in A:  # t^-1 g t
                stack.pop(); stack.pop()
                push_g(t[g])
                continue
            if x == -1 and g in B:  # t g t^-1
                stack.pop(); stack.pop()
                push_g(ti[g])
                continue
        stack.append(x)
    return Word(tuple(stack))


def base_element(w: Word, G: Group) -> Element | None:
    """The element of G a reduced word equals, or None if it has stable letters."""
    if not w.is_in_base():
        return None
    return w.letters[0] if w.letters else G.identity


def core_britton_oracle(pair: HnnPair, bound: int, check: bool = True) -> Subgroup:
    """{g ∈ A∩B : t^i g t^-i reduces into G for all |i| <= bound}.

    Independent of the core iteration; when ``check`` is set the result is
    compared with ``core_fixpoint`` and a mismatch raises OracleDisagreement.
    """
    fixed = core_fixpoint(pair)
    if bound < fixed.r + 1:
        raise ValueError(f"bound {bound} is below r + 1 = {fixed.r + 1}")
    G = pair.G
    result = []
    for g in sorted(pair.intersection()):
        ok = True
        for i in range(1, bound + 1):
            for k in (i, -i):
                w = britton_reduce(pair, stable(k) + Word((g,) if g != G.identity else ()) + stable(-k))
                if not w.is_in_base():
                    ok = False
                    break
            if not ok:
                break
        if ok:
            result.append(g)
    H = Subgroup(G, tuple(result))
    if check and H.set != fixed.H.set:
        raise OracleDisagreement(f"Britton core has {len(H)} elements, fixpoint core has {len(fixed.H)}")
    return H


def evaluate_hom(pair: HnnPair, Y: Group, y: Element, w: Word,
                 alpha: Callable[[Element], Element]) -> Element:
    """Image of w under G* → Y, g ↦ α(g), t ↦ y."""
    yi = Y.inv(y)
    out = Y.identity
    for x in w.letters:
        if isinstance(x, int):
            out = Y.mul(out, y if x == 1 else yi)
        else:
            out = Y.mul(out, alpha(x))
    return out
