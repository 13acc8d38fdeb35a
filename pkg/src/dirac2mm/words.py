"""Noncommutative words in the alphabet {A, B} and their cyclic canonical forms.

A mixed moment is indexed by a word only up to cyclic rotation (trace
invariance), whole-word reversal (moments of Hermitian matrices are real) and
the global A<->B swap (the potential is symmetric in the two matrices).
``CanonicalMoment`` is the quotient object: the lexicographically least
letter string over the full orbit, stored as its alternating run lengths
(l1, l2, ..., lq), i.e. the index of m_{l1,...,lq}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

A = "A"
B = "B"
_SWAP = str.maketrans("AB", "BA")


@dataclass(frozen=True)
class Word:
    """A finite word over {A, B}; possibly empty."""

    letters: str

    def __init__(self, letters=""):
        if isinstance(letters, Word):
            letters = letters.letters
        s = str(letters).upper()
        if any(c not in "AB" for c in s):
            raise ValueError(f"word must use letters A/B only, got {letters!r}")
        object.__setattr__(self, "letters", s)

    @property
    def degree(self) -> int:
        return len(self.letters)

    @property
    def a_degree(self) -> int:
        return self.letters.count(A)

    @property
    def b_degree(self) -> int:
        return self.letters.count(B)

    def rotate(self, k: int = 1) -> "Word":
        if not self.letters:
            return self
        k %= len(self.letters)
        return Word(self.letters[k:] + self.letters[:k])

    def reverse(self) -> "Word":
        return Word(self.letters[::-1])

    def swap(self) -> "Word":
        return Word(self.letters.translate(_SWAP))

    def __add__(self, other) -> "Word":
        return Word(self.letters + Word(other).letters)

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return self.letters or "1"

    def __repr__(self):
        return f"Word({self.letters!r})"


def orbit(letters: str) -> set[str]:
    """Full rotation x reversal x swap orbit of a letter string."""
    out = set()
    for base in (letters, letters[::-1]):
        for var in (base, base.translate(_SWAP)):
            for k in range(max(1, len(var))):
                out.add(var[k:] + var[:k])
    return out


def _runs_of(rep: str) -> tuple[int, ...]:
    """Alternating run lengths of the canonical representative string.

    The representative of a mixed word starts with its maximal A-run and ends
    with a B (minimality of the lexicographic rotation), so plain linear
    run-length encoding is cyclically faithful.
    """
    if not rep:
        return ()
    runs = []
    current, count = rep[0], 1
    for c in rep[1:]:
        if c == current:
            count += 1
        else:
            runs.append(count)
            current, count = c, 1
    runs.append(count)
    return tuple(runs)


@lru_cache(maxsize=None)
def _canonical_from_string(letters: str) -> "CanonicalMoment":
    if not letters:
        return CanonicalMoment(())
    rep = min(orbit(letters))
    return CanonicalMoment(_runs_of(rep))


@dataclass(frozen=True)
class CanonicalMoment:
    """Equivalence class of a cyclic word; the index of a moment m_{l1,...,lq}.

    runs == () encodes the empty word (moment value 1); a single run encodes
    a pure power tr A^l.  For q >= 2 the runs alternate A, B, A, B, ... in the
    canonical representative, so q is even.
    """

    runs: tuple

    def __init__(self, runs=()):
        runs = tuple(int(r) for r in runs)
        if any(r <= 0 for r in runs):
            raise ValueError(f"run lengths must be positive, got {runs}")
        if len(runs) > 1 and len(runs) % 2 != 0:
            raise ValueError(f"alternating cyclic runs need even q, got {runs}")
        object.__setattr__(self, "runs", runs)

    @property
    def degree(self) -> int:
        return sum(self.runs)

    @property
    def q(self) -> int:
        return len(self.runs)

    @property
    def a_degree(self) -> int:
        return sum(self.runs[0::2])

    @property
    def b_degree(self) -> int:
        return sum(self.runs[1::2])

    def rep_word(self) -> Word:
        """The canonical representative word of this class."""
        out = []
        for i, r in enumerate(self.runs):
            out.append((A if i % 2 == 0 else B) * r)
        return Word("".join(out))

    def is_empty(self) -> bool:
        return not self.runs

    def label(self) -> str:
        if not self.runs:
            return "m_0"
        return "m_{" + ",".join(str(r) for r in self.runs) + "}"

    def as_json(self) -> list:
        return list(self.runs)

    def __repr__(self):
        return self.label()


def canonicalize(w: Word | str) -> CanonicalMoment:
    """Orbit-minimal moment index of a word; deterministic."""
    return _canonical_from_string(Word(w).letters)


def splits_at(w: Word | str, letter: str) -> list[tuple[Word, Word]]:
    """(prefix, suffix) pairs around each occurrence of ``letter`` in w.

    These are the factorized trace pairs on the left side of the loop
    equation of w: one pair per occurrence, in positional order.
    """
    w = Word(w)
    if letter not in (A, B):
        raise ValueError(f"letter must be A or B, got {letter!r}")
    out = []
    for p, c in enumerate(w.letters):
        if c == letter:
            out.append((Word(w.letters[:p]), Word(w.letters[p + 1 :])))
    return out


def vanishes_by_parity(c: CanonicalMoment) -> bool:
    """True iff the moment is odd in A or in B and hence identically zero.

    The quartic potential is invariant under A -> -A and under B -> -B
    separately, so any word with an odd letter count has vanishing moment.
    """
    return c.a_degree % 2 != 0 or c.b_degree % 2 != 0


def iter_canonical_moments(degree: int, even_only: bool = True):
    """All canonical moment classes of the exact given degree, sorted.

    With even_only, only classes with even A- and B-degree (the ones not
    killed by parity) are produced.
    """
    seen = set()
    for mask in range(1 << degree):
        letters = "".join(A if (mask >> i) & 1 == 0 else B for i in range(degree))
        c = _canonical_from_string(letters)
        if even_only and vanishes_by_parity(c):
            continue
        seen.add(c)
    return sorted(seen, key=lambda c: c.runs)


def parse_moment_label(text: str) -> CanonicalMoment:
    """Parse 'm_{3,1,1,1}', '3,1,1,1' or a plain word like 'AABB'."""
    t = text.strip()
    if t.startswith("m_"):
        t = t[2:].strip("{}")
    if "," in t or t.isdigit():
        runs = tuple(int(x) for x in t.split(",") if x)
        word = "".join((A if i % 2 == 0 else B) * r for i, r in enumerate(runs))
        return canonicalize(Word(word))
    return canonicalize(Word(t))
