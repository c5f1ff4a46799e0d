"""Arrow words: finite words over the two-letter arrow alphabet.

A word is a sequence of direct (``>``) and inverse (``<``) arrows,
optionally carrying vertex labels.  A labeled word with n arrows has
n+1 positive integer labels (labels may repeat); the empty word is
written ``%`` and, when labeled, carries exactly one label.

Text grammar::

    WORD    := "%" | SYMS | LABELED
    SYMS    := (">"|"<")+
    LABELED := INT ((">"|"<") INT)+
    INT     := [1-9][0-9]*

A bare INT is additionally accepted as the labeled empty word so that
every labeled word round-trips through its rendering.
"""

from __future__ import annotations

from dataclasses import dataclass

DIRECT = ">"
INVERSE = "<"
ARROWS = (DIRECT, INVERSE)

_FLIP = {DIRECT: INVERSE, INVERSE: DIRECT}


def flip(arrow: str) -> str:
    """Complement of a single arrow letter."""
    return _FLIP[arrow]


class WordSyntaxError(ValueError):
    """Malformed word text; carries the offending character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class ArrowWord:
    """An arrow word, possibly with vertex labels.

    ``letters`` is the arrow sequence; ``labels``, when present, lists the
    n+1 vertex labels v1 a1 v2 ... vn an v(n+1).
    """

    letters: tuple[str, ...]
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        for a in self.letters:
            if a not in ARROWS:
                raise ValueError(f"invalid arrow letter {a!r}")
        if self.labels is not None:
            if len(self.labels) != len(self.letters) + 1:
                raise ValueError(
                    f"label count {len(self.labels)} != letter count + 1 "
                    f"({len(self.letters) + 1})"
                )
            if any(v < 1 for v in self.labels):
                raise ValueError("labels must be positive integers")

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    @property
    def positions(self) -> int:
        """Number of vertex positions (letter count + 1)."""
        return len(self.letters) + 1

    def label(self, p: int) -> int:
        """Label at position p (1-based); defaults to p when unlabeled."""
        if not 1 <= p <= self.positions:
            raise IndexError(f"position {p} out of range 1..{self.positions}")
        return self.labels[p - 1] if self.labels is not None else p

    def letter(self, i: int) -> str:
        """Letter between positions i and i+1 (1-based)."""
        if not 1 <= i <= len(self.letters):
            raise IndexError(f"letter index {i} out of range")
        return self.letters[i - 1]

    def with_default_labels(self) -> "ArrowWord":
        """The same word, labeled 1..n+1 if it carries no labels."""
        if self.is_labeled:
            return self
        return ArrowWord(self.letters, tuple(range(1, self.positions + 1)))

    def slice(self, lo: int, hi: int) -> "ArrowWord":
        """Subword on positions lo..hi (1-based, inclusive)."""
        if not 1 <= lo <= hi <= self.positions:
            raise IndexError(f"position window [{lo},{hi}] out of range")
        letters = self.letters[lo - 1 : hi - 1]
        labels = self.labels[lo - 1 : hi] if self.labels is not None else None
        return ArrowWord(letters, labels)

    def render(self) -> str:
        if self.labels is not None:
            out = [str(self.labels[0])]
            for a, v in zip(self.letters, self.labels[1:]):
                out.append(a)
                out.append(str(v))
            return "".join(out)
        if not self.letters:
            return "%"
        return "".join(self.letters)

    def inverse(self) -> "ArrowWord":
        letters = tuple(flip(a) for a in reversed(self.letters))
        labels = tuple(reversed(self.labels)) if self.labels is not None else None
        return ArrowWord(letters, labels)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class RunDecomposition:
    """Maximal alternating runs of a nonempty word: (direction, length) pairs."""

    runs: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.runs:
            raise ValueError("run decomposition must be nonempty")
        for (a, n) in self.runs:
            if a not in ARROWS or n < 1:
                raise ValueError(f"bad run ({a!r}, {n})")
        for (a, _), (b, _) in zip(self.runs, self.runs[1:]):
            if a == b:
                raise ValueError("consecutive runs must alternate direction")

    def letters(self) -> tuple[str, ...]:
        out: list[str] = []
        for a, n in self.runs:
            out.extend([a] * n)
        return tuple(out)


def parse_word(text: str) -> ArrowWord:
    """Parse word text per the grammar; raises WordSyntaxError on bad input."""
    if text == "":
        raise WordSyntaxError("empty input", 0)
    if text == "%":
        return ArrowWord(())
    if all(c in ARROWS for c in text):
        return ArrowWord(tuple(text))
    # labeled form: INT ((>|<) INT)*
    labels: list[int] = []
    letters: list[str] = []
    i = 0
    n = len(text)
    while True:
        j = i
        while j < n and text[j].isdigit():
            j += 1
        if j == i:
            raise WordSyntaxError("expected a label", i)
        if text[i] == "0":
            raise WordSyntaxError("labels may not start with 0", i)
        labels.append(int(text[i:j]))
        i = j
        if i == n:
            break
        if text[i] not in ARROWS:
            raise WordSyntaxError(f"expected '>' or '<', got {text[i]!r}", i)
        letters.append(text[i])
        i += 1
        if i == n:
            raise WordSyntaxError("dangling arrow at end of word", i)
    return ArrowWord(tuple(letters), tuple(labels))


def render_word(w: ArrowWord) -> str:
    return w.render()


def inverse(w: ArrowWord) -> ArrowWord:
    return w.inverse()


def decompose_runs(w: ArrowWord) -> RunDecomposition:
    """Maximal runs of equal letters, in order; rejects the empty word."""
    if not w.letters:
        raise ValueError("the empty word has no run decomposition")
    runs: list[tuple[str, int]] = []
    cur = w.letters[0]
    count = 0
    for a in w.letters:
        if a == cur:
            count += 1
        else:
            runs.append((cur, count))
            cur, count = a, 1
    runs.append((cur, count))
    return RunDecomposition(tuple(runs))


def concat(left: ArrowWord, letter: str, right: ArrowWord) -> ArrowWord:
    """Join two words with a connector letter between their end positions."""
    if letter not in ARROWS:
        raise ValueError(f"invalid connector {letter!r}")
    if left.is_labeled != right.is_labeled:
        raise ValueError("cannot concatenate labeled with unlabeled word")
    letters = left.letters + (letter,) + right.letters
    labels = left.labels + right.labels if left.is_labeled else None
    return ArrowWord(letters, labels)
