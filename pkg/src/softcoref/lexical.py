"""Surface-form normalization and gestalt string similarity.

The similarity is the classic Ratcliff/Obershelp measure: twice the number
of matching characters divided by the total length of both strings, where
matches are found by locating the longest common substring and recursing
on the unmatched left and right remainders. No junk or popularity
heuristics are applied, so the score is a pure function of the two
strings. Ties between equally long common substrings are broken by the
earliest start in the first argument, then the earliest start in the
second, which makes the matched-character count fully deterministic.

Matching operates on Unicode scalar values (Python string characters).
The score is not guaranteed symmetric for every input pair; callers that
need symmetry evaluate it on the lexicographically ordered pair.
"""

from __future__ import annotations

__all__ = ["normalize_form", "ro_similarity", "GestaltMatcher"]


def normalize_form(text: str) -> str:
    """Case-fold, trim, and collapse internal whitespace runs to single spaces."""
    return " ".join(text.casefold().split())


class GestaltMatcher:
    """Ratcliff/Obershelp matcher with the second string pre-indexed.

    Building the character-position index of ``b`` once makes repeated
    comparisons against many first arguments cheap, which is what the
    all-pairs linker needs.
    """

    __slots__ = ("b", "_positions")

    def __init__(self, b: str):
        self.b = b
        positions: dict[str, list[int]] = {}
        for j, ch in enumerate(b):
            positions.setdefault(ch, []).append(j)
        self._positions = positions

    def _longest_match(self, a: str, alo: int, ahi: int, blo: int, bhi: int) -> tuple[int, int, int]:
        """Longest common substring of a[alo:ahi] and b[blo:bhi].

        Returns (i, j, size); among maximal blocks the one with the
        smallest i wins, then the smallest j.
        """
        positions = self._positions
        besti, bestj, bestsize = alo, blo, 0
        lengths: dict[int, int] = {}
        for i in range(alo, ahi):
            new_lengths: dict[int, int] = {}
            for j in positions.get(a[i], ()):
                if j < blo:
                    continue
                if j >= bhi:
                    break
                k = new_lengths[j] = lengths.get(j - 1, 0) + 1
                if k > bestsize:
                    besti, bestj, bestsize = i - k + 1, j - k + 1, k
            lengths = new_lengths
        return besti, bestj, bestsize

    def matches(self, a: str) -> int:
        """Total matched characters between ``a`` and ``b``."""
        total = 0
        queue = [(0, len(a), 0, len(self.b))]
        while queue:
            alo, ahi, blo, bhi = queue.pop()
            if alo >= ahi or blo >= bhi:
                continue
            i, j, size = self._longest_match(a, alo, ahi, blo, bhi)
            if size:
                total += size
                queue.append((alo, i, blo, j))
                queue.append((i + size, ahi, j + size, bhi))
        return total

    def similarity(self, a: str) -> float:
        total_length = len(a) + len(self.b)
        if total_length == 0:
            # two empty strings are identical by convention
            return 1.0
        return 2.0 * self.matches(a) / total_length


def ro_similarity(a: str, b: str) -> float:
    """Ratcliff/Obershelp similarity of two strings, in [0, 1]."""
    return GestaltMatcher(b).similarity(a)
