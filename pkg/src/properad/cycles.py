"""Cyclic words, shuffles and unshuffles.

A cycle is a cyclic word of distinct labels stored in canonical rotation
(lexicographically least label first).  The empty cycle is allowed and is a
cycle in any label set.
"""

from itertools import combinations


class Cycle:
    """Immutable cyclic word of distinct labels."""

    __slots__ = ("word",)

    def __init__(self, word):
        word = tuple(word)
        if len(set(word)) != len(word):
            raise ValueError("cycle labels must be distinct: %r" % (word,))
        self.word = _least_rotation(word)

    def __len__(self):
        return len(self.word)

    def __iter__(self):
        return iter(self.word)

    def __eq__(self, other):
        return isinstance(other, Cycle) and self.word == other.word

    def __hash__(self):
        return hash(("Cycle", self.word))

    def __lt__(self, other):
        return (len(self.word), self.word) < (len(other.word), other.word)

    def __repr__(self):
        return "Cycle(%s)" % (",".join(map(str, self.word)),)

    def labels(self):
        return frozenset(self.word)

    def successor(self, label):
        i = self.word.index(label)
        return self.word[(i + 1) % len(self.word)]

    def rotated_to(self, label):
        """The underlying word starting at `label`."""
        i = self.word.index(label)
        return self.word[i:] + self.word[:i]


def _least_rotation(word):
    if not word:
        return word
    best = min(range(len(word)), key=lambda i: word[i:] + word[:i])
    return word[best:] + word[:best]


def canonical_cycle(word):
    return Cycle(word)


def map_cycle(bijection, cycle):
    """Apply a label bijection to every entry of a cycle, re-canonicalized."""
    try:
        return Cycle(bijection[x] for x in cycle.word)
    except KeyError as exc:
        raise ValueError("label outside bijection domain: %r" % (exc.args[0],))


def rotations(word):
    word = tuple(word)
    return [word[i:] + word[:i] for i in range(max(len(word), 1))]


# ---------------------------------------------------------------------------
# bijections as plain dicts
# ---------------------------------------------------------------------------

def check_bijection(mapping, domain=None, codomain=None):
    """Validate that a dict is injective (and matches domain/codomain if given)."""
    values = list(mapping.values())
    if len(set(values)) != len(values):
        raise ValueError("mapping is not injective")
    if domain is not None and set(mapping) != set(domain):
        raise ValueError("domain mismatch")
    if codomain is not None and set(values) != set(codomain):
        raise ValueError("codomain mismatch")
    return mapping


def compose_bijection(outer, inner):
    return {x: outer[y] for x, y in inner.items()}


def invert_bijection(mapping):
    return {v: k for k, v in mapping.items()}


# ---------------------------------------------------------------------------
# shuffles and unshuffles (permutations as 0-based tuples, see graded.py)
# ---------------------------------------------------------------------------

def enumerate_shuffles(p, q):
    """All (p, q)-shuffles of range(p + q).

    A shuffle is increasing on the first p and on the last q positions;
    there are binomial(p + q, p) of them.
    """
    if p < 0 or q < 0:
        raise ValueError("shuffle type must be nonnegative")
    n = p + q
    out = []
    for first_block in combinations(range(n), p):
        rest = [i for i in range(n) if i not in first_block]
        out.append(tuple(first_block) + tuple(rest))
    return out


def is_shuffle(perm, p, q):
    if len(perm) != p + q:
        return False
    return all(perm[i] < perm[i + 1] for i in range(p - 1)) and \
        all(perm[i] < perm[i + 1] for i in range(p, p + q - 1))


def is_unshuffle(perm, p, q):
    """rho is a (p, q)-unshuffle iff its inverse is a (p, q)-shuffle."""
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return is_shuffle(tuple(inv), p, q)


def increasing_unshuffle(subset, ambient, offset):
    """The unique increasing bijection (range(ambient) - subset) -> offset + [k].

    Positions are 0-based; the image of the i-th smallest remaining element is
    offset + i.  Mirrors the rho_N maps used to skeletalize compositions.
    """
    subset = set(subset)
    if not subset <= set(range(ambient)):
        raise ValueError("subset not contained in its ambient interval")
    rest = [i for i in range(ambient) if i not in subset]
    return {x: offset + i for i, x in enumerate(rest)}
