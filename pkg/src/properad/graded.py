"""Exact graded linear algebra: Koszul signs, dg vector spaces, tensor words.

All coefficients are `fractions.Fraction`; floating point is never used.
Degrees are plain integers.  A "word" is a tuple of basis-element names and
linear combinations of words are dicts ``word -> Fraction`` with zero values
pruned.
"""

from fractions import Fraction
from itertools import permutations

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# permutations (0-based tuples: perm[i] is the image of position i)
# ---------------------------------------------------------------------------

def identity_perm(n):
    return tuple(range(n))


def compose_perm(sigma, tau):
    """sigma after tau: (sigma*tau)[i] = sigma[tau[i]]."""
    return tuple(sigma[tau[i]] for i in range(len(tau)))


def invert_perm(perm):
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return tuple(inv)


def koszul_sign(perm, degrees):
    """Sign accrued when the factor at position i moves to position perm[i].

    One factor (-1) for every inversion (i < j, perm[i] > perm[j]) whose two
    factors both have odd degree.  Multiplicative: for sigma, tau,
    koszul_sign(sigma*tau, deg) = koszul_sign(sigma, tau.deg) * koszul_sign(tau, deg).
    """
    n = len(perm)
    if len(degrees) != n:
        raise ValueError("permutation and degree list have different lengths")
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of range(%d): %r" % (n, perm))
    sign = 1
    for i in range(n):
        if degrees[i] % 2 == 0:
            continue
        for j in range(i + 1, n):
            if degrees[j] % 2 and perm[i] > perm[j]:
                sign = -sign
    return sign


def permute_word(perm, word):
    """Move the factor at position i to position perm[i]."""
    out = [None] * len(word)
    for i, x in enumerate(word):
        out[perm[i]] = x
    return tuple(out)


def sort_perm_by_key(word, key):
    """Stable-sorting permutation: perm with permute_word(perm, word) sorted."""
    order = sorted(range(len(word)), key=lambda i: (key(word[i]), i))
    perm = [0] * len(word)
    for target, src in enumerate(order):
        perm[src] = target
    return tuple(perm)


def all_permutations(n):
    return list(permutations(range(n)))


# ---------------------------------------------------------------------------
# linear combinations of hashable keys
# ---------------------------------------------------------------------------

def add_to(acc, key, coeff):
    """acc[key] += coeff, pruning zeros.  Mutates and returns acc."""
    if not coeff:
        return acc
    new = acc.get(key, ZERO) + coeff
    if new:
        acc[key] = new
    else:
        acc.pop(key, None)
    return acc


def combine(*combos):
    out = {}
    for combo in combos:
        for key, coeff in combo.items():
            add_to(out, key, coeff)
    return out


def scale(combo, factor):
    if not factor:
        return {}
    return {k: c * factor for k, c in combo.items()}


# ---------------------------------------------------------------------------
# graded bases and dg vector spaces
# ---------------------------------------------------------------------------

class GradedBasis:
    """Ordered homogeneous basis.  The order is fixed at construction and
    defines every sign convention downstream; it is never mutated."""

    __slots__ = ("names", "degrees", "_index")

    def __init__(self, elements):
        names = tuple(name for name, _ in elements)
        if len(set(names)) != len(names):
            raise ValueError("duplicate basis names")
        self.names = names
        self.degrees = {name: int(deg) for name, deg in elements}
        self._index = {name: i for i, name in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def degree(self, name):
        return self.degrees[name]

    def index(self, name):
        return self._index[name]

    def word_degree(self, word):
        return sum(self.degrees[x] for x in word)

    def sort_key(self, name):
        return self._index[name]


class DGVectorSpace:
    """Finite-dimensional dg vector space (V, d) with d of degree +1.

    The differential is a sparse matrix {(target, source): Fraction} meaning
    d(e_source) = sum coeff * e_target.  d**2 = 0 is enforced exactly.
    """

    __slots__ = ("basis", "differential")

    def __init__(self, basis, differential=None):
        self.basis = basis
        diff = {}
        for (tgt, src), coeff in (differential or {}).items():
            coeff = Fraction(coeff)
            if not coeff:
                continue
            if tgt not in basis or src not in basis:
                raise ValueError("differential entry outside basis: %r" % ((tgt, src),))
            if basis.degree(tgt) != basis.degree(src) + 1:
                raise ValueError(
                    "differential must raise degree by 1: d(%s) -> %s" % (src, tgt))
            diff[(tgt, src)] = coeff
        self.differential = diff
        self._check_square_zero()

    def _check_square_zero(self):
        sq = {}
        for (mid, src), c1 in self.differential.items():
            for (tgt, mid2), c2 in self.differential.items():
                if mid == mid2:
                    add_to(sq, (tgt, src), c2 * c1)
        if sq:
            raise ValueError("differential does not square to zero: %r" % (sq,))

    @property
    def dim(self):
        return len(self.basis)

    def d(self, name):
        """d applied to one basis element, as {name: coeff}."""
        out = {}
        for (tgt, src), coeff in self.differential.items():
            if src == name:
                out[tgt] = coeff
        return out

    def degree(self, name):
        return self.basis.degree(name)


def dual_basis_name(name):
    return name + "^"


def dualize_differential(space):
    """Dual dg vector space with (d alpha)(v) = (-1)^{|alpha|} alpha(dv).

    Dual basis element name^ has degree -|name|.  The returned differential
    again raises degree by one and squares to zero.
    """
    elements = [(dual_basis_name(n), -space.degree(n)) for n in space.basis.names]
    dual = GradedBasis(elements)
    diff = {}
    for (tgt, src), coeff in space.differential.items():
        # d#(phi^tgt) picks up coeff on phi^src, with the sign of |phi^tgt|.
        sign = -1 if space.degree(tgt) % 2 else 1
        add_to(diff, (dual_basis_name(src), dual_basis_name(tgt)), sign * coeff)
    return DGVectorSpace(dual, diff)


def derivation_on_word(space, word):
    """Extend d to a tensor word as a degree-1 derivation.

    d(x_1 ... x_m) = sum_i (-1)^{|x_1|+...+|x_{i-1}|} x_1 ... d(x_i) ... x_m,
    returned as {word: Fraction}.
    """
    out = {}
    prefix = 0
    for i, name in enumerate(word):
        sign = -1 if prefix % 2 else 1
        for tgt, coeff in space.d(name).items():
            new = word[:i] + (tgt,) + word[i + 1:]
            add_to(out, new, sign * coeff)
        prefix += space.degree(name)
    return out


def derivation_matrix(space, m):
    """Sparse matrix of the derivation extension of d on V^{tensor m}."""
    mat = {}
    for word in iter_words(space.basis.names, m):
        for tgt, coeff in derivation_on_word(space, word).items():
            mat[(tgt, word)] = coeff
    return mat


def iter_words(names, length):
    if length == 0:
        yield ()
        return
    for rest in iter_words(names, length - 1):
        for name in names:
            yield (name,) + rest


def reorder_sign(word, degrees_of, perm):
    """Koszul sign of permute_word(perm, word) given a degree lookup."""
    return koszul_sign(perm, [degrees_of(x) for x in word])


def unordered_word_iso(word, source_labels, target_labels, degrees_of):
    """Reorder the factors of `word` (one per label in source order) into
    target label order, with the Koszul sign.

    `source_labels` and `target_labels` list the same label set in two orders;
    factor i sits at label source_labels[i] and moves to that label's position
    in `target_labels`.  Returns (new_word, sign).
    """
    if sorted(source_labels) != sorted(target_labels):
        raise ValueError("label orders are not over the same set")
    pos = {lab: j for j, lab in enumerate(target_labels)}
    perm = tuple(pos[lab] for lab in source_labels)
    sign = reorder_sign(word, degrees_of, perm)
    return permute_word(perm, word), sign
