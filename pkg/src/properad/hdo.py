"""Homological-differential-operator realization of generating operators.

A closed-flavor operator acts on the symmetric algebra S(V): each input
letter becomes a graded left derivative (realized by positional derivatives,
summed over all ways to hit the monomial) and each output word multiplies
from the left.  The open flavor acts the same way on products of cyclic
words, with the boundary blocks recombining through the cycle gluing.
The code path shares nothing with the tensor-contraction engine behind
tilde_compose, which is what makes the square check an independent oracle.
"""

from fractions import Fraction
from itertools import combinations, permutations

from .cycles import Cycle
from .frobenius import OpenSurface, open_glue, UnstableComposition
from .graded import add_to
from .master import (closed_gen, open_gen, gen_arities, gen_chi, add_term,
                     component_decidable, component_key, differential_map,
                     orbit_normal_form)


def consume_positions(space, word, assignments):
    """Apply a sequence of positional deletions (original position, letter),
    rightmost assignment first; returns (surviving word, sign) or None.

    Mirrors a composite of positional derivatives: each deletion contributes
    (-1)^{|letter| * (degree before the position at deletion time)}.
    """
    remaining = list(word)
    alive = list(range(len(word)))
    sign = 1
    for pos, letter in reversed(assignments):
        idx = alive.index(pos)
        if remaining[idx] != letter:
            return None
        prefix = sum(space.degree(x) for x in remaining[:idx])
        if (space.degree(letter) % 2) and (prefix % 2):
            sign = -sign
        del remaining[idx]
        del alive[idx]
    return tuple(remaining), sign


def _operator_terms(space, L, flavor):
    """The (d + L) terms: L's canonical terms plus the differential as the
    cylinder with one input and one output (chi = 0 for the closed flavor,
    the once-marked annulus block shape for the open one)."""
    terms = list(L.items())
    d = differential_map(space)
    for (J, I), coeff in d.coords.items():
        if flavor == "closed":
            gen = closed_gen(1, 1, 0)
        else:
            gen = open_gen(0, (1,), (1,))
        terms.append(((gen, J, I), coeff))
    return terms


def apply_closed_term(space, term, coeff, mono):
    """One operator term applied to a monomial (sorted word, chi)."""
    (gen, J, I) = term
    word, chi = mono
    n = len(I)
    out = {}
    if n > len(word):
        return out
    for M in combinations(range(len(word)), n):
        for target in permutations(M):
            res = consume_positions(space, word,
                                    list(zip(target, I)))
            if res is None:
                continue
            survivors, sign = res
            new_chi = chi + gen_chi(gen)
            canon = orbit_normal_form(
                space, (closed_gen(len(J) + len(survivors), 0, 1),
                        J + survivors, ()), Fraction(1))
            if canon is None:
                continue
            (c_gen, c_word, _), fold = canon
            add_to(out, (c_word, new_chi), coeff * sign * fold)
    return out


def square_closed(space, L, trunc, max_len=None):
    """(d + L)^2 on all monomials within the truncation, with chi tracked;
    verdict buckets mirror the master components."""
    terms = _operator_terms(space, L, "closed")
    max_len = trunc.n_max if max_len is None else max_len
    buckets = {}
    from .graded import iter_words
    for length in range(max_len + 1):
        for word in iter_words(space.basis.names, length):
            mono = _canonical_monomial(space, word)
            if mono is None:
                continue
            word0, base_sign = mono
            if word0 != word:
                continue  # enumerate each sorted monomial once
            acc = {}
            for term, coeff in terms:
                for key, c in apply_closed_term(space, term, coeff,
                                                (word0, 0)).items():
                    add_to(acc, key, c)
            final = {}
            for (mid, chi1), c in acc.items():
                for term, coeff in terms:
                    for key, c2 in apply_closed_term(space, term, coeff,
                                                     (mid, chi1)).items():
                        add_to(final, key, c * c2)
            for (out_word, chi), c in final.items():
                buckets.setdefault((word0, out_word, chi), Fraction(0))
                buckets[(word0, out_word, chi)] += c
    return buckets


def _canonical_monomial(space, word):
    res = orbit_normal_form(
        space, (closed_gen(len(word), 0, 1), tuple(word), ()), Fraction(1))
    if res is None:
        return None
    (_, w, _), sign = res
    return w, sign


def bucket_decidable(flavor, n_in, n_out, chi, trunc):
    """A bucket is decided when every master component that can pad into it
    is decidable: components (m, n, chi) with n <= n_in, m = n_out - (n_in - n)."""
    for n in range(n_in + 1):
        m = n_out - (n_in - n)
        if m < 0:
            continue
        if not component_decidable(flavor, m, n, chi, trunc):
            return False
    return True


def operator_square_check(space, flavor, L, trunc):
    """PASS iff (d + L)^2 kills every decidable monomial bucket."""
    if flavor == "closed":
        buckets = square_closed(space, L, trunc)
    elif flavor == "open":
        buckets = square_open(space, L, trunc)
    else:
        raise ValueError("unsupported flavor %r" % (flavor,))
    components = {}
    for (w_in, w_out, chi), coeff in sorted(buckets.items(), key=str):
        key = (w_in, w_out, chi)
        if flavor == "closed":
            n_in, n_out = len(w_in), len(w_out)
        else:
            n_in, n_out = len(w_in[1]), len(w_out[1])
        if not bucket_decidable(flavor, n_in, n_out, chi, trunc):
            components[key] = {"status": "SKIPPED"}
        elif coeff:
            components[key] = {"status": "FAIL", "residual": coeff}
        else:
            components[key] = {"status": "PASS"}
    ok = all(v["status"] != "FAIL" for v in components.values())
    return {"ok": ok, "components": components}


# ---------------------------------------------------------------------------
# open flavor: operators on products of cyclic words
# ---------------------------------------------------------------------------
#
# A monomial is a formal product of connected pieces, each a genus label with
# boundary blocks of output letters: ("opm", ((g, lens), ...)) with the word
# concatenated piecewise.  Terms with no inputs multiply by a new piece;
# terms with inputs consume letters positionally and the touched pieces are
# glued into one, a piece at a time (associativity makes the order
# irrelevant).

def _piece_offsets(pieces):
    offs = []
    off = 0
    for g, lens in pieces:
        offs.append(off)
        off += sum(lens)
    return offs, off


def canonical_open_product(space, pieces, word, coeff):
    """Canonical form of a product monomial: each piece's blocks in
    canonical form, pieces sorted, signs folded; None if the class dies."""
    from .master import _canonical_blocks
    from .graded import koszul_sign, permute_word
    offs, total = _piece_offsets(pieces)
    done = []
    for (g, lens), off in zip(pieces, offs):
        size = sum(lens)
        res = _canonical_blocks(space, lens, word[off:off + size])
        if res is None:
            return None
        lens2, word2, sign = res
        coeff *= sign
        key = (g, lens2, tuple(space.basis.index(x) for x in word2))
        done.append((key, (g, lens2), word2, off, size))
    order = sorted(range(len(done)), key=lambda i: (done[i][0], i))
    # identical odd pieces kill the class
    for a, b in zip(order, order[1:]):
        if done[a][0] == done[b][0]:
            if space.basis.word_degree(done[a][2]) % 2:
                return None
    perm = [0] * total
    new_word = []
    new_pieces = []
    pos = 0
    for i in order:
        _, piece, word2, off, size = done[i]
        # the within-piece permutation was already applied in word2; now the
        # piece block moves wholesale
        for j in range(size):
            perm[off + j] = pos + j
        new_word.extend(word2)
        new_pieces.append(piece)
        pos += size
    # sign: move the original piece slices into the new order; the
    # within-piece reordering sign is already in coeff, so apply the
    # block-move sign on the piecewise-canonical word
    mid = [None] * total
    for (key, piece, word2, off, size) in done:
        for j in range(size):
            mid[off + j] = word2[j]
    sign = koszul_sign(tuple(perm), [space.degree(x) for x in mid])
    return ("opm", tuple(new_pieces)), tuple(new_word), coeff * sign


def _mono_surfaces(mono_gen):
    """Label cycles for each piece of a product monomial."""
    _, pieces = mono_gen
    surfaces = []
    off = 0
    for idx, (g, lens) in enumerate(pieces):
        cycles = []
        pos = off
        for ln in lens:
            cycles.append(Cycle(("m", pos + j) for j in range(ln)))
            pos += ln
        surfaces.append(OpenSurface(g, cycles, []))
        off += sum(lens)
    return surfaces


def apply_open_term(space, term, coeff, mono):
    """One open operator term applied to (product monomial, chi marker)."""
    gen, J, I = term
    (mono_gen, word), chi = mono
    n = len(I)
    out = {}
    if n == 0:
        pieces = ((gen[1], gen[2]),) + mono_gen[1]
        res = canonical_open_product(space, pieces, J + word, coeff)
        if res is not None:
            pgen, pword, c = res
            add_to(out, ((pgen, pword), chi + gen_chi(gen)), c)
        return out
    if n > len(word):
        return out
    for M in combinations(range(len(word)), n):
        for target in permutations(M):
            res = consume_positions(space, word, list(zip(target, I)))
            if res is None:
                continue
            _, sign = res
            glued = _glue_into_pieces(gen, mono_gen, dict(zip(range(n), target)))
            if glued is None:
                continue
            new_pieces, out_pos = glued
            alive = [p for p in range(len(word)) if p not in set(M)]
            base = J + tuple(word[p] for p in alive)
            rank = {p: len(J) + r for r, p in enumerate(alive)}
            collected = []
            for lab in out_pos:
                if lab[0] == "t":
                    collected.append(lab[1])
                else:
                    collected.append(rank[lab[1]])
            new_word = tuple(base[i] for i in collected)
            reorder = _reorder_sign(space, base, collected)
            res2 = canonical_open_product(space, new_pieces[0], new_word, Fraction(1))
            if res2 is None:
                continue
            pgen, pword, fold = res2
            add_to(out, ((pgen, pword), chi + gen_chi(gen)),
                   coeff * sign * reorder * fold)
    return out


def _reorder_sign(space, base_word, collected):
    from .graded import koszul_sign
    perm = [0] * len(base_word)
    for new, old in enumerate(collected):
        perm[old] = new
    return koszul_sign(tuple(perm), [space.degree(x) for x in base_word])


def _glue_into_pieces(tgen, mono_gen, xi):
    """Glue the term surface into the touched pieces sequentially; returns
    ((pieces-spec,), out-position labels) in raw (unsorted) order.

    pieces-spec is a tuple of (g, lens) and the label list runs through the
    glued piece first, then the untouched pieces; labels are ("t", j) for the
    term's outputs and ("m", p) for monomial positions.
    """
    _, g_t, out_lens, in_lens = tgen
    cycles_out = []
    pos = 0
    for ln in out_lens:
        cycles_out.append(Cycle(("t", "o", j) for j in range(pos, pos + ln)))
        pos += ln
    cycles_in = []
    pos = 0
    for ln in in_lens:
        cycles_in.append(Cycle(("t", "i", p) for p in range(pos, pos + ln)))
        pos += ln
    left = OpenSurface(g_t, cycles_out, cycles_in)
    surfaces = _mono_surfaces(mono_gen)
    # group gluings by target piece
    offs, total = _piece_offsets(mono_gen[1])
    sizes = [sum(lens) for _, lens in mono_gen[1]]
    def piece_of(p):
        for idx, off in enumerate(offs):
            if off <= p < off + sizes[idx]:
                return idx
        raise ValueError
    by_piece = {}
    for p, q in xi.items():
        by_piece.setdefault(piece_of(q), {})[("t", "i", p)] = ("m", q)
    current = left
    try:
        for idx in sorted(by_piece):
            current = open_glue(current, surfaces[idx], by_piece[idx])
    except UnstableComposition:
        return None
    pieces = [(current.genus, tuple(len(c) for c in sorted(current.out_cycles)))]
    out_pos = []
    for cyc in sorted(current.out_cycles):
        for lab in cyc:
            out_pos.append(("t", lab[2]) if lab[0] == "t" else ("m", lab[1]))
    for idx, surf in enumerate(surfaces):
        if idx in by_piece:
            continue
        pieces.append((surf.genus, tuple(len(c) for c in sorted(surf.out_cycles))))
        for cyc in sorted(surf.out_cycles):
            for lab in cyc:
                out_pos.append(("m", lab[1]))
    return (tuple(pieces),), out_pos


def open_monomials(space, max_len, genus_max=1, max_pieces=1):
    """Canonical single-piece monomials within the length bound."""
    from .graded import iter_words
    out = []
    for length in range(max_len + 1):
        shapes = set()
        for n_blocks in range(1, max(length, 1) + 1):
            for lens in _compositions(length, n_blocks):
                shapes.add(tuple(sorted(lens)))
        for lens in sorted(shapes):
            for g in range(genus_max + 1):
                if 2 * (2 * g + len(lens) - 1) + length - 2 <= 0:
                    continue
                for word in iter_words(space.basis.names, length):
                    res = canonical_open_product(
                        space, ((g, lens),), word, Fraction(1))
                    if res is None:
                        continue
                    pgen, pword, sign = res
                    cand = ((pgen, pword))
                    if pword == word and pgen[1][0][1] == lens and sign == 1:
                        if cand not in out:
                            out.append(cand)
    return out


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(0, total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def apply_open_d(space, mono):
    """The differential as a first-order operator: replace one letter in
    place by its image, with the derivation sign; blocks are untouched."""
    (mono_gen, word), chi = mono
    out = {}
    prefix = 0
    for i, letter in enumerate(word):
        sign = -1 if prefix % 2 else 1
        for tgt, c in space.d(letter).items():
            res = canonical_open_product(
                space, mono_gen[1], word[:i] + (tgt,) + word[i + 1:],
                Fraction(sign) * c)
            if res is not None:
                pgen, pword, cc = res
                add_to(out, ((pgen, pword), chi), cc)
        prefix += space.degree(letter)
    return out


def _apply_open_operator(space, terms, mono):
    acc = apply_open_d(space, mono)
    for term, coeff in terms:
        for key, c in apply_open_term(space, term, coeff, mono).items():
            add_to(acc, key, c)
    return acc


def square_open(space, L, trunc, max_len=None, genus_max=1):
    terms = list(L.items())
    max_len = trunc.n_max if max_len is None else max_len
    buckets = {}
    for mono in open_monomials(space, max_len, genus_max):
        acc = _apply_open_operator(space, terms, (mono, 0))
        final = {}
        for mid, c in acc.items():
            for key, c2 in _apply_open_operator(space, terms, mid).items():
                add_to(final, key, c * c2)
        for (out_mono, chi), c in final.items():
            key = (mono, out_mono, chi)
            buckets.setdefault(key, Fraction(0))
            buckets[key] += c
    return buckets
