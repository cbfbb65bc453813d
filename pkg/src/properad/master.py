"""Coinvariant terms, the tilde differential/composition, and the
master-equation checkers for the closed, open and open-closed flavors.

A term is (generator, J, I): a properad generator in skeletal position form
together with an output word J and an input word I over the chosen basis.
Terms are stored in orbit-canonical form under the diagonal action: words
sorted (closed letters), boundary blocks rotated to minimal form and sorted
(open letters), with every Koszul sign folded into the coefficient.  Terms
whose orbit carries a sign-reversing stabilizer are zero and are dropped.
"""

from fractions import Fraction
from itertools import combinations, permutations
from math import factorial

from .cycles import Cycle
from .endo import GradedLinearMap, compose_elements, element_differential, \
    end_sigma_action
from .frobenius import OpenSurface, OpenClosedGenerator, open_glue, oc_compose, \
    UnstableComposition
from .graded import add_to, koszul_sign, permute_word


class InvarianceError(ValueError):
    """Structure constants violating their flavor's symmetry."""


# ---------------------------------------------------------------------------
# generators in skeletal position form
# ---------------------------------------------------------------------------

def closed_gen(m, n, chi):
    return ("cl", m, n, chi)


def open_gen(genus, out_blocks, in_blocks):
    """Blocks are tuples of block lengths; position ranges are consecutive."""
    return ("op", genus, tuple(out_blocks), tuple(in_blocks))


def oc_gen(genus, out_blocks, in_blocks, m_closed, n_closed):
    return ("ocg", genus, tuple(out_blocks), tuple(in_blocks),
            m_closed, n_closed)


def gen_arities(gen):
    if gen[0] == "cl":
        return gen[1], gen[2]
    if gen[0] == "op":
        return sum(gen[2]), sum(gen[3])
    if gen[0] == "ocg":
        return sum(gen[2]) + gen[4], sum(gen[3]) + gen[5]
    raise ValueError("unknown generator %r" % (gen,))


def gen_chi(gen):
    if gen[0] == "cl":
        return gen[3]
    if gen[0] == "op":
        g, outs, ins = gen[1], gen[2], gen[3]
        b = len(outs) + len(ins)
        return 2 * (2 * g + b - 1) + sum(outs) + sum(ins) - 2
    if gen[0] == "ocg":
        g, outs, ins, mc, nc = gen[1:]
        b = len(outs) + len(ins)
        return (4 * g + 2 * b + mc + nc - 2) + sum(outs) + sum(ins) + mc + nc - 2
    raise ValueError("unknown generator %r" % (gen,))


def component_key(gen):
    if gen[0] == "cl":
        return ("cl", gen[1], gen[2], gen[3])
    if gen[0] == "op":
        m, n = gen_arities(gen)
        return ("op", m, n, gen_chi(gen))
    m, n = gen_arities(gen)
    return ("ocg", sum(gen[2]), sum(gen[3]), gen[4], gen[5], gen_chi(gen))


def term_degree(space, term):
    _, J, I = term
    return space.basis.word_degree(J) - space.basis.word_degree(I)


# ---------------------------------------------------------------------------
# canonical forms
# ---------------------------------------------------------------------------

def _sort_word(space, word):
    """Sort a word by basis order; None if a repeated odd letter kills it."""
    key = space.basis.sort_key
    order = sorted(range(len(word)), key=lambda i: (key(word[i]), i))
    perm = [0] * len(word)
    for tgt, src in enumerate(order):
        perm[src] = tgt
    sign = koszul_sign(tuple(perm), [space.degree(x) for x in word])
    new = permute_word(tuple(perm), word)
    for i in range(len(new) - 1):
        if new[i] == new[i + 1] and space.degree(new[i]) % 2:
            return None
    return new, sign


def _min_rotation(space, word):
    """Minimal rotation of a cyclic letter word with its Koszul sign;
    None when a sign-reversing rotation stabilizes the word."""
    if not word:
        return word, 1
    n = len(word)
    idx = [space.basis.index(x) for x in word]
    best = min(range(n), key=lambda r: idx[r:] + idx[:r])
    # zero detection: a nontrivial rotation fixing the word with sign -1
    deg = sum(space.degree(x) for x in word)
    for r in range(1, n):
        if idx[r:] + idx[:r] == idx:
            # rotating by r: sign of the cyclic permutation on the graded word
            perm = tuple((i - r) % n for i in range(n))
            if koszul_sign(perm, [space.degree(x) for x in word]) == -1:
                return None
            break  # the stabilizer is cyclic; its generator decides
    perm = tuple((i - best) % n for i in range(n))
    sign = koszul_sign(perm, [space.degree(x) for x in word])
    return word[best:] + word[:best], sign


def canonical_closed(space, gen, J, I, coeff):
    sj = _sort_word(space, J)
    if sj is None:
        return None
    si = _sort_word(space, I)
    if si is None:
        return None
    return (gen, sj[0], si[0]), coeff * sj[1] * si[1]


def _canonical_blocks(space, lens, word):
    """Canonicalize one side of an open term: rotate each block minimally,
    then sort blocks; returns (lens, word, sign) or None if the term dies."""
    blocks = []
    off = 0
    for ln in lens:
        blocks.append(word[off:off + ln])
        off += ln
    rotated = []
    for blk in blocks:
        r = _min_rotation(space, blk)
        if r is None:
            return None
        rotated.append((blk, r[0], r[1]))
    # sort blocks by (length, canonical word as basis indices)
    def blk_key(item):
        return (len(item[1]), tuple(space.basis.index(x) for x in item[1]))
    order = sorted(range(len(rotated)), key=lambda i: (blk_key(rotated[i]), i))
    # zero detection: identical odd-degree blocks swap with sign -1
    for a, b in zip(order, order[1:]):
        if rotated[a][1] == rotated[b][1] and rotated[a][1]:
            if space.basis.word_degree(rotated[a][1]) % 2:
                return None
    # assemble the position permutation: original position -> new position
    perm = [0] * len(word)
    new_word = []
    new_lens = []
    pos = 0
    offsets = []
    off = 0
    for ln in lens:
        offsets.append(off)
        off += ln
    for i in order:
        blk, canon, _ = rotated[i]
        ln = len(blk)
        start = canon  # canonical word
        # rotation amount within the block
        rot = 0
        if ln:
            for r in range(ln):
                if blk[r:] + blk[:r] == canon:
                    rot = r
                    break
        for j in range(ln):
            src = offsets[i] + (rot + j) % ln
            perm[src] = pos + j
        new_word.extend(canon)
        new_lens.append(ln)
        pos += ln
    sign = koszul_sign(tuple(perm), [space.degree(x) for x in word])
    return tuple(new_lens), tuple(new_word), sign


def canonical_open(space, gen, J, I, coeff):
    _, genus, out_lens, in_lens = gen
    co = _canonical_blocks(space, out_lens, J)
    if co is None:
        return None
    ci = _canonical_blocks(space, in_lens, I)
    if ci is None:
        return None
    gen2 = open_gen(genus, co[0], ci[0])
    return (gen2, co[1], ci[1]), coeff * co[2] * ci[2]


def canonical_oc(space, gen, J, I, coeff):
    _, genus, out_lens, in_lens, mc, nc = gen
    mo, no = sum(out_lens), sum(in_lens)
    co = _canonical_blocks(space, out_lens, J[:mo])
    if co is None:
        return None
    ci = _canonical_blocks(space, in_lens, I[:no])
    if ci is None:
        return None
    sj = _sort_word(space, J[mo:])
    if sj is None:
        return None
    si = _sort_word(space, I[no:])
    if si is None:
        return None
    gen2 = oc_gen(genus, co[0], ci[0], mc, nc)
    return (gen2, co[1] + sj[0], ci[1] + si[0]), \
        coeff * co[2] * ci[2] * sj[1] * si[1]


def orbit_normal_form(space, term, coeff=Fraction(1)):
    gen = term[0]
    if gen[0] == "cl":
        return canonical_closed(space, gen, term[1], term[2], coeff)
    if gen[0] == "op":
        return canonical_open(space, gen, term[1], term[2], coeff)
    return canonical_oc(space, gen, term[1], term[2], coeff)


def add_term(space, acc, term, coeff):
    res = orbit_normal_form(space, term, coeff)
    if res is not None:
        add_to(acc, res[0], res[1])
    return acc


def diagonal_act(space, rho, sigma, term):
    """Diagonal action of (rho, sigma) on a term; returns (term, sign) with
    NO re-canonicalization (raw position bookkeeping, used by stabilizers)."""
    gen, J, I = term
    sign = koszul_sign(rho, [space.degree(x) for x in J]) * \
        koszul_sign(sigma, [space.degree(x) for x in I])
    J2 = permute_word(rho, J)
    I2 = permute_word(sigma, I)
    if gen[0] == "cl":
        return (gen, J2, I2), sign
    if gen[0] == "op":
        _, genus, out_lens, in_lens = gen
        outs = _act_blocks(out_lens, rho)
        ins = _act_blocks(in_lens, sigma)
        return (("opx", genus, outs, ins), J2, I2), sign
    _, genus, out_lens, in_lens, mc, nc = gen
    mo, no = sum(out_lens), sum(in_lens)
    outs = _act_blocks(out_lens, tuple(rho[:mo]))
    ins = _act_blocks(in_lens, tuple(sigma[:no]))
    return (("ocx", genus, outs, ins, mc, nc), J2, I2), sign


def _act_blocks(lens, perm):
    """Blocks as position cycles after permuting positions."""
    out = []
    off = 0
    for ln in lens:
        cyc = tuple(perm[off + j] for j in range(ln))
        out.append(cyc)
        off += ln
    return tuple(out)


def stabilizer_order(space, term):
    """Number of (rho, sigma) in the diagonal group fixing the canonical term
    (with sign +1).  The term must already be canonical."""
    gen, J, I = term
    m, n = gen_arities(gen)
    count = 0
    ref = _position_form(space, term)
    for rho in permutations(range(m)):
        for sigma in permutations(range(n)):
            acted, sign = diagonal_act(space, rho, sigma, term)
            if sign == 1 and _position_form(space, acted) == ref:
                count += 1
    return count


def _position_form(space, term):
    """Raw structural encoding: words stay in place, boundary blocks become
    rotation-normalized position cycles.  Two presentations of the same
    labeled object (and only those) encode equally."""
    gen, J, I = term
    if gen[0] == "cl":
        return (gen, J, I)
    if gen[0] in ("op", "opx"):
        _, genus, outs, ins = gen
        return ("op", genus, _position_cycles(outs, gen[0] == "op"),
                _position_cycles(ins, gen[0] == "op"), J, I)
    _, genus, outs, ins, mc, nc = gen
    return ("oc", genus, _position_cycles(outs, gen[0] == "ocg"),
            _position_cycles(ins, gen[0] == "ocg"), mc, nc, J, I)


def _position_cycles(blocks, lens_form):
    """Multiset of position cycles, each rotated to start at its minimum."""
    if lens_form:
        cycles = []
        off = 0
        for ln in blocks:
            cycles.append(tuple(range(off, off + ln)))
            off += ln
    else:
        cycles = blocks
    out = []
    for cyc in cycles:
        if cyc:
            best = min(range(len(cyc)), key=lambda r: cyc[r:] + cyc[:r])
            cyc = cyc[best:] + cyc[:best]
        out.append(tuple(cyc))
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# tilde differential and composition
# ---------------------------------------------------------------------------

def tilde_differential(space, term, coeff=Fraction(1)):
    """d-tilde on a Frobenius-flavor term: -(id (x) d_E) on the word part."""
    gen, J, I = term
    out = {}
    for (J2, I2), c in element_differential(space, {(J, I): Fraction(1)},
                                            None, None).items():
        add_term(space, out, (gen, J2, I2), -coeff * c)
    return out


def _skeletal_label_sets(m1, n1, m2, n2):
    CL = tuple(("a", "out", i) for i in range(m1))
    DL = tuple(("b", "in", p) for p in range(n1))
    CR = tuple(("b", "out", j) for j in range(m2))
    DR = tuple(("a", "in", q) for q in range(n2))
    return CL, DL, CR, DR


def _glue_open_gens(xgen, ygen, N, M, xi, CL, DL, CR, DR, C_res, D_res):
    """Compose two open generators through the labeled surface gluing and
    read the result back in the composed position order."""
    left = _surface_on_labels(xgen, CL, DL)
    right = _surface_on_labels(ygen, CR, DR)
    eta = {DL[p]: CR[xi[p]] for p in N}
    try:
        glued = open_glue(left, right, eta)
    except UnstableComposition:
        return None
    return _blocks_from_surface(glued, C_res, D_res)


def _surface_on_labels(gen, C, D):
    _, genus, out_lens, in_lens = gen
    outs = []
    off = 0
    for ln in out_lens:
        outs.append(Cycle(C[off + j] for j in range(ln)))
        off += ln
    ins = []
    off = 0
    for ln in in_lens:
        ins.append(Cycle(D[off + j] for j in range(ln)))
        off += ln
    return OpenSurface(genus, outs, ins)


def _blocks_from_surface(surface, C_res, D_res):
    """Translate label cycles back to a block-structured generator plus the
    position permutations that rearrange the composed words blockwise."""
    pos_c = {lab: i for i, lab in enumerate(C_res)}
    pos_d = {lab: i for i, lab in enumerate(D_res)}
    out_lens, out_positions = _block_positions(surface.out_cycles, pos_c)
    in_lens, in_positions = _block_positions(surface.in_cycles, pos_d)
    return surface.genus, out_lens, out_positions, in_lens, in_positions


def _block_positions(cycles, pos):
    lens = []
    positions = []
    for cyc in sorted(cycles):
        lens.append(len(cyc))
        positions.extend(pos[lab] for lab in cyc)
    return tuple(lens), positions


def _reorder_word(space, word, positions):
    """Collect word factors in the order given by `positions` (a permutation
    of range(len(word)) read as: new word lists old positions), with sign."""
    perm = [0] * len(word)
    for new, old in enumerate(positions):
        perm[old] = new
    sign = koszul_sign(tuple(perm), [space.degree(x) for x in word])
    return permute_word(tuple(perm), word), sign


def tilde_compose(space, x_term, y_term, x_coeff=Fraction(1),
                  y_coeff=Fraction(1)):
    """Sum over nonempty N in x's inputs, M in y's outputs and bijections
    xi of the simultaneous generator and word compositions."""
    xgen, J1, I1 = x_term
    ygen, J2, I2 = y_term
    if xgen[0] != ygen[0]:
        raise ValueError("flavors do not match")
    out = {}
    n1, m2 = len(I1), len(J2)
    if xgen[0] == "ocg":
        return _tilde_compose_oc(space, x_term, y_term, x_coeff * y_coeff)
    m1, n2 = len(J1), len(I2)
    CL, DL, CR, DR = _skeletal_label_sets(m1, n1, m2, n2)
    for k in range(1, min(n1, m2) + 1):
        for N in combinations(range(n1), k):
            for M in combinations(range(m2), k):
                for images in permutations(M):
                    xi = dict(zip(N, images))
                    eta = {DL[p]: CR[xi[p]] for p in N}
                    elem, C_res, D_res = compose_elements(
                        space, {(J1, I1): Fraction(1)}, CL, DL,
                        {(J2, I2): Fraction(1)}, CR, DR, eta)
                    if not elem:
                        continue
                    if xgen[0] == "cl":
                        gen = closed_gen(m1 + m2 - k, n1 + n2 - k,
                                         xgen[3] + ygen[3])
                        for (J, I), c in elem.items():
                            add_term(space, out, (gen, J, I),
                                     x_coeff * y_coeff * c)
                    else:
                        res = _glue_open_gens(xgen, ygen, N, M, xi,
                                              CL, DL, CR, DR, C_res, D_res)
                        if res is None:
                            continue
                        genus, out_lens, out_pos, in_lens, in_pos = res
                        gen = open_gen(genus, out_lens, in_lens)
                        for (J, I), c in elem.items():
                            J3, sj = _reorder_word(space, J, out_pos)
                            I3, si = _reorder_word(space, I, in_pos)
                            add_term(space, out, (gen, J3, I3),
                                     x_coeff * y_coeff * c * sj * si)
    return out


def _tilde_compose_oc(space, x_term, y_term, coeff):
    """Open-closed composition: open contractions drive the cycle gluing,
    closed contractions are pure puncture pairings."""
    xgen, J1, I1 = x_term
    ygen, J2, I2 = y_term
    _, g1, outs1, ins1, mc1, nc1 = xgen
    _, g2, outs2, ins2, mc2, nc2 = ygen
    mo1, no1 = sum(outs1), sum(ins1)
    mo2, no2 = sum(outs2), sum(ins2)
    m1, n1 = len(J1), len(I1)
    m2, n2 = len(J2), len(I2)
    CL, DL, CR, DR = _skeletal_label_sets(m1, n1, m2, n2)
    out = {}
    in_open = list(range(no1))
    in_closed = list(range(no1, n1))
    out_open = list(range(mo2))
    out_closed = list(range(mo2, m2))
    for ko in range(0, min(no1, mo2) + 1):
        for kc in range(0, min(n1 - no1, m2 - mo2) + 1):
            if ko + kc == 0:
                continue
            for N_o in combinations(in_open, ko):
                for M_o in combinations(out_open, ko):
                    for img_o in permutations(M_o):
                        for N_c in combinations(in_closed, kc):
                            for M_c in combinations(out_closed, kc):
                                for img_c in permutations(M_c):
                                    xi = dict(zip(N_o + N_c, img_o + img_c))
                                    combo = _oc_one(
                                        space, x_term, y_term, xi,
                                        (CL, DL, CR, DR),
                                        (mo1, no1, mo2, no2))
                                    for term, c in combo.items():
                                        add_term(space, out, term, coeff * c)
    return out


def _oc_one(space, x_term, y_term, xi, labels, splits):
    xgen, J1, I1 = x_term
    ygen, J2, I2 = y_term
    CL, DL, CR, DR = labels
    mo1, no1, mo2, no2 = splits
    eta = {DL[p]: CR[xi[p]] for p in xi}
    elem, C_res, D_res = compose_elements(
        space, {(J1, I1): Fraction(1)}, CL, DL,
        {(J2, I2): Fraction(1)}, CR, DR, eta)
    if not elem:
        return {}
    _, g1, outs1, ins1, mc1, nc1 = xgen
    _, g2, outs2, ins2, mc2, nc2 = ygen
    left = OpenClosedGenerator(
        g1,
        _cycles_on(outs1, CL, 0), _cycles_on(ins1, DL, 0),
        [CL[i] for i in range(mo1, mo1 + mc1)],
        [DL[p] for p in range(no1, no1 + nc1)])
    right = OpenClosedGenerator(
        g2,
        _cycles_on(outs2, CR, 0), _cycles_on(ins2, DR, 0),
        [CR[j] for j in range(mo2, mo2 + mc2)],
        [DR[q] for q in range(no2, no2 + nc2)])
    eta_o = {DL[p]: CR[xi[p]] for p in xi if p < no1}
    eta_c = {DL[p]: CR[xi[p]] for p in xi if p >= no1}
    try:
        glued = oc_compose(left, right, eta_o, eta_c)
    except UnstableComposition:
        return {}
    pos_c = {lab: i for i, lab in enumerate(C_res)}
    pos_d = {lab: i for i, lab in enumerate(D_res)}
    out_lens, out_pos = _block_positions(glued.out_cycles, pos_c)
    in_lens, in_pos = _block_positions(glued.in_cycles, pos_d)
    out_pos = out_pos + sorted(pos_c[lab] for lab in glued.closed_out)
    in_pos = in_pos + sorted(pos_d[lab] for lab in glued.closed_in)
    gen = oc_gen(glued.genus, out_lens, in_lens,
                 len(glued.closed_out), len(glued.closed_in))
    out = {}
    for (J, I), c in elem.items():
        J3, sj = _reorder_word(space, J, out_pos)
        I3, si = _reorder_word(space, I, in_pos)
        add_to(out, (gen, J3, I3), c * sj * si)
    return out


def _cycles_on(lens, labels, off):
    cycles = []
    pos = off
    for ln in lens:
        cycles.append(Cycle(labels[pos + j] for j in range(ln)))
        pos += ln
    return cycles


# ---------------------------------------------------------------------------
# positional derivatives
# ---------------------------------------------------------------------------

def positional_derivative(space, position, letter, word):
    """Delete the factor at `position` when it equals `letter`, with the sign
    (-1)^{|letter| * (degree of the preceding factors)}; 0-based position."""
    if not 0 <= position < len(word):
        raise ValueError("position out of range")
    if word[position] != letter:
        return None
    prefix = space.basis.word_degree(word[:position])
    sign = -1 if (space.degree(letter) % 2) and (prefix % 2) else 1
    return word[:position] + word[position + 1:], sign

# ---------------------------------------------------------------------------
# generating operators and structure constants
# ---------------------------------------------------------------------------

class Truncation:
    """Loaded-data bounds; a master-equation component is only decided when
    every pair that could feed it lies inside these bounds."""

    __slots__ = ("chi_max", "m_max", "n_max")

    def __init__(self, chi_max, m_max, n_max):
        if chi_max <= 0 or m_max < 0 or n_max < 0:
            raise ValueError("bounds must be positive")
        self.chi_max = chi_max
        self.m_max = m_max
        self.n_max = n_max

    def holds(self, m, n, chi):
        return m <= self.m_max and n <= self.n_max and 0 <= chi <= self.chi_max


def component_feasible(flavor, m, n, chi):
    """Is there a stable generator with these arities and chi?"""
    if chi <= 0:
        return False
    if flavor == "closed":
        g2 = chi - m - n + 2
        return g2 >= 0 and g2 % 2 == 0
    if flavor == "open":
        # chi = 4g + 2b + m + n - 4 with b >= max(1, needed blocks)
        rest = chi - m - n + 4
        return rest >= 2 and rest % 2 == 0
    raise ValueError(flavor)


def feeding_pairs(flavor, m, n, chi):
    """All (m1, n1, chi1), (m2, n2, chi2), k shapes whose composition can
    land in component (m, n, chi)."""
    shapes = []
    kmax = chi + 2
    for k in range(1, kmax + 1):
        for m1 in range(m + 1):
            m2 = m - m1 + k
            for n2 in range(n + 1):
                n1 = n - n2 + k
                if flavor == "closed":
                    chi_pairs = [(c1, chi - c1) for c1 in range(1, chi)]
                else:
                    chi_pairs = [(c1, c2)
                                 for c1 in range(1, chi - 1)
                                 for c2 in range(1, chi - 1)
                                 if c1 + c2 <= chi - 2
                                 and (chi - c1 - c2) % 2 == 0]
                for c1, c2 in chi_pairs:
                    if not component_feasible(flavor, m1, n1, c1):
                        continue
                    if not component_feasible(flavor, m2, n2, c2):
                        continue
                    shapes.append(((m1, n1, c1), (m2, n2, c2), k))
    return shapes


def component_decidable(flavor, m, n, chi, trunc):
    """Every potential feeding factor must lie within the truncation."""
    if not trunc.holds(m, n, chi):
        return False
    for (m1, n1, c1), (m2, n2, c2), _ in feeding_pairs(flavor, m, n, chi):
        if not trunc.holds(m1, n1, c1) or not trunc.holds(m2, n2, c2):
            return False
    return True


def build_operator(space, flavor, entries):
    """Orbit-canonicalize raw (term, coeff) entries into a generating
    operator, verifying the flavor's invariance.

    Entries mapping to the same canonical term must agree after sign folding;
    the first conflicting pair is reported.  Entries supported on orbits
    killed by a sign-reversing stabilizer must vanish.
    """
    L = {}
    seen = {}
    for term, coeff in entries:
        coeff = Fraction(coeff)
        if term_degree(space, term) != 1:
            raise InvarianceError("term %r does not have degree 1" % (term,))
        res = orbit_normal_form(space, term, Fraction(1))
        if res is None:
            if coeff:
                raise InvarianceError(
                    "entry %r sits on a zero orbit but is nonzero" % (term,))
            continue
        canon, sign = res
        value = coeff * sign
        if canon in seen and seen[canon][0] != value:
            raise InvarianceError(
                "entries %r and %r violate the symmetry of flavor %s" %
                (seen[canon][1], term, flavor))
        seen.setdefault(canon, (value, term))
    for canon, (value, _) in seen.items():
        if value:
            L[canon] = value
    return L


def master_residual(space, L, include_differential=True):
    """d(L) + L o L as a canonical term combination."""
    residual = {}
    if include_differential:
        for term, coeff in L.items():
            for t2, c2 in tilde_differential(space, term, coeff).items():
                add_to(residual, t2, c2)
    items = list(L.items())
    for t1, c1 in items:
        for t2, c2 in items:
            for t3, c3 in tilde_compose(space, t1, t2, c1, c2).items():
                add_to(residual, t3, c3)
    return residual


def master_check(space, flavor, L, trunc):
    """Componentwise verdicts for d(L) + L o L = 0 under the truncation."""
    residual = master_residual(space, L)
    by_comp = {}
    for term, coeff in residual.items():
        by_comp.setdefault(component_key(term[0]), {})[term] = coeff
    components = {}
    keys = set(by_comp)
    for term in L:
        keys.add(component_key(term[0]))
    for ckey in sorted(keys, key=str):
        m, n, chi = ckey[1], ckey[2], ckey[-1]
        if flavor == "open-closed":
            decidable = trunc.holds(m + ckey[3], n + ckey[4], chi)
        else:
            decidable = component_decidable(flavor, m, n, chi, trunc)
        if not decidable:
            components[ckey] = {"status": "SKIPPED"}
        elif by_comp.get(ckey):
            components[ckey] = {"status": "FAIL",
                                "residual": by_comp[ckey]}
        else:
            components[ckey] = {"status": "PASS"}
    ok = all(v["status"] != "FAIL" for v in components.values())
    return {"ok": ok, "components": components}


# ---------------------------------------------------------------------------
# the Y isomorphism (equivariant map families <-> coinvariant operators)
# ---------------------------------------------------------------------------

def check_equivariant(space, alpha):
    """alpha: dict (m, n, chi) -> GradedLinearMap; every map must be
    invariant under the diagonal action transported through the trivial
    generator action (closed flavor).  Returns a witness or None."""
    for (m, n, _), f in alpha.items():
        for rho in permutations(range(m)):
            for sigma in permutations(range(n)):
                if end_sigma_action(space, rho, sigma, f) != f:
                    return (rho, sigma)
    return None


def y_iso(space, alpha):
    """Equivariant family -> generating operator (closed flavor), with the
    1/(m! n!) normalization folded into orbit representatives."""
    witness = check_equivariant(space, alpha)
    if witness is not None:
        raise InvarianceError("family is not equivariant at %r" % (witness,))
    L = {}
    for (m, n, chi), f in alpha.items():
        gen = closed_gen(m, n, chi)
        weight = Fraction(1, factorial(m) * factorial(n))
        for (J, I), coeff in f.coords.items():
            add_term(space, L, (gen, J, I), coeff * weight)
    # terms collapse onto canonical representatives |orbit| times; the net
    # coefficient is coeff / |Stab|
    return L


def y_inverse(space, L):
    """Generating operator -> the full equivariant coordinate family."""
    alpha = {}
    for term, coeff in L.items():
        gen, _, _ = term
        if gen[0] != "cl":
            raise ValueError("y_inverse implemented for the closed flavor")
        m, n, chi = gen[1], gen[2], gen[3]
        stab = stabilizer_order(space, term)
        base = coeff * stab
        coords = alpha.setdefault((m, n, chi), {})
        seen = set()
        for rho in permutations(range(m)):
            for sigma in permutations(range(n)):
                acted, sign = diagonal_act(space, rho, sigma, term)
                key = (acted[1], acted[2])
                if key in seen:
                    continue
                seen.add(key)
                coords[key] = base * sign
    return {key: GradedLinearMap(space, key[0], key[1], coords)
            for key, coords in alpha.items()}


# ---------------------------------------------------------------------------
# componentwise IBL relations (closed flavor)
# ---------------------------------------------------------------------------

def differential_map(space):
    coords = {}
    for (tgt, src), coeff in space.differential.items():
        coords[((tgt,), (src,))] = coeff
    return GradedLinearMap(space, 1, 1, coords, degree=1)


def _alpha_lookup(space, alpha, m, n, chi):
    """alpha components extended by the cylinder alpha_{1,1,0} = d."""
    if chi == 0:
        if (m, n) == (1, 1):
            return differential_map(space)
        return None
    f = alpha.get((m, n, chi))
    if f is not None:
        return f
    if component_feasible("closed", m, n, chi):
        return GradedLinearMap(space, m, n, {})
    return None


def _shuffles(p, q):
    out = []
    for first in combinations(range(p + q), p):
        rest = [i for i in range(p + q) if i not in first]
        perm = [0] * (p + q)
        for i, pos in enumerate(first):
            perm[i] = pos
        for i, pos in enumerate(rest):
            perm[p + i] = pos
        out.append(tuple(perm))
    return out


def ibl_component_relations(space, alpha, trunc):
    """The componentwise relations of the closed flavor: for every decidable
    (m, n, chi), the shuffle sum of pairwise compositions of the alpha's
    (with the differential included as alpha_{1,1,0}) must vanish."""
    components = {}
    for chi in range(1, trunc.chi_max + 1):
        for m in range(trunc.m_max + 1):
            for n in range(trunc.n_max + 1):
                if not component_feasible("closed", m, n, chi):
                    continue
                if not component_decidable("closed", m, n, chi, trunc):
                    components[("cl", m, n, chi)] = {"status": "SKIPPED"}
                    continue
                residual = _ibl_residual(space, alpha, m, n, chi)
                if residual.is_zero():
                    components[("cl", m, n, chi)] = {"status": "PASS"}
                else:
                    components[("cl", m, n, chi)] = {
                        "status": "FAIL", "residual": residual.coords}
    ok = all(v["status"] != "FAIL" for v in components.values())
    return {"ok": ok, "components": components}


def _ibl_residual(space, alpha, m, n, chi):
    total = GradedLinearMap(space, m, n, {})
    acc = {}
    kmax = (chi - m - n) // 2 + 2
    for k in range(1, max(kmax, 0) + 1):
        for m1 in range(m + 1):
            m2 = m - m1
            for n1 in range(n + 1):
                n2 = n - n1
                for chi1 in range(0, chi + 1):
                    chi2 = chi - chi1
                    if chi1 == 0 and (m1, n1 + k) != (1, 1):
                        continue
                    if chi2 == 0 and (m2 + k, n2) != (1, 1):
                        continue
                    f1 = _alpha_lookup(space, alpha, m1, n1 + k, chi1)
                    f2 = _alpha_lookup(space, alpha, m2 + k, n2, chi2)
                    if f1 is None or f2 is None:
                        continue
                    if f1.is_zero() or f2.is_zero():
                        continue
                    comp = _canonical_pair_composition(space, f1, f2, n1, k)
                    for rho in _shuffles(m1, m2):
                        for sigma in _shuffles(n2, n1):
                            acted = end_sigma_action(space, rho, sigma, comp)
                            for key, c in acted.coords.items():
                                add_to(acc, key, c)
    return GradedLinearMap(space, m, n, acc, degree=2)


def _canonical_pair_composition(space, f1, f2, n1, k):
    """compose along N = {n1..n1+k-1}, M = {0..k-1}, xi(n1 + j) = j."""
    from .endo import end_compose
    N = list(range(n1, n1 + k))
    M = list(range(k))
    xi = {n1 + j: j for j in range(k)}
    return end_compose(space, f1, f2, N, M, xi)


def alpha_from_operator(space, L):
    """Collect the coordinate family realized by a closed-flavor operator."""
    return y_inverse(space, L)


# ---------------------------------------------------------------------------
# Lie admissibility
# ---------------------------------------------------------------------------

def bracket(space, x_term, y_term, x_coeff=Fraction(1), y_coeff=Fraction(1)):
    """[x, y] = x o y - (-1)^{|x||y|} y o x."""
    out = tilde_compose(space, x_term, y_term, x_coeff, y_coeff)
    sign = -1 if (term_degree(space, x_term) % 2) and \
        (term_degree(space, y_term) % 2) else 1
    for term, c in tilde_compose(space, y_term, x_term, y_coeff, x_coeff).items():
        add_to(out, term, -sign * c)
    return out


def bracket_combo(space, xc, yc):
    out = {}
    for x, cx in xc.items():
        dx = term_degree(space, x)
        for y, cy in yc.items():
            dy = term_degree(space, y)
            sign = -1 if (dx % 2) and (dy % 2) else 1
            for t, c in tilde_compose(space, x, y, cx, cy).items():
                add_to(out, t, c)
            for t, c in tilde_compose(space, y, x, cy, cx).items():
                add_to(out, t, -sign * c)
    return out


def compose_combo(space, xc, yc):
    out = {}
    for x, cx in xc.items():
        for y, cy in yc.items():
            for t, c in tilde_compose(space, x, y, cx, cy).items():
                add_to(out, t, c)
    return out


def jacobi_residual(space, x, y, z):
    """(-1)^{|x||z|}[[x,y],z] + cyclic, on single canonical terms."""
    dx, dy, dz = (term_degree(space, t) for t in (x, y, z))
    out = {}
    for (a, b, c, da, dc) in (((x,), (y,), (z,), dx, dz),
                              ((y,), (z,), (x,), dy, dx),
                              ((z,), (x,), (y,), dz, dy)):
        xa = {a[0]: Fraction(1)}
        xb = {b[0]: Fraction(1)}
        xc = {c[0]: Fraction(1)}
        inner = bracket_combo(space, xa, xb)
        outer = bracket_combo(space, inner, xc)
        sign = -1 if (da % 2) and (dc % 2) else 1
        for t, co in outer.items():
            add_to(out, t, sign * co)
    return out


def associator(space, x, y, z):
    xa = {x: Fraction(1)}
    xb = {y: Fraction(1)}
    xc = {z: Fraction(1)}
    left = compose_combo(space, compose_combo(space, xa, xb), xc)
    right = compose_combo(space, xa, compose_combo(space, xb, xc))
    for t, c in right.items():
        add_to(left, t, -c)
    return left


# ---------------------------------------------------------------------------
# flavored checkers
# ---------------------------------------------------------------------------

def iba_check(space, entries, trunc):
    """Master-equation verdicts for open structure constants.

    The differential enters through d-tilde, which is what the cylinder
    bookkeeping of the generating-operator picture amounts to: the open
    properad has no strip-shaped generator acting as the identity, so the
    derivation action is the faithful reading.
    """
    L = build_operator(space, "open", entries)
    return master_check(space, "open", L, trunc)


def validate_oc_colors(space, colors, term):
    gen, J, I = term
    if gen[0] != "ocg":
        raise InvarianceError("not an open-closed term: %r" % (gen,))
    mo, no = sum(gen[2]), sum(gen[3])
    for letter in J[:mo] + I[:no]:
        if colors[letter] != "open":
            raise InvarianceError("closed letter %r on an open position" % (letter,))
    for letter in J[mo:] + I[no:]:
        if colors[letter] != "closed":
            raise InvarianceError("open letter %r on a closed position" % (letter,))


def oc_check(space, colors, entries, trunc):
    """Master-equation verdicts for open-closed structure constants on the
    direct sum space; `colors` assigns each basis name to open or closed."""
    for (tgt, src), _ in space.differential.items():
        if colors[tgt] != colors[src]:
            raise InvarianceError("differential mixes colors: %r -> %r" % (src, tgt))
    checked = []
    for term, coeff in entries:
        validate_oc_colors(space, colors, term)
        checked.append((term, coeff))
    L = build_operator(space, "open-closed", checked)
    return master_check(space, "open-closed", L, trunc)


def lie_admissibility_test(space, triples):
    """Graded Jacobi identity for the tilde-commutator on sampled triples;
    reports each triple's Jacobi residual and associator."""
    results = []
    for x, y, z in triples:
        jac = jacobi_residual(space, x, y, z)
        assoc = associator(space, x, y, z)
        results.append({"triple": (x, y, z), "jacobi": jac,
                        "associator_nonzero": bool(assoc)})
    ok = all(not r["jacobi"] for r in results)
    return {"ok": ok, "results": results}


def operator_from_constants(space, flavor, entries):
    """Generating operator from structure-constant records.

    Each record is one coordinate f of the equivariant family; the orbit
    representative stores f / |Stab|, which is the normalization of the
    orbit form of the generating operator.
    """
    L = build_operator(space, flavor, entries)
    return {term: coeff / stabilizer_order(space, term)
            for term, coeff in L.items()}
