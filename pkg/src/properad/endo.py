"""The endomorphism properad on a finite-dimensional dg vector space.

Elements of E_V(C, D) are stored as sparse matrices {(J, I): Fraction} over
basis words, J in sorted(C) order and I in sorted(D) order, with the map
semantics f(e_I) = sum_J f[J, I] e_J.  Compositions are literal compositions
of linear maps through the concatenation isomorphisms of unordered products,
so the properad axioms hold by construction; every sign is a mechanical
Koszul permutation sign.
"""

from fractions import Fraction

from .graded import (
    add_to, iter_words, koszul_sign, permute_word, derivation_on_word,
)


# ---------------------------------------------------------------------------
# corolla-level element calculus
# ---------------------------------------------------------------------------

def _merge_sign(space, parts, target_order):
    """Concatenate word parts (each over its own label order) and reorder
    into `target_order`.  Returns (word, sign, ok)."""
    labels = []
    word = []
    for labs, frag in parts:
        labels.extend(labs)
        word.extend(frag)
    pos = {lab: i for i, lab in enumerate(target_order)}
    perm = tuple(pos[lab] for lab in labels)
    degs = [space.degree(x) for x in word]
    sign = koszul_sign(perm, degs)
    return permute_word(perm, tuple(word)), sign


def _split_sign(space, word, source_order, part_orders):
    """Inverse of _merge_sign: cut `word` (over source_order) into parts over
    the given label orders.  Returns (parts, sign)."""
    target = [lab for order in part_orders for lab in order]
    pos = {lab: i for i, lab in enumerate(target)}
    perm = tuple(pos[lab] for lab in source_order)
    degs = [space.degree(x) for x in word]
    sign = koszul_sign(perm, degs)
    flat = permute_word(perm, word)
    parts = []
    k = 0
    for order in part_orders:
        parts.append(flat[k:k + len(order)])
        k += len(order)
    return parts, sign


def relabel_element(space, elem, C, D, rho, sigma):
    """Apply E_V(rho, sigma): f |-> rho_bar . f . (sigma^{-1})_bar.

    C, D are sorted label tuples of the source corolla; rho, sigma are label
    bijections onto the target corolla.  Returns (elem', C', D').
    """
    C2 = tuple(sorted(rho[c] for c in C))
    D2 = tuple(sorted(sigma[d] for d in D))
    pos_c = {lab: i for i, lab in enumerate(C2)}
    pos_d = {lab: i for i, lab in enumerate(D2)}
    perm_c = tuple(pos_c[rho[c]] for c in C)
    perm_d = tuple(pos_d[sigma[d]] for d in D)
    out = {}
    for (J, I), coeff in elem.items():
        sign = koszul_sign(perm_c, [space.degree(x) for x in J]) * \
            koszul_sign(perm_d, [space.degree(x) for x in I])
        add_to(out, (permute_word(perm_c, J), permute_word(perm_d, I)), sign * coeff)
    return out, C2, D2


def compose_elements(space, g_elem, CL, DL, f_elem, CR, DR, eta):
    """g o^eta_{B,A} f with B = eta keys in DL, A = eta values in CR.

    Works entirely on sorted-order matrices; returns (elem, C_res, D_res).
    """
    bset = tuple(sorted(eta))
    aset = tuple(sorted(eta.values()))
    if not bset:
        raise ValueError("gluing sets must be nonempty")
    if not set(bset) <= set(DL) or not set(aset) <= set(CR):
        raise ValueError("gluing instruction does not match the corollas")
    if set(CL) & set(CR) or set(DL) & set(DR):
        raise ValueError("corolla label sets overlap")
    d_free = tuple(lab for lab in DL if lab not in set(bset))
    c_surv = tuple(lab for lab in CR if lab not in set(aset))
    C_res = tuple(sorted(set(CL) | set(c_surv)))
    D_res = tuple(sorted(set(d_free) | set(DR)))
    # B listed in the order of sorted(A) transported through eta^{-1}
    inv = {a: b for b, a in eta.items()}
    b_of_a = tuple(inv[a] for a in aset)

    out = {}
    for (W, I2), cf in f_elem.items():
        deg_f = space.basis.word_degree(W) - space.basis.word_degree(I2)
        (w_a, w_rest), s3 = _split_sign(space, W, CR, (aset, c_surv))
        # relabel the A-part to B via eta^{-1}: factors keep their order but
        # the unordered product is re-sorted over B
        wb, s4 = _merge_sign(space, [(b_of_a, w_a)], tuple(sorted(b_of_a)))
        for (J1, I1), cg in g_elem.items():
            (u1, i1_b), s5 = _split_sign(space, I1, DL, (d_free, tuple(sorted(b_of_a))))
            if i1_b != wb:
                continue
            s2 = -1 if (deg_f % 2) and (space.basis.word_degree(u1) % 2) else 1
            I_word, s1 = _merge_sign(space, [(d_free, u1), (DR, I2)], D_res)
            J_word, s7 = _merge_sign(space, [(CL, J1), (c_surv, w_rest)], C_res)
            coeff = cf * cg * s1 * s2 * s3 * s4 * s5 * s7
            add_to(out, (J_word, I_word), coeff)
    return out, C_res, D_res


def element_differential(space, elem, C, D):
    """d(f) = d_out . f - (-1)^{|f|} f . d_in on a homogeneous element."""
    out = {}
    for (J, I), coeff in elem.items():
        deg = space.basis.word_degree(J) - space.basis.word_degree(I)
        sign = -1 if deg % 2 else 1
        for J2, c in derivation_on_word(space, J).items():
            add_to(out, (J2, I), c * coeff)
        # (f . d)(e_src) = sum over src with d(e_src) hitting e_I
        for q, letter in enumerate(I):
            prefix = space.basis.word_degree(I[:q])
            dsign = -1 if prefix % 2 else 1
            for (tgt, src), c in space.differential.items():
                if tgt == letter:
                    I_src = I[:q] + (src,) + I[q + 1:]
                    add_to(out, (J, I_src), -sign * dsign * c * coeff)
    return out


# ---------------------------------------------------------------------------
# skeletal layer
# ---------------------------------------------------------------------------

class GradedLinearMap:
    """Coordinates of a multilinear map V^{(x)n} -> V^{(x)m}.

    coords maps (J, I) to a Fraction where J, I are tuples of basis names;
    f(a_I) = sum_J coords[J, I] a_J.  All stored entries must realize the
    same degree.
    """

    __slots__ = ("m", "n", "coords", "degree")

    def __init__(self, space, m, n, coords, degree=None):
        self.m = m
        self.n = n
        clean = {}
        for (J, I), coeff in coords.items():
            coeff = Fraction(coeff)
            if not coeff:
                continue
            if len(J) != m or len(I) != n:
                raise ValueError("word lengths do not match the arities")
            for x in J + I:
                if x not in space.basis:
                    raise ValueError("unknown basis name %r" % (x,))
            d = space.basis.word_degree(J) - space.basis.word_degree(I)
            if degree is None:
                degree = d
            elif d != degree:
                raise ValueError("inhomogeneous coordinates: %d vs %d" % (d, degree))
            clean[(J, I)] = coeff
        self.coords = clean
        self.degree = 0 if degree is None else degree

    def is_zero(self):
        return not self.coords

    def __eq__(self, other):
        return (isinstance(other, GradedLinearMap) and self.m == other.m
                and self.n == other.n and self.coords == other.coords)

    def __repr__(self):
        return "GradedLinearMap(m=%d, n=%d, %d terms, degree=%d)" % (
            self.m, self.n, len(self.coords), self.degree)

    def apply(self, word):
        """Evaluate on a basis word, as {word: Fraction}."""
        out = {}
        for (J, I), coeff in self.coords.items():
            if I == tuple(word):
                add_to(out, J, coeff)
        return out


def identity_map(space):
    return GradedLinearMap(space, 1, 1,
                           {((x,), (x,)): Fraction(1) for x in space.basis.names},
                           degree=0)


def _skeletal_labels(m, n, tag_out, tag_in):
    return (tuple((tag_out, i) for i in range(m)),
            tuple((tag_in, i) for i in range(n)))


def end_sigma_action(space, rho, sigma, f):
    """Left Sigma_m x Sigma_n action: outputs permuted by rho, inputs by sigma,
    both with Koszul signs (position i moves to rho[i] / sigma[i])."""
    if len(rho) != f.m or len(sigma) != f.n:
        raise ValueError("permutation arities do not match the map")
    out = {}
    for (J, I), coeff in f.coords.items():
        sign = koszul_sign(rho, [space.degree(x) for x in J]) * \
            koszul_sign(sigma, [space.degree(x) for x in I])
        add_to(out, (permute_word(rho, J), permute_word(sigma, I)), sign * coeff)
    return GradedLinearMap(space, f.m, f.n, out, f.degree)


def end_compose(space, g, f, N, M, xi):
    """Contract the inputs N of g against the outputs M of f along xi.

    N and M are 0-based position sets, xi a dict N -> M.  The composite's
    outputs are g's outputs followed by f's surviving outputs, its inputs
    f's inputs followed by g's surviving inputs, each block in increasing
    position order.
    """
    N, M = set(N), set(M)
    if not N:
        raise ValueError("gluing sets must be nonempty")
    if set(xi) != N or set(xi.values()) != M or len(xi) != len(N):
        raise ValueError("xi is not a bijection N -> M")
    if not N <= set(range(g.n)) or not M <= set(range(f.m)):
        raise ValueError("position out of range")
    CL, DL = _skeletal_labels(g.m, g.n, ("a", "out"), ("b", "in"))
    CR, DR = _skeletal_labels(f.m, f.n, ("b", "out"), ("a", "in"))
    eta = {DL[p]: CR[xi[p]] for p in xi}
    elem, C_res, D_res = compose_elements(
        space, g.coords, CL, DL, f.coords, CR, DR, eta)
    return GradedLinearMap(space, len(C_res), len(D_res), elem,
                           g.degree + f.degree)


def end_differential(space, f):
    """d(f) = sum (1 x..x d x..x 1) f - (-1)^{|f|} f sum (1 x..x d x..x 1)."""
    elem = element_differential(space, f.coords, None, None)
    return GradedLinearMap(space, f.m, f.n, elem, f.degree + 1)


def unordered_end_component(space, C, D, f):
    """View a skeletal map as a map of unordered products over (C, D).

    C and D are label tuples giving the chosen orderings psi; position i of
    the skeletal map corresponds to label C[i] / D[i].  The returned element
    is the matrix over sorted(C), sorted(D).
    """
    if len(C) != f.m or len(D) != f.n:
        raise ValueError("label counts do not match the arities")
    rho = {("a", "out", i): C[i] for i in range(f.m)}
    sigma = {("a", "in", i): D[i] for i in range(f.n)}
    CL = tuple(("a", "out", i) for i in range(f.m))
    DL = tuple(("a", "in", i) for i in range(f.n))
    coords = {(J, I): c for (J, I), c in f.coords.items()}
    return relabel_element(space, coords, CL, DL, rho, sigma)


def skeletal_from_element(space, elem, C, D):
    """Inverse of unordered_end_component for C, D already sorted."""
    return GradedLinearMap(space, len(C), len(D), elem)


def all_basis_maps(space, m, n):
    """All coordinate maps (J, I) |-> 1 of E_V(m, n)."""
    out = []
    for J in iter_words(space.basis.names, m):
        for I in iter_words(space.basis.names, n):
            out.append(GradedLinearMap(space, m, n, {(J, I): Fraction(1)}))
    return out
