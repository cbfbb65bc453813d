"""Properad instances behind one interface, axiom checkers, skeletalization.

A properad is represented behaviorally: a basis enumerator per component
(C, D, chi), the relabeling action, the partial composition and the
differential, all returning linear combinations {basis_key: Fraction}.
Components are materialized lazily because they exist for every corolla.
"""

from fractions import Fraction
from itertools import permutations

from .cycles import invert_bijection
from .frobenius import (
    ClosedGenerator, OpenSurface, closed_compose, open_glue, open_surfaces,
    stability_check, GluingError,
)
from .endo import compose_elements, element_differential, relabel_element
from .graded import add_to, iter_words


class Properad:
    """Behavioral properad interface; values are combos {key: Fraction}."""

    name = "abstract"
    generalized = True

    def basis(self, outputs, inputs, chi):
        raise NotImplementedError

    def corolla(self, key):
        raise NotImplementedError

    def chi(self, key):
        raise NotImplementedError

    def degree(self, key):
        return 0

    def act(self, rho, sigma, key):
        raise NotImplementedError

    def compose(self, xkey, ykey, eta):
        raise NotImplementedError

    def differential(self, key):
        return {}

    def split_chi_pairs(self, chi, n_edges):
        """Candidate (chi1, chi2) for quadratic splittings of a chi-component;
        a superset is fine since the composition itself fixes the result."""
        return [(c1, chi - c1) for c1 in range(1, chi)]

    # linear extensions -----------------------------------------------------

    def act_combo(self, rho, sigma, combo):
        out = {}
        for key, coeff in combo.items():
            for key2, c2 in self.act(rho, sigma, key).items():
                add_to(out, key2, coeff * c2)
        return out

    def compose_combo(self, xcombo, ycombo, eta):
        out = {}
        for xk, xc in xcombo.items():
            for yk, yc in ycombo.items():
                for key, c in self.compose(xk, yk, eta).items():
                    add_to(out, key, xc * yc * c)
        return out

    def admits(self, outputs, inputs, chi):
        """Stability filter: chi > 0; the restricted flavor also demands
        nonempty inputs and outputs, and m + n > 2 when G = 0."""
        m, n = len(outputs), len(inputs)
        if chi <= 0:
            return False
        if (chi - m - n + 2) % 2 or chi - m - n + 2 < 0:
            return False
        if not self.generalized:
            if m == 0 or n == 0:
                return False
            if chi - m - n + 2 == 0 and m + n <= 2:
                return False
        return True


class ClosedFrobenius(Properad):
    """One degree-0 generator per stable (C, D, chi); chi is additive."""

    name = "closed-frobenius"

    def __init__(self, generalized=True):
        self.generalized = generalized

    def basis(self, outputs, inputs, chi):
        if not self.admits(outputs, inputs, chi):
            return []
        return [ClosedGenerator(outputs, inputs, chi)]

    def corolla(self, key):
        return key.outputs, key.inputs

    def chi(self, key):
        return key.chi

    def act(self, rho, sigma, key):
        return {key.relabel(rho, sigma): Fraction(1)}

    def compose(self, xkey, ykey, eta):
        return {closed_compose(xkey, ykey, eta): Fraction(1)}


class OpenFrobenius(Properad):
    """Degree-0 generators are open surfaces; composition is the cycle
    gluing algorithm with the Euler ledger."""

    name = "open-frobenius"

    def __init__(self, generalized=True, genus_cap=2, empty_cap=2):
        self.generalized = generalized
        self.genus_cap = genus_cap
        self.empty_cap = empty_cap

    def basis(self, outputs, inputs, chi):
        if not self.admits(outputs, inputs, chi):
            return []
        return [s for s in open_surfaces(outputs, inputs, chi)
                if s.genus <= self.genus_cap
                and s.boundaries - sum(1 for c in s.out_cycles + s.in_cycles if len(c))
                <= self.empty_cap]

    def corolla(self, key):
        return key.outputs, key.inputs

    def chi(self, key):
        return key.chi

    def act(self, rho, sigma, key):
        return {key.relabel(rho, sigma): Fraction(1)}

    def compose(self, xkey, ykey, eta):
        return {open_glue(xkey, ykey, eta): Fraction(1)}

    def split_chi_pairs(self, chi, n_edges):
        # glued chi = chi1 + chi2 + 2c with c >= 1 split bands
        out = []
        for c1 in range(1, chi - 1):
            for c2 in range(1, chi - 1 - c1 + 1):
                if c1 + c2 <= chi - 2 and (chi - c1 - c2) % 2 == 0:
                    out.append((c1, c2))
        return out


class EndProperad(Properad):
    """Endomorphism properad; keys are single coordinate maps tagged with a
    corolla and a chi that is pure metadata merged by `chi_law`."""

    name = "endomorphism"

    def __init__(self, space, chi_law=None, generalized=True):
        self.space = space
        self.chi_law = chi_law or (lambda c1, c2, eta: c1 + c2)
        self.generalized = generalized

    def basis(self, outputs, inputs, chi):
        if not self.admits(outputs, inputs, chi):
            return []
        C = tuple(sorted(outputs))
        D = tuple(sorted(inputs))
        return [(C, D, chi, J, I)
                for J in iter_words(self.space.basis.names, len(C))
                for I in iter_words(self.space.basis.names, len(D))]

    def corolla(self, key):
        C, D = key[0], key[1]
        return frozenset(C), frozenset(D)

    def chi(self, key):
        return key[2]

    def degree(self, key):
        _, _, _, J, I = key
        return self.space.basis.word_degree(J) - self.space.basis.word_degree(I)

    def act(self, rho, sigma, key):
        C, D, chi, J, I = key
        elem, C2, D2 = relabel_element(self.space, {(J, I): Fraction(1)}, C, D, rho, sigma)
        return {(C2, D2, chi, J2, I2): c for (J2, I2), c in elem.items()}

    def compose(self, xkey, ykey, eta):
        C1, D1, chi1, J1, I1 = xkey
        C2, D2, chi2, J2, I2 = ykey
        elem, C_res, D_res = compose_elements(
            self.space, {(J1, I1): Fraction(1)}, C1, D1,
            {(J2, I2): Fraction(1)}, C2, D2, eta)
        chi = self.chi_law(chi1, chi2, eta)
        return {(C_res, D_res, chi, J, I): c for (J, I), c in elem.items()}

    def differential(self, key):
        C, D, chi, J, I = key
        elem = element_differential(self.space, {(J, I): Fraction(1)}, C, D)
        return {(C, D, chi, J2, I2): c for (J2, I2), c in elem.items()}


class SignMutation(Properad):
    """Wrapper flipping the sign of compositions matched by `predicate`;
    used as the deliberately-broken fixture in mutation tests."""

    name = "mutated"

    def __init__(self, inner, predicate):
        self.inner = inner
        self.predicate = predicate
        self.generalized = inner.generalized

    def basis(self, outputs, inputs, chi):
        return self.inner.basis(outputs, inputs, chi)

    def corolla(self, key):
        return self.inner.corolla(key)

    def chi(self, key):
        return self.inner.chi(key)

    def degree(self, key):
        return self.inner.degree(key)

    def act(self, rho, sigma, key):
        return self.inner.act(rho, sigma, key)

    def compose(self, xkey, ykey, eta):
        combo = self.inner.compose(xkey, ykey, eta)
        if self.predicate(xkey, ykey, eta):
            combo = {k: -c for k, c in combo.items()}
        return combo

    def differential(self, key):
        return self.inner.differential(key)


# ---------------------------------------------------------------------------
# axiom checkers
# ---------------------------------------------------------------------------

OUT_POOL = tuple("u%d" % i for i in range(1, 9))
IN_POOL = tuple("w%d" % i for i in range(1, 9))
ALT_OUT = tuple("U%d" % i for i in range(1, 9))
ALT_IN = tuple("W%d" % i for i in range(1, 9))


def _bijections(src, dst):
    src = tuple(sorted(src))
    for img in permutations(sorted(dst), len(src)):
        yield dict(zip(src, img))


def _subsets(pool, size):
    from itertools import combinations
    return list(combinations(pool, size))


def check_sigma_bimodule(P, size_bound, chi_bound, include_renames=True):
    """Axiom 1: P(id) = id and P(rho.rho', sigma.sigma') = P(rho,sigma) P(rho',sigma')
    for all corollas with |C|, |D| <= size_bound and chi <= chi_bound."""
    violations = []
    for nc in range(size_bound + 1):
        for nd in range(size_bound + 1):
            C = frozenset(OUT_POOL[:nc])
            D = frozenset(IN_POOL[:nd])
            for chi in range(0, chi_bound + 1):
                keys = P.basis(C, D, chi)
                if not keys:
                    continue
                targets = [(C, D)]
                if include_renames:
                    targets.append((frozenset(ALT_OUT[:nc]), frozenset(ALT_IN[:nd])))
                for key in keys:
                    ident = P.act({c: c for c in C}, {d: d for d in D}, key)
                    if ident != {key: Fraction(1)}:
                        violations.append({"axiom": 1, "case": "identity",
                                           "key": key, "got": ident})
                for C1, D1 in targets:
                    for rho1 in _bijections(C, C1):
                        for sigma1 in _bijections(D, D1):
                            for rho2 in _bijections(C1, C1):
                                for sigma2 in _bijections(D1, D1):
                                    rho = {c: rho2[rho1[c]] for c in C}
                                    sigma = {d: sigma2[sigma1[d]] for d in D}
                                    for key in keys:
                                        lhs = P.act(rho, sigma, key)
                                        rhs = P.act_combo(rho2, sigma2,
                                                          P.act(rho1, sigma1, key))
                                        if lhs != rhs:
                                            violations.append({
                                                "axiom": 1, "case": "composition",
                                                "key": key, "rho": (rho1, rho2),
                                                "sigma": (sigma1, sigma2)})
    return violations


def _composition_shapes(size_bound, total_segments=None, glue_max=None):
    """Corolla pairs (C1, D1+B) x (C2+A, D2) with all label sets from fixed
    pools, every participating arity <= size_bound."""
    shapes = []
    glue_pool_b = tuple("b%d" % i for i in range(1, 5))
    glue_pool_a = tuple("a%d" % i for i in range(1, 5))
    for nc1 in range(size_bound + 1):
        for nd1 in range(size_bound + 1):
            for nc2 in range(size_bound + 1):
                for nd2 in range(size_bound + 1):
                    kmax = glue_max if glue_max is not None else size_bound
                    for k in range(1, kmax + 1):
                        if nd1 + k > size_bound or nc2 + k > size_bound:
                            continue
                        if nc1 + nc2 > size_bound or nd1 + nd2 > size_bound:
                            continue
                        total = nc1 + nd1 + nc2 + nd2 + 2 * k
                        if total_segments is not None and total > total_segments:
                            continue
                        C1 = frozenset(OUT_POOL[:nc1])
                        D1 = frozenset(IN_POOL[:nd1])
                        C2 = frozenset(OUT_POOL[4:4 + nc2])
                        D2 = frozenset(IN_POOL[4:4 + nd2])
                        B = frozenset(glue_pool_b[:k])
                        A = frozenset(glue_pool_a[:k])
                        shapes.append((C1, D1, C2, D2, B, A))
    return shapes


def check_equivariance(P, size_bound, chi_bound, total_segments=None,
                       max_cases=None):
    """Axiom 2 on exhaustive small decompositions within the bounds."""
    violations = []
    cases = 0
    for C1, D1, C2, D2, B, A in _composition_shapes(size_bound, total_segments):
        left_corolla = (C1, D1 | B)
        right_corolla = (C2 | A, D2)
        for chi1 in range(0, chi_bound + 1):
            xs = P.basis(left_corolla[0], left_corolla[1], chi1)
            if not xs:
                continue
            for chi2 in range(0, chi_bound + 1):
                ys = P.basis(right_corolla[0], right_corolla[1], chi2)
                if not ys:
                    continue
                for eta in _bijections(B, A):
                    for rho1 in _bijections(C1, C1):
                        for sigma1 in _bijections(D1 | B, D1 | B):
                            if set(sigma1[b] for b in B) != set(B):
                                # relabeling may move glued labels anywhere;
                                # keep the block structure enumerable
                                pass
                            for rho2 in _bijections(C2 | A, C2 | A):
                                for sigma2 in _bijections(D2, D2):
                                    cases += 1
                                    if max_cases and cases > max_cases:
                                        return violations
                                    bad = _equivariance_case(
                                        P, xs, ys, eta, C1, D1, C2, D2, B, A,
                                        rho1, sigma1, rho2, sigma2)
                                    violations.extend(bad)
    return violations


def _equivariance_case(P, xs, ys, eta, C1, D1, C2, D2, B, A,
                       rho1, sigma1, rho2, sigma2):
    violations = []
    new_B = frozenset(sigma1[b] for b in B)
    new_A = frozenset(rho2[a] for a in A)
    eta2 = {sigma1[b]: rho2[eta[b]] for b in B}
    rho = dict(rho1)
    rho.update({c: rho2[c] for c in C2})
    sigma = {d: sigma1[d] for d in D1}
    sigma.update(sigma2)
    for x in xs:
        for y in ys:
            lhs = P.act_combo(rho, sigma, P.compose(x, y, eta))
            xa = P.act(rho1, sigma1, x)
            ya = P.act(rho2, sigma2, y)
            rhs = P.compose_combo(xa, ya, eta2)
            if lhs != rhs:
                violations.append({
                    "axiom": 2, "x": x, "y": y, "eta": eta,
                    "rho1": rho1, "sigma1": sigma1,
                    "rho2": rho2, "sigma2": sigma2,
                    "lhs": lhs, "rhs": rhs})
    return violations


def _triple_shapes(size_bound, total_segments=None):
    """Label shapes for three factors x, y, z with gluings x->y, y->z, x->z."""
    shapes = []
    for k_xy in range(0, 3):
        for k_yz in range(0, 3):
            for k_xz in range(0, 3):
                if k_xy + k_yz + k_xz == 0 or k_xy + k_yz + k_xz > 3:
                    continue
                for nc1 in range(size_bound + 1):
                    for nd3 in range(size_bound + 1):
                        # x: outputs C1, inputs Bxy + Bxz
                        # y: outputs Axy + Cy_extra(0), inputs Byz
                        # z: outputs Ayz + Axz, inputs D3
                        if k_xy + k_xz > size_bound or nd3 > size_bound:
                            continue
                        if k_yz > size_bound or k_xy > size_bound:
                            continue
                        if k_yz + k_xz > size_bound:
                            continue
                        total = nc1 + nd3 + 2 * (k_xy + k_yz + k_xz)
                        if total_segments is not None and total > total_segments:
                            continue
                        shapes.append((nc1, nd3, k_xy, k_yz, k_xz))
    return shapes


def check_associativity(P, size_bound, chi_bound, total_segments=None,
                        max_cases=None):
    """Axiom 3, all written clauses:

    - main: (x o y) o z = x o (y o z) when x-y and y-z gluings are nonempty
      (the x-z gluing may be empty or not);
    - x-y empty: x o (y o z) = (-1)^{|x||y|} y o (x o z);
    - y-z empty: (x o y) o z = (-1)^{|y||z|} (x o z) o y.
    """
    violations = []
    cases = 0
    for nc1, nd3, k_xy, k_yz, k_xz in _triple_shapes(size_bound, total_segments):
        Bxy = frozenset("p%d" % i for i in range(1, k_xy + 1))
        Axy = frozenset("q%d" % i for i in range(1, k_xy + 1))
        Byz = frozenset("r%d" % i for i in range(1, k_yz + 1))
        Ayz = frozenset("s%d" % i for i in range(1, k_yz + 1))
        Bxz = frozenset("t%d" % i for i in range(1, k_xz + 1))
        Axz = frozenset("v%d" % i for i in range(1, k_xz + 1))
        Cx = frozenset(OUT_POOL[:nc1])
        Dz = frozenset(IN_POOL[:nd3])
        x_cor = (Cx, Bxy | Bxz)
        y_cor = (Axy, Byz)
        z_cor = (Ayz | Axz, Dz)
        for chi1 in range(0, chi_bound + 1):
            xs = P.basis(x_cor[0], x_cor[1], chi1)
            if not xs:
                continue
            for chi2 in range(0, chi_bound + 1):
                ys = P.basis(y_cor[0], y_cor[1], chi2)
                if not ys:
                    continue
                for chi3 in range(0, chi_bound + 1):
                    zs = P.basis(z_cor[0], z_cor[1], chi3)
                    if not zs:
                        continue
                    for g_xy in _bijections(Bxy, Axy):
                        for g_yz in _bijections(Byz, Ayz):
                            for g_xz in _bijections(Bxz, Axz):
                                cases += 1
                                if max_cases and cases > max_cases:
                                    return violations
                                violations.extend(_associativity_case(
                                    P, xs, ys, zs, g_xy, g_yz, g_xz))
    return violations


def _associativity_case(P, xs, ys, zs, g_xy, g_yz, g_xz):
    violations = []
    for x in xs:
        for y in ys:
            for z in zs:
                sx, sy, sz = P.degree(x), P.degree(y), P.degree(z)
                if g_xy and g_yz:
                    lhs = P.compose_combo(P.compose(x, y, g_xy), {z: Fraction(1)},
                                          {**g_yz, **g_xz})
                    rhs = P.compose_combo({x: Fraction(1)}, P.compose(y, z, g_yz),
                                          {**g_xy, **g_xz})
                    if lhs != rhs:
                        violations.append({"axiom": 3, "clause": "main",
                                           "x": x, "y": y, "z": z,
                                           "eta": (g_xy, g_yz, g_xz),
                                           "lhs": lhs, "rhs": rhs})
                elif not g_xy and g_yz and g_xz:
                    lhs = P.compose_combo({x: Fraction(1)}, P.compose(y, z, g_yz), g_xz)
                    rhs = P.compose_combo({y: Fraction(1)}, P.compose(x, z, g_xz), g_yz)
                    sign = -1 if (sx % 2) and (sy % 2) else 1
                    rhs = {k: sign * c for k, c in rhs.items()}
                    if lhs != rhs:
                        violations.append({"axiom": 3, "clause": "A1B1-empty",
                                           "x": x, "y": y, "z": z,
                                           "eta": (g_yz, g_xz),
                                           "lhs": lhs, "rhs": rhs})
                elif not g_yz and g_xy and g_xz:
                    lhs = P.compose_combo(P.compose(x, y, g_xy), {z: Fraction(1)}, g_xz)
                    rhs = P.compose_combo(P.compose(x, z, g_xz), {y: Fraction(1)}, g_xy)
                    sign = -1 if (sy % 2) and (sz % 2) else 1
                    rhs = {k: sign * c for k, c in rhs.items()}
                    if lhs != rhs:
                        violations.append({"axiom": 3, "clause": "A2B2-empty",
                                           "x": x, "y": y, "z": z,
                                           "eta": (g_xy, g_xz),
                                           "lhs": lhs, "rhs": rhs})
    return violations


# ---------------------------------------------------------------------------
# skeletalization (Def. of the skeletal composition via conjugation)
# ---------------------------------------------------------------------------

def skeletal_labels(m, n):
    return (tuple(("o", i) for i in range(m)), tuple(("i", j) for j in range(n)))


def skeletal_compose(P, x, y, N, M, xi, choices=None):
    """Compose skeletal elements via arbitrary corolla embeddings.

    x lives on ([m1], [n1 + |N|]) with glued input positions N, y on
    ([m2 + |M|], [n2]) with glued output positions M, xi: N -> M.  `choices`
    optionally supplies the bijections (kappa1, lambda1, kappa2, lambda2) as
    label maps onto fresh corollas; the result is independent of them.
    The surviving positions are renumbered increasingly: x's outputs first,
    then y's; y's inputs first, then x's.
    """
    (Cx, Dx) = P.corolla(x)
    (Cy, Dy) = P.corolla(y)
    m1, n1k = len(Cx), len(Dx)
    m2k, n2 = len(Cy), len(Dy)
    N, M = sorted(N), sorted(M)
    k = len(N)
    if choices is None:
        kappa1 = {("o", i): ("L", "o", i) for i in range(m1)}
        lam1 = {("i", j): ("L", "i", j) for j in range(n1k)}
        kappa2 = {("o", i): ("R", "o", i) for i in range(m2k)}
        lam2 = {("i", j): ("R", "i", j) for j in range(n2)}
    else:
        kappa1, lam1, kappa2, lam2 = choices
    xa = P.act_combo(kappa1, lam1, {x: Fraction(1)})
    ya = P.act_combo(kappa2, lam2, {y: Fraction(1)})
    eta = {lam1[("i", p)]: kappa2[("o", xi[p])] for p in N}
    composed = {}
    for xk, xc in xa.items():
        for yk, yc in ya.items():
            for key, c in P.compose(xk, yk, eta).items():
                add_to(composed, key, xc * yc * c)
    # renumber the result: x outputs, then surviving y outputs; y inputs,
    # then surviving x inputs
    rho = {kappa1[("o", i)]: ("o", i) for i in range(m1)}
    surv_out = [i for i in range(m2k) if i not in set(xi[p] for p in N)]
    for t, i in enumerate(surv_out):
        rho[kappa2[("o", i)]] = ("o", m1 + t)
    sigma = {lam2[("i", j)]: ("i", j) for j in range(n2)}
    surv_in = [p for p in range(n1k) if p not in set(N)]
    for t, p in enumerate(surv_in):
        sigma[lam1[("i", p)]] = ("i", n2 + t)
    return P.act_combo(rho, sigma, composed)
