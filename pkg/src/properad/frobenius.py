"""Closed, open and open-closed Frobenius generators and their gluings.

Open surfaces are symbols (genus, output boundary cycles, input boundary
cycles); gluing inputs of one surface to outputs of another runs the
boundary-cycle walk: mixed cycles are traced through the glued pairs and then
split into a pure output and a pure input cycle each.  Genus bookkeeping is
an Euler-characteristic ledger: one -1 on chi_top per glued segment pair and
one -1 per mixed cycle produced (empty mixed cycles included).
"""

from .cycles import Cycle, check_bijection, invert_bijection


class GluingError(ValueError):
    """Ill-formed gluing instruction."""


class UnstableComposition(GluingError):
    """The glued generator violates the stability bound chi > 0."""


class LedgerError(RuntimeError):
    """The Euler ledger produced a negative or non-integer genus."""


# ---------------------------------------------------------------------------
# closed Frobenius generators
# ---------------------------------------------------------------------------

class ClosedGenerator:
    """One surface generator of the closed Frobenius properad.

    chi = 2g + |outputs| + |inputs| - 2 with g the geometric genus.
    """

    __slots__ = ("outputs", "inputs", "chi")

    def __init__(self, outputs, inputs, chi):
        outputs = frozenset(outputs)
        inputs = frozenset(inputs)
        if outputs & inputs:
            raise ValueError("outputs and inputs must be disjoint")
        chi = int(chi)
        if (chi - len(outputs) - len(inputs)) % 2:
            raise ValueError("chi has wrong parity for this corolla")
        if chi - len(outputs) - len(inputs) + 2 < 0:
            raise ValueError("negative genus")
        self.outputs = outputs
        self.inputs = inputs
        self.chi = chi

    @property
    def genus(self):
        return (self.chi - len(self.outputs) - len(self.inputs) + 2) // 2

    def key(self):
        return ("closed", tuple(sorted(self.outputs)), tuple(sorted(self.inputs)), self.chi)

    def __eq__(self, other):
        return isinstance(other, ClosedGenerator) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "ClosedGenerator(C=%s, D=%s, chi=%d)" % (
            sorted(self.outputs), sorted(self.inputs), self.chi)

    def relabel(self, rho, sigma):
        return ClosedGenerator({rho[c] for c in self.outputs},
                               {sigma[d] for d in self.inputs}, self.chi)


def closed_compose(left, right, eta):
    """Glue inputs B of `left` to outputs A of `right`; chi is additive."""
    check_bijection(eta)
    if not eta:
        raise GluingError("gluing sets must be nonempty")
    bset, aset = set(eta), set(eta.values())
    if not bset <= left.inputs:
        raise GluingError("glued labels not among left inputs")
    if not aset <= right.outputs:
        raise GluingError("glued labels not among right outputs")
    if (left.outputs | left.inputs) & (right.outputs | right.inputs):
        raise GluingError("label sets of the two factors overlap")
    return ClosedGenerator(left.outputs | (right.outputs - aset),
                           (left.inputs - bset) | right.inputs,
                           left.chi + right.chi)


# ---------------------------------------------------------------------------
# open Frobenius generators
# ---------------------------------------------------------------------------

def _as_cycles(cycles):
    out = []
    for c in cycles:
        out.append(c if isinstance(c, Cycle) else Cycle(c))
    return tuple(sorted(out))


class OpenSurface:
    """Genus plus output/input boundary cycles; empty cycles may repeat.

    G = 2g + b - 1 with b the number of boundary cycles (empty ones count),
    chi = 2G + |outputs| + |inputs| - 2.
    """

    __slots__ = ("genus", "out_cycles", "in_cycles")

    def __init__(self, genus, out_cycles, in_cycles):
        genus = int(genus)
        if genus < 0:
            raise ValueError("genus must be nonnegative")
        out_cycles = _as_cycles(out_cycles)
        in_cycles = _as_cycles(in_cycles)
        seen = set()
        for c in out_cycles + in_cycles:
            for lab in c:
                if lab in seen:
                    raise ValueError("cycles are not disjoint at %r" % (lab,))
                seen.add(lab)
        self.genus = genus
        self.out_cycles = out_cycles
        self.in_cycles = in_cycles

    @property
    def outputs(self):
        return frozenset(x for c in self.out_cycles for x in c)

    @property
    def inputs(self):
        return frozenset(x for c in self.in_cycles for x in c)

    @property
    def boundaries(self):
        return len(self.out_cycles) + len(self.in_cycles)

    @property
    def G(self):
        return 2 * self.genus + self.boundaries - 1

    @property
    def chi(self):
        return 2 * self.G + len(self.outputs) + len(self.inputs) - 2

    @property
    def chi_top(self):
        """Topological Euler characteristic 2 - 2g - b."""
        return 2 - 2 * self.genus - self.boundaries

    def key(self):
        return ("open", self.genus,
                tuple(c.word for c in self.out_cycles),
                tuple(c.word for c in self.in_cycles))

    def __eq__(self, other):
        return isinstance(other, OpenSurface) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "OpenSurface(g=%d, out=%s, in=%s)" % (
            self.genus,
            [list(c) for c in self.out_cycles],
            [list(c) for c in self.in_cycles])

    def relabel(self, rho, sigma):
        outs = [Cycle(rho[x] for x in c) for c in self.out_cycles]
        ins = [Cycle(sigma[x] for x in c) for c in self.in_cycles]
        return OpenSurface(self.genus, outs, ins)


def stability_check(gen):
    return gen.chi > 0


# ---------------------------------------------------------------------------
# the gluing walk
# ---------------------------------------------------------------------------

class _WalkContext:
    """Successor/partner bookkeeping for one gluing instruction."""

    def __init__(self, left, right, eta):
        check_bijection(eta)
        if not eta:
            raise GluingError("gluing sets must be nonempty")
        bset, aset = set(eta), set(eta.values())
        if not bset <= left.inputs:
            raise GluingError("glued labels not among left inputs")
        if not aset <= right.outputs:
            raise GluingError("glued labels not among right outputs")
        left_labels = left.outputs | left.inputs
        right_labels = right.outputs | right.inputs
        if left_labels & right_labels:
            raise GluingError("label sets of the two factors overlap")

        self.partner = dict(eta)
        self.partner.update(invert_bijection(eta))
        self.glued = bset | aset
        self.succ = {}
        self.touched_left = []
        self.touched_right = []
        self.untouched = {"out": [], "in": []}
        for surf, touched, sides in ((left, self.touched_left, ("out", "in")),
                                     (right, self.touched_right, ("out", "in"))):
            for kind, cycles in zip(sides, (surf.out_cycles, surf.in_cycles)):
                for cyc in cycles:
                    labs = cyc.labels()
                    if labs & self.glued:
                        touched.append(cyc)
                        for lab in cyc:
                            self.succ[lab] = cyc.successor(lab)
                    else:
                        self.untouched[kind].append(cyc)
        self.out_labels = (left.outputs | right.outputs) - self.glued
        self.in_labels = (left.inputs | right.inputs) - self.glued

    def walk_from(self, start, consumed):
        """Trace one mixed cycle starting at a non-glued segment."""
        seq = [start]
        x = start
        while True:
            y = self.succ[x]
            while y in self.glued:
                consumed.add(y)
                y = self.succ[self.partner[y]]
            if y == start:
                return tuple(seq)
            seq.append(y)
            x = y

    def empty_chain_from(self, start, consumed):
        """Consume one closed chain of glued segments (an empty mixed cycle)."""
        y = start
        while True:
            consumed.add(y)
            y = self.succ[self.partner[y]]
            if y == start:
                return
            if y not in self.glued:
                raise LedgerError("glued chain escaped through %r" % (y,))


def trace_mixed_cycles(left, right, eta, start_order=None):
    """All mixed cycles of the gluing, plus the count of empty mixed cycles.

    Returns (mixed, empties, stats) where `mixed` is a sorted tuple of Cycle
    over the surviving segments, `empties` counts mixed cycles with no
    surviving segment, and `stats` holds the ledger ingredients.  The result
    does not depend on `start_order` (a list of seed segments used to vary
    the visitation order in tests).
    """
    ctx = _WalkContext(left, right, eta)
    seeds = [lab for cyc in ctx.touched_left + ctx.touched_right
             for lab in cyc if lab not in ctx.glued]
    if start_order is not None:
        order = [s for s in start_order if s in seeds]
        order += [s for s in seeds if s not in order]
        seeds = order
    consumed = set()
    recorded = set()
    mixed = []
    for seed in seeds:
        if seed in recorded:
            continue
        seq = ctx.walk_from(seed, consumed)
        recorded.update(seq)
        mixed.append(Cycle(seq))
    empties = 0
    for lab in sorted(ctx.glued, key=str):
        if lab not in consumed:
            ctx.empty_chain_from(lab, consumed)
            empties += 1
    stats = {
        "pairs": len(eta),
        "mixed": len(mixed) + empties,
        "touched_left": len(ctx.touched_left),
        "touched_right": len(ctx.touched_right),
        "out_labels": ctx.out_labels,
        "in_labels": ctx.in_labels,
        "untouched_out": tuple(sorted(ctx.untouched["out"])),
        "untouched_in": tuple(sorted(ctx.untouched["in"])),
    }
    return tuple(sorted(mixed)), empties, stats


def split_mixed_cycle(mixed, out_labels):
    """Split a mixed cycle into its output and input subcycles.

    The subwords keep the cyclic order of the mixed cycle; an empty mixed
    cycle splits into one empty output and one empty input cycle.
    """
    word = mixed.word if isinstance(mixed, Cycle) else tuple(mixed)
    outs = tuple(x for x in word if x in out_labels)
    ins = tuple(x for x in word if x not in out_labels)
    return Cycle(outs), Cycle(ins)


def open_glue(left, right, eta, genus_rule="ledger"):
    """Glue inputs B of `left` to outputs A of `right` per `eta`.

    genus_rule "ledger" is the certified Euler-characteristic convention;
    "paper-verbal" applies the verbal rule (sum of genera plus number of
    distinct glued boundary pairs) and is exposed for comparison only.
    """
    mixed, empties, stats = trace_mixed_cycles(left, right, eta)
    out_cycles = list(stats["untouched_out"])
    in_cycles = list(stats["untouched_in"])
    splits = _place_traced_cycles(mixed, empties, stats["out_labels"],
                                  out_cycles, in_cycles)

    if genus_rule == "ledger":
        chi_top = left.chi_top + right.chi_top - stats["pairs"] - splits
        b = len(out_cycles) + len(in_cycles)
        twice_g = 2 - chi_top - b
        if twice_g < 0 or twice_g % 2:
            raise LedgerError("ledger genus %s/2 is not a nonnegative integer" % twice_g)
        genus = twice_g // 2
    elif genus_rule == "paper-verbal":
        genus = left.genus + right.genus + _distinct_boundary_pairs(left, right, eta)
    else:
        raise ValueError("unknown genus rule %r" % (genus_rule,))

    result = OpenSurface(genus, out_cycles, in_cycles)
    if not stability_check(result):
        raise UnstableComposition("glued surface has chi = %d" % result.chi)
    return result


def _place_traced_cycles(mixed, empties, out_labels, out_cycles, in_cycles):
    """Sort the traced cycles into the result's boundary lists.

    Only genuinely mixed cycles (both kinds of segment) are split, and every
    empty traced cycle splits into an empty output and an empty input cycle.
    A traced cycle of one kind only is already pure and is kept whole.
    Returns the number of splits performed (the ledger cost besides the
    glued pairs).
    """
    splits = 0
    for cyc in mixed:
        o, i = split_mixed_cycle(cyc, out_labels)
        if len(o) and len(i):
            out_cycles.append(o)
            in_cycles.append(i)
            splits += 1
        elif len(o):
            out_cycles.append(o)
        else:
            in_cycles.append(i)
    for _ in range(empties):
        out_cycles.append(Cycle(()))
        in_cycles.append(Cycle(()))
        splits += 1
    return splits


def _distinct_boundary_pairs(left, right, eta):
    def cycle_of(surf, lab):
        for cyc in surf.out_cycles + surf.in_cycles:
            if lab in cyc.labels():
                return cyc
        raise GluingError("label %r not on any boundary" % (lab,))

    pairs = {(cycle_of(left, b), cycle_of(right, a)) for b, a in eta.items()}
    return len(pairs)


# ---------------------------------------------------------------------------
# open-closed generators (2-colored)
# ---------------------------------------------------------------------------

class OpenClosedGenerator:
    """Surface with open boundary cycles plus closed punctures in the interior.

    2G = 4g + 2b + |closed outputs| + |closed inputs| - 2 (G may be a
    half-integer, so it is stored doubled), and
    chi = 2G + |open outputs| + |open inputs| + |closed| - 2.
    """

    __slots__ = ("genus", "out_cycles", "in_cycles", "closed_out", "closed_in")

    def __init__(self, genus, out_cycles, in_cycles, closed_out, closed_in):
        surf = OpenSurface(genus, out_cycles, in_cycles)
        closed_out = frozenset(closed_out)
        closed_in = frozenset(closed_in)
        open_labels = surf.outputs | surf.inputs
        if (closed_out & closed_in) or (open_labels & (closed_out | closed_in)):
            raise ValueError("open/closed label sets must be pairwise disjoint")
        self.genus = surf.genus
        self.out_cycles = surf.out_cycles
        self.in_cycles = surf.in_cycles
        self.closed_out = closed_out
        self.closed_in = closed_in

    @property
    def open_part(self):
        return OpenSurface(self.genus, self.out_cycles, self.in_cycles)

    @property
    def boundaries(self):
        return len(self.out_cycles) + len(self.in_cycles)

    @property
    def two_G(self):
        return (4 * self.genus + 2 * self.boundaries
                + len(self.closed_out) + len(self.closed_in) - 2)

    @property
    def chi(self):
        labels = (len(self.open_part.outputs) + len(self.open_part.inputs)
                  + len(self.closed_out) + len(self.closed_in))
        return self.two_G + labels - 2

    def key(self):
        return ("oc", self.genus,
                tuple(c.word for c in self.out_cycles),
                tuple(c.word for c in self.in_cycles),
                tuple(sorted(self.closed_out)), tuple(sorted(self.closed_in)))

    def __eq__(self, other):
        return isinstance(other, OpenClosedGenerator) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "OpenClosedGenerator(g=%d, out=%s, in=%s, c_out=%s, c_in=%s)" % (
            self.genus, [list(c) for c in self.out_cycles],
            [list(c) for c in self.in_cycles],
            sorted(self.closed_out), sorted(self.closed_in))


def oc_compose(left, right, eta_open, eta_closed):
    """Glue open inputs to open outputs and closed inputs to closed outputs.

    Closed punctures carry no cycle structure, so eta_closed is a pure
    pairing; every glued closed pair lowers chi_top by 2.
    """
    check_bijection(eta_closed)
    b_c, a_c = set(eta_closed), set(eta_closed.values())
    if not b_c <= left.closed_in:
        raise GluingError("glued closed labels not among left closed inputs")
    if not a_c <= right.closed_out:
        raise GluingError("glued closed labels not among right closed outputs")
    open_b = set(eta_open)
    if (open_b & (left.closed_in | left.closed_out)) or \
            (set(eta_open.values()) & (right.closed_in | right.closed_out)):
        raise GluingError("gluing pair mixes colors")
    if not eta_open and not eta_closed:
        raise GluingError("gluing sets must be nonempty")

    lsurf, rsurf = left.open_part, right.open_part
    if eta_open:
        mixed, empties, stats = trace_mixed_cycles(lsurf, rsurf, eta_open)
        out_cycles = list(stats["untouched_out"])
        in_cycles = list(stats["untouched_in"])
        splits = _place_traced_cycles(mixed, empties, stats["out_labels"],
                                      out_cycles, in_cycles)
        open_cost = stats["pairs"] + splits
    else:
        out_cycles = list(lsurf.out_cycles) + list(rsurf.out_cycles)
        in_cycles = list(lsurf.in_cycles) + list(rsurf.in_cycles)
        open_cost = 0

    chi_top = lsurf.chi_top + rsurf.chi_top - open_cost - 2 * len(eta_closed)
    b = len(out_cycles) + len(in_cycles)
    twice_g = 2 - chi_top - b
    if twice_g < 0 or twice_g % 2:
        raise LedgerError("ledger genus %s/2 is not a nonnegative integer" % twice_g)

    result = OpenClosedGenerator(
        twice_g // 2, out_cycles, in_cycles,
        left.closed_out | (right.closed_out - a_c),
        (left.closed_in - b_c) | right.closed_in)
    if not stability_check(result):
        raise UnstableComposition("glued generator has chi = %d" % result.chi)
    return result


# ---------------------------------------------------------------------------
# basis enumeration (used by the cobar differential and the axiom checkers)
# ---------------------------------------------------------------------------

def cycle_partitions(labels):
    """All partitions of a label set into nonempty cycles.

    Permutations of the set correspond bijectively to such partitions via
    their cycle decomposition.
    """
    labels = sorted(labels, key=str)
    if not labels:
        return [()]
    from itertools import permutations as _perms
    seen = set()
    out = []
    for perm in _perms(range(len(labels))):
        rest = set(range(len(labels)))
        cycles = []
        while rest:
            start = min(rest)
            cyc = [start]
            rest.remove(start)
            nxt = perm[start]
            while nxt != start:
                cyc.append(nxt)
                rest.remove(nxt)
                nxt = perm[nxt]
            cycles.append(Cycle(labels[i] for i in cyc))
        key = tuple(sorted(cycles))
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def open_surfaces(outputs, inputs, chi, allow_empty_cycles=True):
    """All open-surface basis elements on a corolla with the given chi."""
    outputs, inputs = frozenset(outputs), frozenset(inputs)
    budget = chi + 2 - len(outputs) - len(inputs)  # = 2G = 2(2g + b - 1)
    if budget < 0 or budget % 2:
        return []
    out = []
    for outs in cycle_partitions(outputs):
        for ins in cycle_partitions(inputs):
            base_b = len(outs) + len(ins)
            # 4g + 2(base_b + extra empties) - 2 = budget
            max_empty = 0
            while True:
                rem = budget + 2 - 2 * (base_b + max_empty)
                if rem < 0:
                    break
                max_empty += 1
            for empties in range(max_empty if allow_empty_cycles else 1):
                rem = budget + 2 - 2 * (base_b + empties)
                if rem < 0 or rem % 4:
                    continue
                g = rem // 4
                for empty_out in range(empties + 1):
                    cand = OpenSurface(
                        g,
                        list(outs) + [Cycle(())] * empty_out,
                        list(ins) + [Cycle(())] * (empties - empty_out))
                    if cand.chi == chi:
                        out.append(cand)
    return sorted(out, key=lambda s: s.key())
