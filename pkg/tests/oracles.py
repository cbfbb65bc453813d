"""Independent oracles used by the test suite.

The boundary-surgery oracle recomputes a gluing one splice at a time on
doubly-linked cyclic sequences, tracking chi and the boundary count through
elementary surface surgeries only.  It shares no code with the walk in
properad.frobenius beyond the Cycle value type.
"""

from properad.cycles import Cycle


def surgery_glue(left, right, eta):
    """Sequential-splice oracle for open gluing.

    Returns (genus, out_cycles, in_cycles) computed by applying the glued
    pairs one at a time: merging two distinct boundary circles costs one to
    chi_top and one boundary; splicing within one circle costs one to
    chi_top and adds a boundary; each genuinely mixed or empty circle is
    finally split by a band (chi_top minus one, boundary plus one).
    """
    circles = []  # entries: [labels, kind, touched]
    for surf in (left, right):
        for cyc in surf.out_cycles:
            circles.append([list(cyc), "out", False])
        for cyc in surf.in_cycles:
            circles.append([list(cyc), "in", False])
    chi_top = left.chi_top + right.chi_top
    boundaries = len(circles)

    for b_label in sorted(eta, key=str):
        a_label = eta[b_label]
        ib = _find(circles, b_label)
        ia = _find(circles, a_label)
        if ib != ia:
            cb, ca = circles[ib][0], circles[ia][0]
            merged = _after(cb, b_label) + _after(ca, a_label)
            circles = [c for k, c in enumerate(circles) if k not in (ib, ia)]
            circles.append([merged, None, True])
            chi_top -= 1
            boundaries -= 1
        else:
            circle = circles[ib][0]
            pb, pa = circle.index(b_label), circle.index(a_label)
            if pb < pa:
                one = circle[pb + 1:pa]
                two = circle[pa + 1:] + circle[:pb]
            else:
                one = circle[pa + 1:pb]
                two = circle[pb + 1:] + circle[:pa]
            circles = [c for k, c in enumerate(circles) if k != ib]
            circles.extend([[one, None, True], [two, None, True]])
            chi_top -= 1
            boundaries += 1

    out_labels = (left.outputs | right.outputs) - set(eta.values())
    outs, ins = [], []
    for circle, kind, touched in circles:
        if not touched:
            (outs if kind == "out" else ins).append(Cycle(circle))
            continue
        o = [x for x in circle if x in out_labels]
        i = [x for x in circle if x not in out_labels]
        if o and i:
            chi_top -= 1
            boundaries += 1
            outs.append(Cycle(o))
            ins.append(Cycle(i))
        elif o:
            outs.append(Cycle(o))
        elif i:
            ins.append(Cycle(i))
        else:
            chi_top -= 1
            boundaries += 1
            outs.append(Cycle(()))
            ins.append(Cycle(()))
    assert boundaries == len(outs) + len(ins)
    twice_g = 2 - chi_top - boundaries
    assert twice_g >= 0 and twice_g % 2 == 0, "oracle genus must be integral"
    return twice_g // 2, tuple(sorted(outs)), tuple(sorted(ins))


def _find(circles, label):
    for k, (circle, _, _) in enumerate(circles):
        if label in circle:
            return k
    raise ValueError("label %r on no circle" % (label,))


def _after(circle, label):
    i = circle.index(label)
    return circle[i + 1:] + circle[:i]


def brute_force_koszul(perm, degrees):
    """Sign by bubble-sorting adjacent transpositions, fully independent of
    the inversion-count implementation."""
    word = list(zip(perm, degrees))
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i][0] > word[i + 1][0]:
                if word[i][1] % 2 and word[i + 1][1] % 2:
                    sign = -sign
                word[i], word[i + 1] = word[i + 1], word[i]
                changed = True
    return sign
