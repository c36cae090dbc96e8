"""Brute-force reference values, written without the package.

Sets are materialised as Python sets, operators act on dict vectors with
Fraction coefficients, and norms are returned as exact p-th powers.
"""

from fractions import Fraction as F

HALF = F(1, 2)
MAX_S = 12


def ex43_sets():
    C, D, E = set(), set(), set()
    for s in range(MAX_S):
        top = 2 ** (2 * s + 1)
        C.update(range(top - (2 * s + 1), top))
        D.update(range(top, top + 2 * s + 1))
        E.add(-top)
    return C, D, E


C_SET, D_SET, E_SET = ex43_sets()


def ex43_a(k, n):
    if n in C_SET:
        return HALF if k <= n else F(1)
    if n in D_SET:
        return F(2) if k <= n else F(1)
    if n in E_SET:
        return F(2) if k <= -n else F(1)
    return F(1)


def ex43_prod(k, lo, hi, inverse=False):
    out = F(1)
    for v in range(lo, hi + 1):
        out *= 1 / ex43_a(k, v) if inverse else ex43_a(k, v)
    return out


def ex43_schedule(K=5):
    return [2 ** (2 * k + 1) for k in range(1, K + 1)]


def ex43_basis_products(K=5):
    """The three norms at f_0 along the schedule."""
    rows = []
    for k, n in enumerate(ex43_schedule(K), 1):
        rows.append({
            "k": k,
            "n": n,
            "neg_inverse": ex43_prod(0, -n, -1, inverse=True),
            "pos": ex43_prod(0, 1, n),
            "pos_double": ex43_prod(0, 1, 2 * n),
        })
    return rows


# first five indices of N x Z in diagonal order
GRID_PREFIX = [(0, 0), (0, 1), (1, 0), (0, -1), (1, 1)]


def ex43_dsc_maxima(K=5, r=(1, 2)):
    """Largest value of each supercyclicity family on window I_k = GRID_PREFIX[:k].

    ``T e_(i, j) = a(i, j) e_(i, j+1)``; ``S e_(i, j) = a(i, j-1)^{-1} e_(i, j-1)``.
    """
    out = []
    for k, n in enumerate(ex43_schedule(K), 1):
        W = GRID_PREFIX[:k]
        fwd = {(l, w): ex43_prod(w[0], w[1] - r[l] * n, w[1] - 1, inverse=True) for l in (0, 1) for w in W}
        bwd = {(l, w): ex43_prod(w[0], w[1], w[1] + r[l] * n - 1) for l in (0, 1) for w in W}
        row = {"k": k}
        for l in (0, 1):
            for s in (0, 1):
                row[f"(H1), l={l + 1}, s={s + 1}"] = max(fwd[(l, a)] * bwd[(s, b)] for a in W for b in W)
            row[f"(H1)-backward, l={l + 1}"] = max(bwd[(l, w)] for w in W)
        d = (r[1] - r[0]) * n
        # T^{2n} S^{n} e_(i,j) and T^{n} S^{2n} e_(i,j), term by term
        row["(H2)(i), s=1, l=2"] = max(
            ex43_prod(i, j - n, j - 1, inverse=True) * ex43_prod(i, j - n, j + d - 1) for i, j in W)
        row["(H2)(ii), s=1, l=2"] = max(
            ex43_prod(i, j - 2 * n, j - 1, inverse=True) * ex43_prod(i, j - 2 * n, j - d - 1) for i, j in W)
        out.append(row)
    return out


def tree_lambda(v, s1=2, s2=2):
    return F(s1) ** (-v) if v >= 0 else F(s2) ** v


def tree_apply(vec, step):
    """Move every coefficient ``step`` places along the path (unit weights)."""
    return {v + step: c for v, c in vec.items()}


def tree_h2_first_pth_power(n, p=2):
    """||T_2^{2n} S_1^{n} e_0||^p where S_1 moves to the parent and T_2 two children down."""
    vec = {0: F(1)}
    vec = tree_apply(vec, n)
    vec = tree_apply(vec, -2 * 2 * n)
    return sum(abs(c) ** p * tree_lambda(v) for v, c in vec.items())
