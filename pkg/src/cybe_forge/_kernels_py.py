"""Integer-core rational kernels, pure-Python reference implementation.

A vector is a pair ``(den, nums)`` with ``den`` a positive int and ``nums``
a tuple of ints; it represents the rational vector ``nums / den``.  A matrix
is ``(den, rows)`` with ``rows`` a tuple of int tuples sharing the common
denominator.  Canonical form: ``den > 0`` and ``gcd(den, gcd(entries)) == 1``
(the content of the numerators is *not* stripped, only the factor shared
with the denominator).

The compiled twin ``_kernels_c`` implements the same API with the same
canonical outputs; ``tests/test_kernels.py`` pins the two to bit-equality.
"""

from math import gcd

BACKEND = "python"


def _content(nums):
    g = 0
    for a in nums:
        g = gcd(g, a)
        if g == 1:
            return 1
    return g


def vec_canon(den, nums):
    """Canonicalize ``nums/den``: positive denominator, shared factor removed."""
    if den < 0:
        den = -den
        nums = tuple(-a for a in nums)
    g = gcd(den, _content(nums))
    if g > 1:
        den //= g
        nums = tuple(a // g for a in nums)
    return den, tuple(nums)


def mat_canon(den, rows):
    if den < 0:
        den = -den
        rows = tuple(tuple(-a for a in row) for row in rows)
    g = den
    for row in rows:
        if g == 1:
            break
        g = gcd(g, _content(row))
    if g > 1:
        den //= g
        rows = tuple(tuple(a // g for a in row) for row in rows)
    return den, tuple(tuple(row) for row in rows)


def mat_vec(mden, rows, vden, nums):
    """Matrix-vector product ``(rows/mden) @ (nums/vden)``."""
    nz = [(j, x) for j, x in enumerate(nums) if x]
    out = []
    for row in rows:
        acc = 0
        for j, x in nz:
            a = row[j]
            if a:
                acc += a * x
        out.append(acc)
    return vec_canon(mden * vden, tuple(out))


def mat_mul(aden, arows, bden, brows):
    """Matrix product ``(arows/aden) @ (brows/bden)``; skips zero entries."""
    p = len(brows[0]) if brows else 0
    out = []
    for arow in arows:
        acc = [0] * p
        for k, a in enumerate(arow):
            if a:
                brow = brows[k]
                for j in range(p):
                    b = brow[j]
                    if b:
                        acc[j] += a * b
        out.append(tuple(acc))
    return mat_canon(aden * bden, tuple(out))


def bilinear(sden, entries, dim, xden, xnums, yden, ynums):
    """Apply a structure tensor: out[k] = sum entries (i,j,k,c) of c*x[i]*y[j]."""
    out = [0] * dim
    for i, j, k, c in entries:
        x = xnums[i]
        if not x:
            continue
        y = ynums[j]
        if not y:
            continue
        out[k] += c * x * y
    return vec_canon(sden * xden * yden, tuple(out))


def rref(rows, ncols):
    """Reduced row echelon form of rational rows given as (den, nums) pairs.

    Returns ``(rows, pivots)``: the nonzero reduced rows in pivot order, each
    canonical with leading coefficient exactly 1, and their pivot columns.
    """
    work = []
    for den, nums in rows:
        den, nums = vec_canon(den, nums)
        if any(nums):
            work.append([den, list(nums)])
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, len(work)):
            if work[r][1][col]:
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        pden, pnums = work[rank]
        lead = pnums[col]
        # scale so the leading entry is 1: (nums/den) / (lead/den) = nums/lead
        pden, pnums = vec_canon(lead, pnums)
        work[rank] = [pden, list(pnums)]
        for r in range(len(work)):
            if r == rank:
                continue
            rden, rnums = work[r]
            f = rnums[col]
            if not f:
                continue
            newden = rden * pden
            newnums = tuple(
                rnums[j] * pden - f * pnums[j] for j in range(ncols)
            )
            newden, newnums = vec_canon(newden, newnums)
            work[r] = [newden, list(newnums)]
        pivots.append(col)
        rank += 1
    out = tuple((den, tuple(nums)) for den, nums in work[:rank])
    return out, tuple(pivots)


def reduce_vec(rref_rows, pivots, vden, vnums):
    """Eliminate the pivot coordinates of ``vnums/vden`` against RREF rows."""
    den = vden
    nums = list(vnums)
    n = len(nums)
    for (rden, rnums), col in zip(rref_rows, pivots):
        f = nums[col]
        if not f:
            continue
        newden = den * rden
        newnums = tuple(nums[j] * rden - f * rnums[j] for j in range(n))
        den, newnums = vec_canon(newden, newnums)
        nums = list(newnums)
    return den, tuple(nums)
