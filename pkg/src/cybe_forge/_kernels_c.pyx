# cython: language_level=3, boundscheck=False, wraparound=False
"""Integer-core rational kernels, compiled twin of ``_kernels_py``.

Same representation and same canonical outputs as the pure module; the wins
come from compiled loops and indexing.  Entries are arbitrary-precision
Python ints, so no overflow handling is needed.
"""

from math import gcd

BACKEND = "c"


cdef object _content(tuple nums):
    cdef Py_ssize_t i, n = len(nums)
    cdef object g = 0
    for i in range(n):
        g = gcd(g, nums[i])
        if g == 1:
            return g
    return g


cpdef tuple vec_canon(object den, tuple nums):
    cdef Py_ssize_t i, n = len(nums)
    cdef object g
    if den < 0:
        den = -den
        nums = tuple([-nums[i] for i in range(n)])
    g = gcd(den, _content(nums))
    if g > 1:
        den = den // g
        nums = tuple([nums[i] // g for i in range(n)])
    return den, nums


cpdef tuple mat_canon(object den, tuple rows):
    cdef Py_ssize_t i, m = len(rows)
    cdef object g
    cdef tuple row
    if den < 0:
        den = -den
        rows = tuple([tuple([-x for x in row]) for row in rows])
    g = den
    for i in range(m):
        if g == 1:
            break
        g = gcd(g, _content(rows[i]))
    if g > 1:
        den = den // g
        rows = tuple([tuple([x // g for x in row]) for row in rows])
    return den, rows


cpdef tuple mat_vec(object mden, tuple rows, object vden, tuple nums):
    cdef Py_ssize_t i, j, m = len(rows), n = len(nums), nnz = 0
    cdef list idx = []
    cdef list val = []
    cdef list out = []
    cdef object acc, a, x
    cdef tuple row
    for j in range(n):
        x = nums[j]
        if x != 0:
            idx.append(j)
            val.append(x)
            nnz += 1
    for i in range(m):
        row = rows[i]
        acc = 0
        for j in range(nnz):
            a = row[<Py_ssize_t> idx[j]]
            if a != 0:
                acc = acc + a * val[j]
        out.append(acc)
    return vec_canon(mden * vden, tuple(out))


cpdef tuple mat_mul(object aden, tuple arows, object bden, tuple brows):
    cdef Py_ssize_t i, j, k, m = len(arows), p
    cdef list acc
    cdef list out = []
    cdef object a, b
    cdef tuple arow, brow
    p = len(brows[0]) if len(brows) else 0
    for i in range(m):
        arow = arows[i]
        acc = [0] * p
        for k in range(len(arow)):
            a = arow[k]
            if a != 0:
                brow = brows[k]
                for j in range(p):
                    b = brow[j]
                    if b != 0:
                        acc[j] = acc[j] + a * b
        out.append(tuple(acc))
    return mat_canon(aden * bden, tuple(out))


cpdef tuple bilinear(object sden, tuple entries, Py_ssize_t dim,
                     object xden, tuple xnums, object yden, tuple ynums):
    cdef Py_ssize_t t, i, j, k
    cdef list out = [0] * dim
    cdef object c, x, y
    cdef tuple e
    for t in range(len(entries)):
        e = entries[t]
        i = e[0]
        x = xnums[i]
        if x == 0:
            continue
        j = e[1]
        y = ynums[j]
        if y == 0:
            continue
        k = e[2]
        c = e[3]
        out[k] = out[k] + c * x * y
    return vec_canon(sden * xden * yden, tuple(out))


cpdef tuple rref(object rows, Py_ssize_t ncols):
    cdef list work = []
    cdef list pivots = []
    cdef Py_ssize_t col, r, rank = 0, pivot, j, nrows
    cdef object den, f, pden, rden, newden
    cdef tuple nums, pnums, rnums, newnums
    cdef list pr, rr
    for item in rows:
        den, nums = vec_canon(item[0], tuple(item[1]))
        if any(nums):
            work.append([den, nums])
    nrows = len(work)
    for col in range(ncols):
        pivot = -1
        for r in range(rank, nrows):
            if (<tuple> (<list> work[r])[1])[col] != 0:
                pivot = r
                break
        if pivot < 0:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        pr = <list> work[rank]
        pden, pnums = vec_canon((<tuple> pr[1])[col], <tuple> pr[1])
        work[rank] = [pden, pnums]
        for r in range(nrows):
            if r == rank:
                continue
            rr = <list> work[r]
            rnums = <tuple> rr[1]
            f = rnums[col]
            if f == 0:
                continue
            rden = rr[0]
            newden = rden * pden
            newnums = tuple([rnums[j] * pden - f * pnums[j] for j in range(ncols)])
            newden, newnums = vec_canon(newden, newnums)
            work[r] = [newden, newnums]
        pivots.append(col)
        rank += 1
    out = tuple([(<list> work[r])[0:2] for r in range(rank)])
    return tuple([(w[0], w[1]) for w in out]), tuple(pivots)


cpdef tuple reduce_vec(object rref_rows, object pivots, object vden, tuple vnums):
    cdef Py_ssize_t n = len(vnums), j, t
    cdef object den = vden, f, rden, newden
    cdef tuple nums = vnums, rnums, newnums
    cdef Py_ssize_t col
    for t in range(len(pivots)):
        col = pivots[t]
        f = nums[col]
        if f == 0:
            continue
        rden = rref_rows[t][0]
        rnums = rref_rows[t][1]
        newden = den * rden
        newnums = tuple([nums[j] * rden - f * rnums[j] for j in range(n)])
        den, nums = vec_canon(newden, newnums)
    return den, nums
