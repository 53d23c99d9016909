"""Hot loops: GF(2) elimination, coset enumeration, logical search, barrier search.

Every kernel has a numba version (``*_nb``) and a numpy/pure-python version
(``*_np``) with identical results. The public dispatchers pick one according to
:data:`layercodes._accel.HAVE_NUMBA`.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, njit

U1 = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)


# ---------------------------------------------------------------- bit helpers


@njit
def _popcount_nb(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    return np.int64((x * _H01) >> _S56)


@njit
def _weight_nb(v):
    w = 0
    for t in range(v.shape[0]):
        w += _popcount_nb(v[t])
    return w


@njit
def _lowest_bit_index_nb(x):
    i = 0
    while (x & U1) == 0:
        x = x >> _S1
        i += 1
    return i


@njit
def _lex_less_nb(a, b):
    # equal-weight vectors: a < b iff the lowest differing bit is set in a
    for t in range(a.shape[0]):
        d = a[t] ^ b[t]
        if d != 0:
            low = d & (~d + U1)
            return (a[t] & low) != 0
    return False


def lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    """Support-lexicographic order for two packed vectors of equal weight."""
    d = np.flatnonzero(a ^ b)
    if d.size == 0:
        return False
    t = int(d[0])
    x = int(a[t] ^ b[t])
    low = x & -x
    return bool(int(a[t]) & low)


def popcount_rows(words: np.ndarray) -> np.ndarray:
    """Row weights of a packed 2-D array."""
    if words.size == 0:
        return np.zeros(words.shape[0], dtype=np.int64)
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


# ---------------------------------------------------------- row echelon form


@njit
def _echelon_nb(a, ncols, full):
    nrows, nw = a.shape
    pivots = np.empty(min(nrows, ncols), np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        bit = U1 << np.uint64(c & 63)
        p = -1
        for i in range(r, nrows):
            if a[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for t in range(nw):
                tmp = a[r, t]
                a[r, t] = a[p, t]
                a[p, t] = tmp
        start = 0 if full else r + 1
        for i in range(start, nrows):
            if i != r and (a[i, w] & bit):
                for t in range(w, nw):
                    a[i, t] ^= a[r, t]
        pivots[r] = c
        r += 1
    return r, pivots[:r].copy()


def _echelon_np(a: np.ndarray, ncols: int, full: bool):
    nrows = a.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        nz = np.flatnonzero(a[r:, w] & bit)
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        if full:
            mask = (a[:, w] & bit) != 0
            mask[r] = False
        else:
            mask = np.zeros(nrows, dtype=bool)
            mask[r + 1 :] = (a[r + 1 :, w] & bit) != 0
        if mask.any():
            a[mask, w:] ^= a[r, w:]
        pivots.append(c)
        r += 1
    return r, np.asarray(pivots, dtype=np.int64)


def echelon(a: np.ndarray, ncols: int, full: bool = True, use_numba: bool | None = None):
    """Row-reduce packed rows ``a`` in place; returns ``(rank, pivot_columns)``.

    The first ``rank`` rows of ``a`` end up as the echelon basis. With
    ``full=True`` the result is the reduced echelon form.
    """
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if a.shape[0] == 0 or ncols == 0:
        return 0, np.zeros(0, dtype=np.int64)
    if use_numba:
        r, piv = _echelon_nb(a, ncols, full)
        return int(r), piv
    return _echelon_np(a, ncols, full)


# ------------------------------------------------------ coset enumeration


@njit
def _gray_coset_min_nb(gens, v):
    m = gens.shape[0]
    cur = v.copy()
    best = v.copy()
    bw = _weight_nb(cur)
    total = np.int64(1) << np.int64(m)
    for t in range(1, total):
        if bw == 0:
            break
        j = 0
        s = t
        while (s & 1) == 0:
            s >>= 1
            j += 1
        for q in range(cur.shape[0]):
            cur[q] ^= gens[j, q]
        w = _weight_nb(cur)
        if w < bw or (w == bw and _lex_less_nb(cur, best)):
            bw = w
            for q in range(cur.shape[0]):
                best[q] = cur[q]
    return bw, best


def _gray_coset_min_np(gens: np.ndarray, v: np.ndarray, block: int = 12):
    m = gens.shape[0]
    low = min(m, block)
    table = np.empty((1 << low, v.shape[0]), dtype=np.uint64)
    table[0] = v
    for j in range(low):
        table[1 << j : 2 << j] = table[: 1 << j] ^ gens[j]
    best = v.copy()
    bw = int(np.bitwise_count(v).sum())
    high = gens[low:]
    cur = np.zeros(v.shape[0], dtype=np.uint64)
    for t in range(1 << (m - low)):
        if t:
            j = (t & -t).bit_length() - 1
            cur ^= high[j]
        chunk = table ^ cur
        weights = popcount_rows(chunk)
        wmin = int(weights.min())
        if wmin > bw:
            continue
        for idx in np.flatnonzero(weights == wmin):
            cand = chunk[idx]
            if wmin < bw or lex_less(cand, best):
                bw = wmin
                best = cand.copy()
        if bw == 0:
            break
    return bw, best


def gray_coset_min(gens: np.ndarray, v: np.ndarray, use_numba: bool | None = None):
    """Exhaustive minimum weight over ``v + span(gens)`` with lexicographic tie-break."""
    if use_numba is None:
        use_numba = HAVE_NUMBA
    gens = np.ascontiguousarray(gens, dtype=np.uint64)
    v = np.ascontiguousarray(v, dtype=np.uint64)
    if use_numba:
        w, best = _gray_coset_min_nb(gens, v)
        return int(w), best
    return _gray_coset_min_np(gens, v)


# ------------------------------------------------- minimum-weight logical DFS


@njit
def _logical_dfs_nb(n, col_ptr, col_idx, row_ptr, row_idx, qlog, n_checks, cutoff, max_col):
    nk = qlog.shape[1]
    synd = np.zeros(n_checks, np.uint8)
    in_set = np.zeros(n, np.uint8)
    chosen = np.empty(cutoff + 1, np.int64)
    acc = np.zeros((cutoff + 2, nk), np.uint64)
    max_row = 0
    for r in range(n_checks):
        if row_ptr[r + 1] - row_ptr[r] > max_row:
            max_row = row_ptr[r + 1] - row_ptr[r]
    cand = np.empty((cutoff + 1, max_row + 1), np.int64)
    ncand = np.zeros(cutoff + 1, np.int64)
    pos = np.zeros(cutoff + 1, np.int64)
    for target in range(1, cutoff + 1):
        for q in range(n):
            # depth d means chosen[0..d-1] are in the set
            unsat = 0
            chosen[0] = q
            in_set[q] = 1
            for t in range(col_ptr[q], col_ptr[q + 1]):
                c = col_idx[t]
                synd[c] ^= 1
                if synd[c]:
                    unsat += 1
                else:
                    unsat -= 1
            for t in range(nk):
                acc[1, t] = qlog[q, t]
            d = 1
            expand = True
            while d > 0:
                if expand:
                    expand = False
                    if unsat == 0:
                        nontrivial = False
                        for t in range(nk):
                            if acc[d, t] != 0:
                                nontrivial = True
                        if nontrivial:
                            out = np.empty(d, np.int64)
                            for t in range(d):
                                out[t] = chosen[t]
                            # clean up state before returning
                            return target, out
                        ncand[d] = 0
                        pos[d] = 0
                    elif d == target or unsat > (target - d) * max_col:
                        ncand[d] = 0
                        pos[d] = 0
                    else:
                        # pick the unsatisfied check with the fewest candidates
                        best_c = -1
                        best_k = 1 << 30
                        for s in range(d):
                            qq = chosen[s]
                            for t in range(col_ptr[qq], col_ptr[qq + 1]):
                                c = col_idx[t]
                                if synd[c]:
                                    k = 0
                                    for u in range(row_ptr[c], row_ptr[c + 1]):
                                        x = row_idx[u]
                                        if x > q and in_set[x] == 0:
                                            k += 1
                                    if k < best_k:
                                        best_k = k
                                        best_c = c
                        k = 0
                        if best_c >= 0:
                            for u in range(row_ptr[best_c], row_ptr[best_c + 1]):
                                x = row_idx[u]
                                if x > q and in_set[x] == 0:
                                    cand[d, k] = x
                                    k += 1
                        ncand[d] = k
                        pos[d] = 0
                # advance at depth d
                if pos[d] < ncand[d]:
                    x = cand[d, pos[d]]
                    pos[d] += 1
                    chosen[d] = x
                    in_set[x] = 1
                    for t in range(col_ptr[x], col_ptr[x + 1]):
                        c = col_idx[t]
                        synd[c] ^= 1
                        if synd[c]:
                            unsat += 1
                        else:
                            unsat -= 1
                    for t in range(nk):
                        acc[d + 1, t] = acc[d, t] ^ qlog[x, t]
                    d += 1
                    expand = True
                else:
                    # backtrack: remove chosen[d-1]
                    d -= 1
                    x = chosen[d]
                    in_set[x] = 0
                    for t in range(col_ptr[x], col_ptr[x + 1]):
                        c = col_idx[t]
                        synd[c] ^= 1
                        if synd[c]:
                            unsat += 1
                        else:
                            unsat -= 1
    return -1, np.empty(0, np.int64)


def _logical_dfs_np(n, col_ptr, col_idx, row_ptr, row_idx, qlog, n_checks, cutoff, max_col):
    col = [col_idx[col_ptr[q] : col_ptr[q + 1]].tolist() for q in range(n)]
    row = [row_idx[row_ptr[r] : row_ptr[r + 1]].tolist() for r in range(n_checks)]
    qmask = [int.from_bytes(qlog[q].tobytes(), "little") for q in range(n)]
    synd = bytearray(n_checks)
    in_set = bytearray(n)

    def toggle(x):
        delta = 0
        for c in col[x]:
            synd[c] ^= 1
            delta += 1 if synd[c] else -1
        return delta

    def search(q, chosen, unsat, acc, target):
        d = len(chosen)
        if unsat == 0:
            return list(chosen) if acc else None
        if d == target or unsat > (target - d) * max_col:
            return None
        best = None
        for s in chosen:
            for c in col[s]:
                if synd[c]:
                    opts = [x for x in row[c] if x > q and not in_set[x]]
                    if best is None or len(opts) < len(best):
                        best = opts
        for x in best or ():
            in_set[x] = 1
            chosen.append(x)
            found = search(q, chosen, unsat + toggle(x), acc ^ qmask[x], target)
            toggle(x)
            chosen.pop()
            in_set[x] = 0
            if found is not None:
                return found
        return None

    for target in range(1, cutoff + 1):
        for q in range(n):
            in_set[q] = 1
            found = search(q, [q], toggle(q), qmask[q], target)
            toggle(q)
            in_set[q] = 0
            if found is not None:
                return target, np.asarray(found, dtype=np.int64)
    return -1, np.empty(0, dtype=np.int64)


def logical_dfs(n, col_ptr, col_idx, row_ptr, row_idx, qlog, n_checks, cutoff, use_numba=None):
    """Smallest nontrivial zero-syndrome set of weight <= ``cutoff``.

    ``col_*`` is the CSR qubit-to-check incidence, ``row_*`` the check-to-qubit
    incidence, and ``qlog[q]`` packs which dual logical representatives contain
    qubit ``q``. Returns ``(weight, support)`` or ``(-1, [])``.
    """
    if use_numba is None:
        use_numba = HAVE_NUMBA
    col_w = np.diff(col_ptr)
    max_col = int(col_w.max()) if col_w.size else 0
    args = (
        int(n),
        np.ascontiguousarray(col_ptr, dtype=np.int64),
        np.ascontiguousarray(col_idx, dtype=np.int64),
        np.ascontiguousarray(row_ptr, dtype=np.int64),
        np.ascontiguousarray(row_idx, dtype=np.int64),
        np.ascontiguousarray(qlog, dtype=np.uint64),
        int(n_checks),
        int(cutoff),
        max(max_col, 1),
    )
    if use_numba:
        w, out = _logical_dfs_nb(*args)
        return int(w), np.sort(out)
    w, out = _logical_dfs_np(*args)
    return int(w), np.sort(out)


# ------------------------------------------------ bottleneck barrier search


@njit
def _barrier_nb(n, colsyn, qlog, target, exact_target):
    size = np.int64(1) << np.int64(n)
    nw = colsyn.shape[1]
    max_cost = nw * 64 + 1
    level = np.full(size, -1, np.int32)
    parent = np.full(size, -1, np.int64)
    synd = np.zeros((size, nw), np.uint64)
    lpar = np.zeros(size, np.int64)
    head = np.full(max_cost + 1, -1, np.int64)
    nxt = np.full(size, -1, np.int64)
    level[0] = 0
    head[0] = 0
    for b in range(max_cost + 1):
        while head[b] != -1:
            y = head[b]
            head[b] = nxt[y]
            zero = True
            for t in range(nw):
                if synd[y, t] != 0:
                    zero = False
            if zero and y != 0:
                hit = lpar[y] == target if exact_target else lpar[y] != 0
                if hit:
                    return b, y, parent
            for q in range(n):
                z = y ^ (np.int64(1) << np.int64(q))
                if level[z] >= 0:
                    continue
                cost = 0
                for t in range(nw):
                    synd[z, t] = synd[y, t] ^ colsyn[q, t]
                    cost += _popcount_nb(synd[z, t])
                lpar[z] = lpar[y] ^ qlog[q]
                nb = b if cost < b else cost
                level[z] = nb
                parent[z] = y
                nxt[z] = head[nb]
                head[nb] = z
    return -1, -1, parent


def _barrier_np(n, colsyn, qlog, target, exact_target):
    size = 1 << n
    col_int = [int.from_bytes(colsyn[q].tobytes(), "little") for q in range(n)]
    qmask = [int(x) for x in qlog]
    level = np.full(size, -1, dtype=np.int32)
    parent = np.full(size, -1, dtype=np.int64)
    synd = [0] * size
    lpar = [0] * size
    buckets: dict[int, list[int]] = {0: [0]}
    level[0] = 0
    b = 0
    max_cost = colsyn.shape[1] * 64 + 1
    while b <= max_cost:
        stack = buckets.get(b)
        while stack:
            y = stack.pop()
            if y and synd[y] == 0:
                if (lpar[y] == target) if exact_target else lpar[y] != 0:
                    return b, y, parent
            for q in range(n):
                z = y ^ (1 << q)
                if level[z] >= 0:
                    continue
                s = synd[y] ^ col_int[q]
                synd[z] = s
                lpar[z] = lpar[y] ^ qmask[q]
                nb = max(b, s.bit_count())
                level[z] = nb
                parent[z] = y
                buckets.setdefault(nb, []).append(z)
        b += 1
    return -1, -1, parent


def barrier_search(n, colsyn, qlog, target=0, exact_target=False, use_numba=None):
    """Bottleneck path from 0 to a nontrivial zero-syndrome state of ``{0,1}^n``.

    Node cost is the syndrome weight. Returns ``(barrier, end_state, parent)``;
    ``parent`` encodes the search tree for witness reconstruction.
    """
    if use_numba is None:
        use_numba = HAVE_NUMBA
    colsyn = np.ascontiguousarray(colsyn, dtype=np.uint64)
    if colsyn.shape[1] == 0:
        colsyn = np.zeros((n, 1), dtype=np.uint64)
    qlog = np.ascontiguousarray(qlog, dtype=np.int64)
    if use_numba:
        b, y, parent = _barrier_nb(int(n), colsyn, qlog, np.int64(target), bool(exact_target))
        return int(b), int(y), parent
    return _barrier_np(int(n), colsyn, qlog, int(target), bool(exact_target))


# ------------------------------------------------ reduction by echelon rows


@njit
def _reduce_rows_nb(rows, basis, pivots):
    for i in range(rows.shape[0]):
        for r in range(pivots.shape[0]):
            c = pivots[r]
            w = c >> 6
            bit = U1 << np.uint64(c & 63)
            if rows[i, w] & bit:
                for t in range(rows.shape[1]):
                    rows[i, t] ^= basis[r, t]
    return rows


def _reduce_rows_np(rows, basis, pivots):
    for r, c in enumerate(pivots):
        w, b = divmod(int(c), 64)
        mask = (rows[:, w] >> np.uint64(b)) & np.uint64(1) != 0
        if mask.any():
            rows[mask] ^= basis[r]
    return rows


def reduce_rows(rows, basis, pivots, use_numba=None):
    """Clear the pivot columns of every row of ``rows`` using reduced echelon ``basis``."""
    if use_numba is None:
        use_numba = HAVE_NUMBA
    rows = np.array(rows, dtype=np.uint64, copy=True)
    if rows.shape[0] == 0 or len(pivots) == 0:
        return rows
    basis = np.ascontiguousarray(basis, dtype=np.uint64)
    pivots = np.ascontiguousarray(pivots, dtype=np.int64)
    if use_numba:
        return _reduce_rows_nb(rows, basis, pivots)
    return _reduce_rows_np(rows, basis, pivots)
