# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: same contracts and result shapes as pybackend.py."""

import numpy as np

CONFLICT_ANNOSET = 1
CONFLICT_CROSS = 2

STATUS_FIXPOINT = 0
STATUS_CONFLICT = 1
STATUS_BOUND_EXCEEDED = 2


cdef class _Prog:
    cdef public int n_atoms, n_lits, n, n_rules, incon_lit, max_iters
    cdef int[::1] head_lit, kind, head_lo, head_hi
    cdef int[::1] body_off, body_lit, body_lo, body_hi, body_theta

    def __init__(self, cp):
        self.n_atoms = cp.n_atoms
        self.n_lits = cp.n_lits
        self.n = cp.resolution
        self.incon_lit = cp.incon_lit
        self.max_iters = cp.max_iters
        self.head_lit = np.ascontiguousarray(cp.head_lit, dtype=np.int32)
        self.kind = np.ascontiguousarray(cp.kind, dtype=np.int32)
        self.head_lo = np.ascontiguousarray(cp.head_lo, dtype=np.int32)
        self.head_hi = np.ascontiguousarray(cp.head_hi, dtype=np.int32)
        self.body_off = np.ascontiguousarray(cp.body_off, dtype=np.int32)
        self.body_lit = np.ascontiguousarray(cp.body_lit, dtype=np.int32)
        self.body_lo = np.ascontiguousarray(cp.body_lo, dtype=np.int32)
        self.body_hi = np.ascontiguousarray(cp.body_hi, dtype=np.int32)
        self.body_theta = np.ascontiguousarray(cp.body_theta, dtype=np.int32)
        self.n_rules = self.head_lit.shape[0]


cdef int _step(_Prog P, int[::1] low, int[::1] new_low,
               int[::1] max_lo, int[::1] min_hi,
               int[::1] max_src, int[::1] min_src,
               int[::1] max_ilo, int[::1] max_ihi,
               int[::1] min_ilo, int[::1] min_ihi,
               list conflicts):
    """One synchronous application; fills new_low, appends conflict tuples.

    Returns 1 if any lower bound changed.
    """
    cdef int n = P.n, n_lits = P.n_lits
    cdef int l, r, b, b0, b1, bl, k, hl, hh, h, fired, atom, p, q, changed
    cdef int cur_hi

    for l in range(n_lits):
        new_low[l] = low[l]
        max_lo[l] = low[l]
        cur_hi = n - low[l ^ 1]
        min_hi[l] = cur_hi
        max_src[l] = -1
        min_src[l] = -1
        max_ilo[l] = low[l]
        max_ihi[l] = cur_hi
        min_ilo[l] = low[l]
        min_ihi[l] = cur_hi

    for r in range(P.n_rules):
        b0 = P.body_off[r]
        b1 = P.body_off[r + 1]
        k = P.kind[r]
        if k == 0:
            fired = 1
            for b in range(b0, b1):
                bl = P.body_lit[b]
                if P.body_lo[b] > low[bl] or n - low[bl ^ 1] > P.body_hi[b]:
                    fired = 0
                    break
            if not fired:
                continue
            hl = P.head_lo[r]
            hh = P.head_hi[r]
        elif k == 1:
            hl = n
            for b in range(b0, b1):
                if P.body_theta[b] == 1 and low[P.body_lit[b]] != n:
                    hl = 0
                    break
            hh = n
        else:
            hl = n if low[P.body_lit[b0]] + low[P.body_lit[b0 + 1]] > n else 0
            hh = n

        h = P.head_lit[r]
        if hl > max_lo[h]:
            max_lo[h] = hl
            max_src[h] = r
            max_ilo[h] = hl
            max_ihi[h] = hh
        if hh < min_hi[h]:
            min_hi[h] = hh
            min_src[h] = r
            min_ilo[h] = hl
            min_ihi[h] = hh
        if hl > new_low[h]:
            new_low[h] = hl
        if n - hh > new_low[h ^ 1]:
            new_low[h ^ 1] = n - hh

    for l in range(n_lits):
        if max_lo[l] > min_hi[l]:
            if min_src[l] <= max_src[l]:
                conflicts.append(
                    (CONFLICT_ANNOSET, l // 2,
                     min_ilo[l], min_ihi[l], max_ilo[l], max_ihi[l])
                )
            else:
                conflicts.append(
                    (CONFLICT_ANNOSET, l // 2,
                     max_ilo[l], max_ihi[l], min_ilo[l], min_ihi[l])
                )
    for atom in range(P.n_atoms):
        p = new_low[2 * atom]
        q = new_low[2 * atom + 1]
        if p + q > n:
            conflicts.append((CONFLICT_CROSS, atom, p, n, 0, n - q))

    changed = 0
    for l in range(n_lits):
        if new_low[l] != low[l]:
            changed = 1
            break
    return changed


def apply_once(cp, low_in):
    P = _Prog(cp)
    cdef int n_lits = P.n_lits
    cdef int[::1] low = np.ascontiguousarray(np.asarray(low_in, dtype=np.int32))
    cdef int[::1] new_low = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] max_lo = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] min_hi = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] max_src = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] min_src = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] max_ilo = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] max_ihi = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] min_ilo = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] min_ihi = np.zeros(n_lits, dtype=np.int32)
    conflicts = []
    _step(P, low, new_low, max_lo, min_hi, max_src, min_src,
          max_ilo, max_ihi, min_ilo, min_ihi, conflicts)
    return ([int(v) for v in new_low], conflicts)


def run_fixpoint(cp, strict, record_states):
    P = _Prog(cp)
    cdef int n_lits = P.n_lits
    cdef int it, changed, i
    cdef bint strict_mode = bool(strict)
    cdef int[::1] low = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] nl = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] max_lo = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] min_hi = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] max_src = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] min_src = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] max_ilo = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] max_ihi = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] min_ilo = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] min_ihi = np.zeros(n_lits, dtype=np.int32)

    states = [] if record_states else None
    conflicts = []
    cdef int incon_iter = -1
    cdef int iterations = 0

    for it in range(1, P.max_iters + 1):
        step_conflicts = []
        changed = _step(P, low, nl, max_lo, min_hi, max_src, min_src,
                        max_ilo, max_ihi, min_ilo, min_ihi, step_conflicts)
        iterations = it
        if step_conflicts and strict_mode:
            return (
                STATUS_CONFLICT,
                [int(v) for v in low],
                it,
                [(c[0], it) + c[1:] for c in step_conflicts],
                incon_iter,
                states,
            )
        if step_conflicts and not conflicts:
            conflicts = [(c[0], it) + c[1:] for c in step_conflicts]
        for i in range(n_lits):
            low[i] = nl[i]
        if record_states:
            states.append([int(v) for v in low])
        if incon_iter < 0 and P.incon_lit >= 0 and low[P.incon_lit] == P.n:
            incon_iter = it
        if not changed:
            return (STATUS_FIXPOINT, [int(v) for v in low], it, conflicts, incon_iter, states)
    return (STATUS_BOUND_EXCEEDED, [int(v) for v in low], iterations, conflicts, incon_iter, states)


def brute_force_scan(cp, collect):
    P = _Prog(cp)
    cdef int n = P.n, n_atoms = P.n_atoms, n_lits = P.n_lits
    cdef int p, q, r, b, b0, b1, bl, k, hl, hh, h, fired, is_model, pos, l
    cdef bint do_collect = bool(collect)

    pair_list = [(p, q) for p in range(n + 1) for q in range(n + 1 - p)]
    pairs_np = np.asarray(pair_list, dtype=np.int32)
    cdef int[:, ::1] pairs = pairs_np
    cdef int n_pairs = pairs_np.shape[0]

    cdef long long count = 0
    min_low_np = np.full(n_lits, n + 1, dtype=np.int32)
    cdef int[::1] min_low = min_low_np
    models = [] if do_collect else None

    idx_np = np.zeros(max(n_atoms, 1), dtype=np.int32)
    cdef int[::1] idx = idx_np
    low_np = np.zeros(n_lits, dtype=np.int32)
    cdef int[::1] low = low_np
    for pos in range(n_atoms):
        low[2 * pos] = pairs[0, 0]
        low[2 * pos + 1] = pairs[0, 1]

    while True:
        is_model = 1
        for r in range(P.n_rules):
            b0 = P.body_off[r]
            b1 = P.body_off[r + 1]
            k = P.kind[r]
            if k == 0:
                fired = 1
                for b in range(b0, b1):
                    bl = P.body_lit[b]
                    if P.body_lo[b] > low[bl] or n - low[bl ^ 1] > P.body_hi[b]:
                        fired = 0
                        break
                if not fired:
                    continue
                hl = P.head_lo[r]
                hh = P.head_hi[r]
            elif k == 1:
                hl = n
                for b in range(b0, b1):
                    if P.body_theta[b] == 1 and low[P.body_lit[b]] != n:
                        hl = 0
                        break
                hh = n
            else:
                hl = n if low[P.body_lit[b0]] + low[P.body_lit[b0 + 1]] > n else 0
                hh = n
            h = P.head_lit[r]
            if hl > low[h] or n - hh > low[h ^ 1]:
                is_model = 0
                break
        if is_model:
            count += 1
            for l in range(n_lits):
                if low[l] < min_low[l]:
                    min_low[l] = low[l]
            if do_collect:
                models.append(tuple([int(v) for v in low]))
        pos = n_atoms - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < n_pairs:
                low[2 * pos] = pairs[idx[pos], 0]
                low[2 * pos + 1] = pairs[idx[pos], 1]
                break
            idx[pos] = 0
            low[2 * pos] = pairs[0, 0]
            low[2 * pos + 1] = pairs[0, 1]
            pos -= 1
        if pos < 0:
            break

    if count == 0:
        min_low_out = [0] * n_lits
    else:
        min_low_out = [int(v) for v in min_low]
    return (int(count), min_low_out, models)
