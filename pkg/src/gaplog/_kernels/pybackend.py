"""Pure-Python kernels: reference implementation and import-time fallback.

Both backends implement the same three entry points with identical result
shapes; `tests/test_kernels.py` asserts their outputs are equal bit for bit.

Conflict tuples are `(kind, atom, lo1, hi1, lo2, hi2)` where kind 1 is a pair
of head annotations on one literal with no common upper bound and kind 2 is
an atom whose two lower bounds crossed (lower(a) + lower(~a) > N); the two
intervals are ordered by source (current value first, then rule order).
`run_fixpoint` prepends the iteration number to each tuple.
"""

from __future__ import annotations

CONFLICT_ANNOSET = 1
CONFLICT_CROSS = 2

STATUS_FIXPOINT = 0
STATUS_CONFLICT = 1
STATUS_BOUND_EXCEEDED = 2


def _arrays(cp):
    return (
        cp.head_lit.tolist(),
        cp.kind.tolist(),
        cp.head_lo.tolist(),
        cp.head_hi.tolist(),
        cp.body_off.tolist(),
        cp.body_lit.tolist(),
        cp.body_lo.tolist(),
        cp.body_hi.tolist(),
        cp.body_theta.tolist(),
    )


def _step(cp, low, arrays):
    """One synchronous application; returns (new_low, conflicts)."""
    head_lit, kind, head_lo, head_hi, body_off, body_lit, body_lo, body_hi, body_theta = arrays
    n = cp.resolution
    n_lits = cp.n_lits

    new_low = list(low)
    # Per-literal annoSet extrema: track the max contributed lower and min
    # contributed upper with their source intervals (source -1 = current value).
    max_lo = list(low)
    min_hi = [n - low[l ^ 1] for l in range(n_lits)]
    max_src = [-1] * n_lits
    min_src = [-1] * n_lits
    max_int = [(max_lo[l], min_hi[l]) for l in range(n_lits)]
    min_int = list(max_int)

    for r in range(len(head_lit)):
        b0, b1 = body_off[r], body_off[r + 1]
        k = kind[r]
        if k == 0:
            fired = True
            for b in range(b0, b1):
                bl = body_lit[b]
                if body_lo[b] > low[bl] or n - low[bl ^ 1] > body_hi[b]:
                    fired = False
                    break
            if not fired:
                continue
            hl, hh = head_lo[r], head_hi[r]
        elif k == 1:
            hl = n
            for b in range(b0, b1):
                if body_theta[b] == 1 and low[body_lit[b]] != n:
                    hl = 0
                    break
            hh = n
        else:  # sign-sum
            hl = n if low[body_lit[b0]] + low[body_lit[b0 + 1]] > n else 0
            hh = n

        h = head_lit[r]
        if hl > max_lo[h]:
            max_lo[h] = hl
            max_src[h] = r
            max_int[h] = (hl, hh)
        if hh < min_hi[h]:
            min_hi[h] = hh
            min_src[h] = r
            min_int[h] = (hl, hh)
        if hl > new_low[h]:
            new_low[h] = hl
        if n - hh > new_low[h ^ 1]:
            new_low[h ^ 1] = n - hh

    conflicts = []
    for l in range(n_lits):
        if max_lo[l] > min_hi[l]:
            a, b = (min_src[l], min_int[l]), (max_src[l], max_int[l])
            if a[0] > b[0]:
                a, b = b, a
            conflicts.append((CONFLICT_ANNOSET, l // 2, *a[1], *b[1]))
    for atom in range(cp.n_atoms):
        p, q = new_low[2 * atom], new_low[2 * atom + 1]
        if p + q > n:
            conflicts.append((CONFLICT_CROSS, atom, p, n, 0, n - q))
    return new_low, conflicts


def apply_once(cp, low):
    """One synchronous application from an arbitrary state."""
    return _step(cp, list(low), _arrays(cp))


def run_fixpoint(cp, strict, record_states):
    """Iterate from all-bottom until fixpoint, conflict (strict), or bound.

    Returns (status, lowers, iterations, conflicts, incon_iter, states).
    In permissive mode the iteration continues past conflicts (the lower
    bound machine is total and monotone); only the first conflicting
    application's witnesses are kept, and incon_iter records when the incon
    literal first reached its top.
    """
    arrays = _arrays(cp)
    low = [0] * cp.n_lits
    states = [] if record_states else None
    conflicts: list[tuple] = []
    incon_iter = -1
    iterations = 0

    for it in range(1, cp.max_iters + 1):
        new_low, step_conflicts = _step(cp, low, arrays)
        iterations = it
        if step_conflicts and strict:
            return (
                STATUS_CONFLICT,
                low,
                it,
                [(c[0], it) + c[1:] for c in step_conflicts],
                incon_iter,
                states,
            )
        if step_conflicts and not conflicts:
            conflicts = [(c[0], it) + c[1:] for c in step_conflicts]
        changed = new_low != low
        low = new_low
        if record_states:
            states.append(list(low))
        if incon_iter < 0 and cp.incon_lit >= 0 and low[cp.incon_lit] == cp.resolution:
            incon_iter = it
        if not changed:
            return (STATUS_FIXPOINT, low, it, conflicts, incon_iter, states)
    return (STATUS_BOUND_EXCEEDED, low, iterations, conflicts, incon_iter, states)


def brute_force_scan(cp, collect):
    """Enumerate all conflict-free interpretations; keep the models.

    Returns (count, min_low, models). min_low is the per-literal minimum of
    the model lower bounds (entailed bounds follow from it); models is a list
    of lower-bound tuples or None when collect is false.
    """
    arrays = _arrays(cp)
    head_lit, kind, head_lo, head_hi, body_off, body_lit, body_lo, body_hi, body_theta = arrays
    n = cp.resolution
    n_atoms = cp.n_atoms
    n_lits = cp.n_lits
    pairs = [(p, q) for p in range(n + 1) for q in range(n + 1 - p)]

    count = 0
    min_low = [n + 1] * n_lits
    models = [] if collect else None
    n_rules = len(head_lit)

    idx = [0] * n_atoms
    low = [0] * n_lits
    for atom in range(n_atoms):
        low[2 * atom], low[2 * atom + 1] = pairs[0]
    while True:
        is_model = True
        for r in range(n_rules):
            b0, b1 = body_off[r], body_off[r + 1]
            k = kind[r]
            if k == 0:
                fired = True
                for b in range(b0, b1):
                    bl = body_lit[b]
                    if body_lo[b] > low[bl] or n - low[bl ^ 1] > body_hi[b]:
                        fired = False
                        break
                if not fired:
                    continue
                hl, hh = head_lo[r], head_hi[r]
            elif k == 1:
                hl = n
                for b in range(b0, b1):
                    if body_theta[b] == 1 and low[body_lit[b]] != n:
                        hl = 0
                        break
                hh = n
            else:
                hl = n if low[body_lit[b0]] + low[body_lit[b0 + 1]] > n else 0
                hh = n
            h = head_lit[r]
            if hl > low[h] or n - hh > low[h ^ 1]:
                is_model = False
                break
        if is_model:
            count += 1
            for l in range(n_lits):
                if low[l] < min_low[l]:
                    min_low[l] = low[l]
            if collect:
                models.append(tuple(low))
        # odometer over atoms, last atom fastest
        pos = n_atoms - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < len(pairs):
                low[2 * pos], low[2 * pos + 1] = pairs[idx[pos]]
                break
            idx[pos] = 0
            low[2 * pos], low[2 * pos + 1] = pairs[0]
            pos -= 1
        if pos < 0:
            break
    if count == 0:
        min_low = [0] * n_lits
    return (count, min_low, models)
