"""Drive a model for many steps and collect checkpoints.

:func:`evolve` composes the public step, classify, update and apply
operations.  :func:`evolve_fast` does the same work for the tree and
multitree models in one fused loop; it consumes the random stream in exactly
the same order, so both paths leave bit-identical states behind.
"""

from __future__ import annotations

from .errors import InvariantViolation
from .graph import apply_outcome, snapshot
from .models import Multitree, Port, init_state, step_function
from .rng import BLOCK, RandomSource
from .selection import (All, ConnectedToAll, Level, NeighborsOf, classify_new_vertex,
                        init_selection, update_selected_degrees)


def dyadic_schedule(n_steps):
    """Checkpoints 1, 2, 4, ... up to ``n_steps`` plus ``n_steps`` itself."""
    out = []
    k = 1
    while k < n_steps:
        out.append(k)
        k *= 2
    out.append(n_steps)
    return out


def _checked(state, selection):
    cp = snapshot(state, selection).validate()
    if cp.n_vertices != state.n_initial + state.n:
        raise InvariantViolation("vertex count out of sync with step counter")
    return cp


def advance(state, selection):
    """One full step; returns the applied outcome and the selection flag."""
    outcome = step_function(state.params)(state)
    selected = classify_new_vertex(selection.rule, outcome, state)
    update_selected_degrees(selection, outcome, state, selected)
    apply_outcome(state, outcome)
    return outcome, selected


def evolve(state, selection, n_steps, checkpoints=()):
    """Run ``n_steps`` steps; snapshot whenever ``state.n`` hits a checkpoint."""
    wanted = sorted(set(checkpoints))
    out = []
    i = 0
    while i < len(wanted) and wanted[i] <= state.n:
        if wanted[i] == state.n:
            out.append(_checked(state, selection))
        i += 1
    stop = state.n + n_steps
    while state.n < stop:
        advance(state, selection)
        if i < len(wanted) and wanted[i] == state.n:
            out.append(_checked(state, selection))
            i += 1
    return out


def supports_fast_path(params, rule):
    if isinstance(params, Port):
        return isinstance(rule, (Level, NeighborsOf, All))
    if isinstance(params, Multitree):
        return isinstance(rule, (Level, NeighborsOf, ConnectedToAll, All))
    return False


def evolve_fast(state, selection, n_steps, checkpoints=()):
    """Fused equivalent of :func:`evolve`; falls back to it when unsupported."""
    if not supports_fast_path(state.params, selection.rule):
        return evolve(state, selection, n_steps, checkpoints)
    if isinstance(state.params, Port):
        return _port_loop(state, selection, n_steps, checkpoints)
    return _multitree_loop(state, selection, n_steps, checkpoints)


def _rule_code(rule):
    if isinstance(rule, Level):
        return 0, rule.j
    if isinstance(rule, NeighborsOf):
        return 1, rule.target
    if isinstance(rule, ConnectedToAll):
        return 2, tuple(rule.fixed)
    return 3, None


def _port_loop(state, selection, n_steps, checkpoints):
    rng = state.rng
    gen = rng.gen
    buf, pos = rng._buf, rng._pos
    nbuf = len(buf)
    aux = state.aux
    beta = aux.beta
    ends, depth, parent = aux.ends, aux.depth, aux.parent
    degrees, hist, newdeg = state.degrees, state.histogram, state.new_degree_counts
    members, xs, newsel = selection.members, selection.x_star, selection.new_counts
    kind, arg = _rule_code(selection.rule)
    while len(hist) < 3:
        hist.append(0)
    while len(xs) < 3:
        xs.append(0)
    while len(newdeg) < 2:
        newdeg.append(0)
    while len(newsel) < 2:
        newsel.append(0)

    wanted = sorted(c for c in set(checkpoints) if c > state.n)
    out = [_checked(state, selection)] if state.n in checkpoints else []
    wi = 0
    next_cp = wanted[0] if wanted else -1
    n = state.n
    stop = n + n_steps
    s_size = selection.s_size
    while n < stop:
        nv = len(degrees)
        ne = len(ends)
        # target drawn exactly as in port_step
        if beta > 0:
            if pos == nbuf:
                buf = gen.random(BLOCK).tolist(); nbuf = BLOCK; pos = 0
            u = buf[pos]; pos += 1
            if pos == nbuf:
                buf = gen.random(BLOCK).tolist(); nbuf = BLOCK; pos = 0
            w = buf[pos]; pos += 1
            if u * (ne + beta * nv) < beta * nv:
                target = int(w * nv)
            else:
                target = ends[int(w * ne)]
        elif beta == 0:
            if pos == nbuf:
                buf = gen.random(BLOCK).tolist(); nbuf = BLOCK; pos = 0
            target = ends[int(buf[pos] * ne)]; pos += 1
        else:
            while True:
                if pos == nbuf:
                    buf = gen.random(BLOCK).tolist(); nbuf = BLOCK; pos = 0
                target = ends[int(buf[pos] * ne)]; pos += 1
                if pos == nbuf:
                    buf = gen.random(BLOCK).tolist(); nbuf = BLOCK; pos = 0
                d = degrees[target]
                u = buf[pos]; pos += 1
                if u * d < d + beta:
                    break
        dp = depth[target] + 1
        if kind == 0:
            sel = dp == arg
        elif kind == 1:
            sel = target == arg
        else:
            sel = True
        d = degrees[target]
        if members[target]:
            xs[d] -= 1
            if d + 1 == len(xs):
                xs.append(0)
            xs[d + 1] += 1
        members.append(sel)
        if sel:
            xs[1] += 1
            newsel[1] += 1
            s_size += 1
        hist[d] -= 1
        if d + 1 == len(hist):
            hist.append(0)
        hist[d + 1] += 1
        degrees[target] = d + 1
        degrees.append(1)
        hist[1] += 1
        newdeg[1] += 1
        parent.append(target)
        depth.append(dp)
        ends.append(target)
        ends.append(nv)
        n += 1
        if n == next_cp:
            state.n = n
            state.edge_count = n + 1
            selection.s_size = s_size
            out.append(_checked(state, selection))
            wi += 1
            next_cp = wanted[wi] if wi < len(wanted) else -1
    state.n = n
    state.edge_count = len(ends) // 2
    selection.s_size = s_size
    rng._buf, rng._pos = buf, pos
    return out


def _multitree_loop(state, selection, n_steps, checkpoints):
    rng = state.rng
    gen = rng.gen
    buf, pos = rng._buf, rng._pos
    nbuf = len(buf)
    aux = state.aux
    M = aux.M
    bases, dist = aux.bases, aux.dist
    degrees, hist, newdeg = state.degrees, state.histogram, state.new_degree_counts
    members, xs, newsel = selection.members, selection.x_star, selection.new_counts
    kind, arg = _rule_code(selection.rule)
    for lst in (hist, xs, newdeg, newsel):
        while len(lst) < M + 2:
            lst.append(0)

    wanted = sorted(c for c in set(checkpoints) if c > state.n)
    out = [_checked(state, selection)] if state.n in checkpoints else []
    wi = 0
    next_cp = wanted[0] if wanted else -1
    n = state.n
    stop = n + n_steps
    s_size = selection.s_size
    edge_count = state.edge_count
    while n < stop:
        nv = len(degrees)
        if pos == nbuf:
            buf = gen.random(BLOCK).tolist(); nbuf = BLOCK; pos = 0
        b = int(buf[pos] * (len(bases) // M)); pos += 1
        members_b = bases[b * M:(b + 1) * M]
        label = 1 + min([dist[v] for v in members_b])
        if kind == 0:
            sel = label == arg
        elif kind == 1:
            sel = arg in members_b
        elif kind == 2:
            sel = all([v in members_b for v in arg])
        else:
            sel = True
        for v in members_b:
            d = degrees[v]
            if members[v]:
                xs[d] -= 1
                if d + 1 == len(xs):
                    xs.append(0)
                xs[d + 1] += 1
            hist[d] -= 1
            if d + 1 == len(hist):
                hist.append(0)
            hist[d + 1] += 1
            degrees[v] = d + 1
        members.append(sel)
        if sel:
            xs[M] += 1
            newsel[M] += 1
            s_size += 1
        degrees.append(M)
        hist[M] += 1
        newdeg[M] += 1
        edge_count += M
        for i in range(M):
            new = members_b[:]
            new[i] = nv
            bases.extend(new)
        dist.append(label)
        n += 1
        if n == next_cp:
            state.n = n
            state.edge_count = edge_count
            selection.s_size = s_size
            out.append(_checked(state, selection))
            wi += 1
            next_cp = wanted[wi] if wi < len(wanted) else -1
    state.n = n
    state.edge_count = edge_count
    selection.s_size = s_size
    rng._buf, rng._pos = buf, pos
    return out


def run_replica(params, rule, n_steps, checkpoints=None, seed=0, fast=True):
    """Evolve a fresh replica; returns ``(checkpoints, state, selection)``."""
    if checkpoints is None:
        checkpoints = dyadic_schedule(n_steps)
    state = init_state(params, RandomSource(seed))
    selection = init_selection(rule, state)
    runner = evolve_fast if fast else evolve
    cps = runner(state, selection, n_steps, checkpoints)
    return cps, state, selection
