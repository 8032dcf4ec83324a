"""Hot loops: counter-based draws, rejection samplers, batched RK4, counting.

Every kernel exists twice. ``*_nb`` is an explicit per-pair loop compiled by
numba; ``*_np`` is the vectorised numpy equivalent working on whole pair
batches. The public names at the bottom dispatch to one or the other
according to :data:`pairslit._accel.USE_NUMBA`. Both paths consume the same
counters in the same order, so they produce the same samples.

Field parameters travel as a flat float64 array (see ``FIELD_*`` indices) so
the compiled loops take only plain arrays.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

FIELD_KAX, FIELD_KAY, FIELD_KBX, FIELD_KBY = 0, 1, 2, 3
FIELD_HBAR_M = 4
FIELD_BOSE = 5
FIELD_SIGMA = 6
FIELD_NORM = 7
FIELD_SIZE = 8

# nodes: 1 + cos(k.r) at or below this is treated as zero density
NODE_REL = 2e-12

STATUS_OK = 0
STATUS_NODE = 1
STATUS_STALL = 2

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


# ---------------------------------------------------------------- RNG

# Helpers below are shared verbatim by both paths, so they cannot call each
# other (numba would see the plain-python callee). The mixer is inlined.

def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _stream_key(seed, stream):
    z = (stream + _ONE) * _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    z = seed ^ z ^ (z >> _S31)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _uniform(key, counter):
    # SplitMix64 output at position ``counter`` of the sequence seeded by key
    z = key + (counter + _ONE) * _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    z = z ^ (z >> _S31)
    return (z >> _S11) * _INV53


_mix64_nb = njit(_mix64)
_stream_key_nb = njit(_stream_key)
_uniform_nb = njit(_uniform)


# ---------------------------------------------------------------- field

def _density(x1, x2, f):
    g2 = np.exp(-(x1 * x1 + x2 * x2) / (2.0 * f[FIELD_SIGMA] * f[FIELD_SIGMA]))
    if f[FIELD_BOSE] > 0.5:
        kx = f[FIELD_KAX] - f[FIELD_KBX]
        return 2.0 * f[FIELD_NORM] * g2 * (1.0 + np.cos(kx * (x1 - x2)))
    return f[FIELD_NORM] * g2


def _is_node(x1, y1, x2, y2, f):
    if f[FIELD_BOSE] > 0.5:
        phase = (f[FIELD_KAX] - f[FIELD_KBX]) * (x1 - x2) + (f[FIELD_KAY] - f[FIELD_KBY]) * (y1 - y2)
        return 1.0 + np.cos(phase) <= NODE_REL
    return x1 != x1


def _velocity(x1, y1, x2, y2, f):
    """Guidance velocities ``(hbar/m) Im(grad_j psi / psi)`` for both particles.

    The real envelope drops out of the imaginary part, so only the plane-wave
    phases enter. Returns ``(v1x, v1y, v2x, v2y, node)``.
    """
    kax = f[FIELD_KAX]
    kay = f[FIELD_KAY]
    kbx = f[FIELD_KBX]
    kby = f[FIELD_KBY]
    hm = f[FIELD_HBAR_M]
    if f[FIELD_BOSE] > 0.5:
        # psi ~ e^{i a} + e^{i b}; weights w_a = e^{ia}/S, w_b = e^{ib}/S with
        # b - a = -k.r. Only their real parts enter the current.
        delta = (kax - kbx) * (x1 - x2) + (kay - kby) * (y1 - y2)
        c = np.cos(delta)
        s = np.sin(delta)
        one_c = 1.0 + c
        denom = one_c * one_c + s * s
        wa = one_c / denom
        wb = (c + 1.0) / denom
        v1x = hm * (kax * wa + kbx * wb)
        v1y = hm * (kay * wa + kby * wb)
        v2x = hm * (kbx * wa + kax * wb)
        v2y = hm * (kby * wa + kay * wb)
        return v1x, v1y, v2x, v2y, one_c <= NODE_REL
    zero = x1 * 0.0
    return zero + hm * kax, zero + hm * kay, zero + hm * kbx, zero + hm * kby, x1 != x1


_density_nb = njit(_density)
_is_node_nb = njit(_is_node)
_velocity_nb = njit(_velocity)


# ---------------------------------------------------------------- samplers

@njit
def _sample_symmetric_nb(seed, n, half_width, f, bound, max_attempts, out_x):
    seed = np.uint64(seed)
    for i in range(n):
        key = _stream_key_nb(seed, np.uint64(i))
        accepted = False
        for j in range(max_attempts):
            c = np.uint64(2 * j)
            x = -half_width + 2.0 * half_width * _uniform_nb(key, c)
            u = _uniform_nb(key, c + np.uint64(1))
            if u * bound < _density_nb(x, -x, f) and not _is_node_nb(x, 0.0, -x, 0.0, f):
                out_x[i] = x
                accepted = True
                break
        if not accepted:
            return i
    return -1


@np.errstate(over="ignore")
def _sample_symmetric_np(seed, n, half_width, f, bound, max_attempts, out_x):
    keys = _stream_key(np.uint64(seed), np.arange(n, dtype=np.uint64))
    pending = np.arange(n)
    for j in range(max_attempts):
        if pending.size == 0:
            return -1
        k = keys[pending]
        c = np.uint64(2 * j)
        x = -half_width + 2.0 * half_width * _uniform(k, c)
        u = _uniform(k, c + _ONE)
        ok = (u * bound < _density(x, -x, f)) & ~_is_node(x, 0.0, -x, 0.0, f)
        out_x[pending[ok]] = x[ok]
        pending = pending[~ok]
    return int(pending[0]) if pending.size else -1


@njit
def _sample_gibbs_nb(seed, n, half_width, f, bound, max_attempts, out_x1, out_x2):
    seed = np.uint64(seed)
    for i in range(n):
        key = _stream_key_nb(seed, np.uint64(i))
        accepted = False
        for j in range(max_attempts):
            c = np.uint64(3 * j)
            x1 = -half_width + 2.0 * half_width * _uniform_nb(key, c)
            x2 = -half_width + 2.0 * half_width * _uniform_nb(key, c + np.uint64(1))
            u = _uniform_nb(key, c + np.uint64(2))
            if u * bound < _density_nb(x1, x2, f) and not _is_node_nb(x1, 0.0, x2, 0.0, f):
                out_x1[i] = x1
                out_x2[i] = x2
                accepted = True
                break
        if not accepted:
            return i
    return -1


@np.errstate(over="ignore")
def _sample_gibbs_np(seed, n, half_width, f, bound, max_attempts, out_x1, out_x2):
    keys = _stream_key(np.uint64(seed), np.arange(n, dtype=np.uint64))
    pending = np.arange(n)
    for j in range(max_attempts):
        if pending.size == 0:
            return -1
        k = keys[pending]
        c = np.uint64(3 * j)
        x1 = -half_width + 2.0 * half_width * _uniform(k, c)
        x2 = -half_width + 2.0 * half_width * _uniform(k, c + _ONE)
        u = _uniform(k, c + np.uint64(2))
        ok = (u * bound < _density(x1, x2, f)) & ~_is_node(x1, 0.0, x2, 0.0, f)
        out_x1[pending[ok]] = x1[ok]
        out_x2[pending[ok]] = x2[ok]
        pending = pending[~ok]
    return int(pending[0]) if pending.size else -1


# ---------------------------------------------------------------- RK4

@njit
def _integrate_nb(x1, y1, x2, y2, t0, h, screen, f, max_steps, record, samples, n_samples,
                  t1s, x1s, t2s, x2s, drift, crossed, status):
    half = 0.5 * h
    for i in range(x1.shape[0]):
        a1 = x1[i]
        b1 = y1[i]
        a2 = x2[i]
        b2 = y2[i]
        t = t0[i]
        s0 = a1 + a2
        sign0 = a1
        done1 = False
        done2 = False
        worst = 0.0
        flip = False
        st = STATUS_STALL
        if record:
            samples[i, 0, 0] = t
            samples[i, 0, 1] = a1
            samples[i, 0, 2] = b1
            samples[i, 0, 3] = a2
            samples[i, 0, 4] = b2
        ns = 1
        for _ in range(max_steps):
            k1 = _velocity_nb(a1, b1, a2, b2, f)
            k2 = _velocity_nb(a1 + half * k1[0], b1 + half * k1[1],
                              a2 + half * k1[2], b2 + half * k1[3], f)
            k3 = _velocity_nb(a1 + half * k2[0], b1 + half * k2[1],
                              a2 + half * k2[2], b2 + half * k2[3], f)
            k4 = _velocity_nb(a1 + h * k3[0], b1 + h * k3[1],
                              a2 + h * k3[2], b2 + h * k3[3], f)
            if k1[4] or k2[4] or k3[4] or k4[4]:
                st = STATUS_NODE
                break
            n1 = a1 + h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
            m1 = b1 + h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
            n2 = a2 + h * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) / 6.0
            m2 = b2 + h * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]) / 6.0
            dev = abs((n1 + n2) - s0)
            if dev > worst:
                worst = dev
            if not done1:
                if m1 >= screen:
                    frac = (screen - b1) / (m1 - b1)
                    t1s[i] = t + frac * h
                    x1s[i] = a1 + frac * (n1 - a1)
                    done1 = True
                    if x1s[i] * sign0 < 0.0:
                        flip = True
                elif n1 * sign0 < 0.0:
                    flip = True
            if not done2 and m2 >= screen:
                frac = (screen - b2) / (m2 - b2)
                t2s[i] = t + frac * h
                x2s[i] = a2 + frac * (n2 - a2)
                done2 = True
            a1 = n1
            b1 = m1
            a2 = n2
            b2 = m2
            t = t + h
            if record:
                samples[i, ns, 0] = t
                samples[i, ns, 1] = a1
                samples[i, ns, 2] = b1
                samples[i, ns, 3] = a2
                samples[i, ns, 4] = b2
            ns += 1
            if done1 and done2:
                st = STATUS_OK
                break
        n_samples[i] = ns
        drift[i] = worst
        crossed[i] = flip
        status[i] = st


def _integrate_np(x1, y1, x2, y2, t0, h, screen, f, max_steps, record, samples, n_samples,
                  t1s, x1s, t2s, x2s, drift, crossed, status):
    n = x1.shape[0]
    a1 = x1.copy()
    b1 = y1.copy()
    a2 = x2.copy()
    b2 = y2.copy()
    t = t0.copy()
    s0 = a1 + a2
    sign0 = x1.copy()
    done1 = np.zeros(n, dtype=bool)
    done2 = np.zeros(n, dtype=bool)
    drift[:] = 0.0
    crossed[:] = False
    status[:] = STATUS_STALL
    n_samples[:] = 1
    if record:
        samples[:, 0, :] = np.stack([t, a1, b1, a2, b2], axis=1)
    act = np.arange(n)
    half = 0.5 * h
    for _ in range(max_steps):
        if act.size == 0:
            break
        p1, q1, p2, q2 = a1[act], b1[act], a2[act], b2[act]
        k1 = _velocity(p1, q1, p2, q2, f)
        k2 = _velocity(p1 + half * k1[0], q1 + half * k1[1], p2 + half * k1[2], q2 + half * k1[3], f)
        k3 = _velocity(p1 + half * k2[0], q1 + half * k2[1], p2 + half * k2[2], q2 + half * k2[3], f)
        k4 = _velocity(p1 + h * k3[0], q1 + h * k3[1], p2 + h * k3[2], q2 + h * k3[3], f)
        node = k1[4] | k2[4] | k3[4] | k4[4]
        if node.any():
            status[act[node]] = STATUS_NODE
            keep = ~node
            act = act[keep]
            p1, q1, p2, q2 = p1[keep], q1[keep], p2[keep], q2[keep]
            k1, k2, k3, k4 = ([k[j][keep] for j in range(4)] for k in (k1, k2, k3, k4))
        n1 = p1 + h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
        m1 = q1 + h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
        n2 = p2 + h * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) / 6.0
        m2 = q2 + h * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]) / 6.0
        drift[act] = np.maximum(drift[act], np.abs((n1 + n2) - s0[act]))

        d1 = done1[act]
        hit1 = ~d1 & (m1 >= screen)
        if hit1.any():
            idx = act[hit1]
            frac = (screen - q1[hit1]) / (m1[hit1] - q1[hit1])
            t1s[idx] = t[idx] + frac * h
            x1s[idx] = p1[hit1] + frac * (n1[hit1] - p1[hit1])
            done1[idx] = True
            crossed[idx] |= x1s[idx] * sign0[idx] < 0.0
        moving = ~d1 & ~hit1
        crossed[act[moving]] |= n1[moving] * sign0[act[moving]] < 0.0

        hit2 = ~done2[act] & (m2 >= screen)
        if hit2.any():
            idx = act[hit2]
            frac = (screen - q2[hit2]) / (m2[hit2] - q2[hit2])
            t2s[idx] = t[idx] + frac * h
            x2s[idx] = p2[hit2] + frac * (n2[hit2] - p2[hit2])
            done2[idx] = True

        a1[act], b1[act], a2[act], b2[act] = n1, m1, n2, m2
        t[act] = t[act] + h
        if record:
            ns = n_samples[act]
            samples[act, ns, 0] = t[act]
            samples[act, ns, 1] = n1
            samples[act, ns, 2] = m1
            samples[act, ns, 3] = n2
            samples[act, ns, 4] = m2
        n_samples[act] += 1
        fin = done1[act] & done2[act]
        status[act[fin]] = STATUS_OK
        act = act[~fin]


# ---------------------------------------------------------------- counting

@njit
def _count_nb(x1, x2, p_lo, p_hi, q_lo, q_hi):
    coinc = 0
    sp = 0
    sq = 0
    for i in range(x1.shape[0]):
        a = x1[i]
        b = x2[i]
        ap = p_lo <= a < p_hi
        aq = q_lo <= a < q_hi
        bp = p_lo <= b < p_hi
        bq = q_lo <= b < q_hi
        sp += ap + bp
        sq += aq + bq
        if (ap and bq) or (aq and bp):
            coinc += 1
    return coinc, sp, sq


def _count_np(x1, x2, p_lo, p_hi, q_lo, q_hi):
    ap = (p_lo <= x1) & (x1 < p_hi)
    aq = (q_lo <= x1) & (x1 < q_hi)
    bp = (p_lo <= x2) & (x2 < p_hi)
    bq = (q_lo <= x2) & (x2 < q_hi)
    coinc = int(np.count_nonzero((ap & bq) | (aq & bp)))
    return coinc, int(ap.sum() + bp.sum()), int(aq.sum() + bq.sum())


if USE_NUMBA:
    sample_symmetric_kernel = _sample_symmetric_nb
    sample_gibbs_kernel = _sample_gibbs_nb
    integrate_kernel = _integrate_nb
    count_kernel = _count_nb
else:
    sample_symmetric_kernel = _sample_symmetric_np
    sample_gibbs_kernel = _sample_gibbs_np
    integrate_kernel = _integrate_np
    count_kernel = _count_np
