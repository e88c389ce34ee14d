# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cascade engine.

Mirror of ``_pure.py`` for the kernels in the built-in catalog: identical
key derivation, identical draw order, identical arithmetic (the build turns
off fp contraction), so results are bit-identical to the pure backend.
"""

from libc.math cimport (exp, expm1, fabs, log, log1p, pow, sin, sinh, sqrt,
                        M_PI, INFINITY, NAN)
from libc.stdlib cimport free, malloc, realloc

from .errors import GenerationCapError, NodeBudgetError, SamplingFailureError

ctypedef unsigned long long u64

cdef u64 GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 MUL1 = 0xBF58476D1CE4E5B9ULL
cdef u64 MUL2 = 0x94D049BB133111EBULL
cdef u64 CLOCK_TAG = 0x243F6A8885A308D3ULL
cdef u64 STATE_TAG = 0x13198A2E03707344ULL
cdef u64 CHILD1_TAG = 0xA4093822299F31D0ULL
cdef u64 CHILD2_TAG = 0x082EFA98EC4E6C89ULL

cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef long REJECTION_CAP = 1000000




cdef inline u64 mix64(u64 z) nogil:
    z ^= z >> 30
    z = z * MUL1
    z ^= z >> 27
    z = z * MUL2
    z ^= z >> 31
    return z


cdef inline u64 child_key(u64 key, int branch) nogil:
    if branch == 1:
        return mix64(key ^ CHILD1_TAG)
    return mix64(key ^ CHILD2_TAG)


cdef inline double clock_of(u64 key) nogil:
    cdef u64 z = mix64(key ^ CLOCK_TAG)
    return -log(((z >> 11) + 0.5) * INV_2_53)


cdef struct Stream:
    u64 base
    u64 i


cdef inline void stream_init(Stream* s, u64 key) nogil:
    s.base = key ^ STATE_TAG
    s.i = 0


cdef inline double nu(Stream* s) nogil:
    s.i += 1
    cdef u64 z = mix64(s.base + s.i * GOLDEN)
    return ((z >> 11) + 0.5) * INV_2_53


cdef inline double ipow(double base, long expo) nogil:
    cdef double result = 1.0
    while expo:
        if expo & 1:
            result *= base
        base *= base
        expo >>= 1
    return result


# ---------------------------------------------------------------------------
# Kernel dispatch (ids match dsycascade.kernels.ENGINE_*)
# ---------------------------------------------------------------------------

cdef inline double lam_of(int kind, double* p, double x) nogil:
    if kind <= 2:          # alpha-Riccati, mean-field, geometric-like
        return x
    elif kind == 3:        # birth-death: b ** k
        return pow(p[1], x)
    elif kind == 4:        # KPP: 1 + xi^2
        return 1.0 + x * x
    else:                  # Bessel, scale-invariant, Burgers: x^2
        return x * x


cdef inline double kpph(double y) nogil:
    cdef double t = M_PI * fabs(y)
    if t < 1e-8:
        return (3.0 / M_PI) * (1.0 - t * t / 6.0)
    if t > 700.0:
        return 0.0
    return 3.0 * fabs(y) / sinh(t)


cdef int sample_children(int kind, double* p, double x, u64 key,
                         double* c1, double* c2) nogil:
    """Draw the joint child pair. Returns 0 on success, 1 on rejection-cap
    failure. Consumes the vertex state stream exactly like the pure engine."""
    cdef Stream s
    cdef double q, u, v, y, env, g, eta, target, m_phi, ss, r1, r2, p_up
    cdef long proposals, m
    stream_init(&s, key)

    if kind == 0:          # alpha-Riccati: deterministic ratio
        c1[0] = p[0] * x
        c2[0] = p[0] * x
        return 0

    if kind == 1:          # mean-field, exponential law
        c1[0] = -log(nu(&s)) / p[0]
        c2[0] = -log(nu(&s)) / p[0]
        return 0

    if kind == 2:          # geometric-like: inverse CDF on (0, 2x)
        q = -expm1(-2.0 * x)
        c1[0] = -log1p(-nu(&s) * q)
        c2[0] = -log1p(-nu(&s) * q)
        return 0

    if kind == 3:          # birth-death, reflecting at 1
        if x < 1.5:
            c1[0] = 2.0
        else:
            c1[0] = x - 1.0 if nu(&s) < p[0] else x + 1.0
        if x < 1.5:
            c2[0] = 2.0
        else:
            c2[0] = x - 1.0 if nu(&s) < p[0] else x + 1.0
        return 0

    if kind == 4:          # KPP: W1 ~ normalized convolution law, W2 = x - W1
        # params: (c1, a_cap, beta, c2s, w_low, w_tot)
        m_phi = p[0] * pow(kpph(0.5 * x), 1.5) / ((1.0 + x * x) * kpph(x))
        proposals = 0
        while True:
            proposals += 1
            if proposals > REJECTION_CAP:
                return 1
            u = nu(&s)
            if u * p[5] < p[4]:
                y = nu(&s)
                env = p[1]
            else:
                y = 1.0 - log(nu(&s)) / p[2]
                env = p[3] * exp(-p[2] * y)
            g = pow(kpph(y), 0.25)
            if nu(&s) * env >= g:
                continue
            eta = y if nu(&s) < 0.5 else -y
            target = kpph(eta) * kpph(x - eta) / ((1.0 + x * x) * kpph(x))
            if nu(&s) * (m_phi * g) < target:
                c1[0] = eta
                c2[0] = x - eta
                return 0

    if kind == 5:          # Bessel: two conditionally independent draws
        if bessel_child(x, &s, c1):
            return 1
        if bessel_child(x, &s, c2):
            return 1
        return 0

    if kind == 6:          # scale-invariant cascade: triangle angles
        m = <long> p[0] - 3
        proposals = 0
        while True:
            proposals += 1
            if proposals > REJECTION_CAP:
                return 1
            u = nu(&s)
            v = nu(&s)
            if u + v > 1.0:
                u = 1.0 - u
                v = 1.0 - v
            ss = sin(M_PI * (u + v))
            if ss < 1e-14:
                continue
            if m > 0 and nu(&s) >= ipow(ss, m):
                continue
            r1 = sin(M_PI * v) / ss
            r2 = sin(M_PI * u) / ss
            c1[0] = x * r1
            c2[0] = x * r2
            return 0

    # kind == 7: complex Burgers, independent uniform ratios
    c1[0] = x * nu(&s)
    c2[0] = x * nu(&s)
    return 0


cdef int bessel_child(double x, Stream* s, double* out) nogil:
    cdef double p_up = -expm1(-2.0 * x) / (2.0 * x)
    cdef double y
    cdef long iterations = 0
    if nu(s) < p_up:
        out[0] = x - 0.5 * log(nu(s))
        return 0
    if x <= 1.0:
        while True:
            iterations += 1
            if iterations > REJECTION_CAP:
                return 1
            y = x * sqrt(nu(s))
            if nu(s) < -expm1(-2.0 * y) / (2.0 * y):
                out[0] = y
                return 0
    while True:
        iterations += 1
        if iterations > REJECTION_CAP:
            return 1
        y = x * nu(s)
        if nu(s) < -expm1(-2.0 * y):
            out[0] = y
            return 0


# ---------------------------------------------------------------------------
# Binary heap over (priority, insertion index)
# ---------------------------------------------------------------------------

cdef struct Node:
    double pri
    u64 seq
    int gen
    double state
    u64 key


cdef struct Heap:
    Node* items
    long size
    long capacity


cdef inline bint node_lt(Node* a, Node* b) nogil:
    return a.pri < b.pri or (a.pri == b.pri and a.seq < b.seq)


cdef int heap_init(Heap* h, long capacity) nogil:
    h.items = <Node*> malloc(capacity * sizeof(Node))
    h.size = 0
    h.capacity = capacity
    return 0 if h.items != NULL else 1


cdef int heap_push(Heap* h, Node node) nogil:
    cdef long i, parent
    cdef Node tmp
    cdef Node* items
    if h.size == h.capacity:
        h.capacity *= 2
        items = <Node*> realloc(h.items, h.capacity * sizeof(Node))
        if items == NULL:
            return 1
        h.items = items
    i = h.size
    h.size += 1
    h.items[i] = node
    while i > 0:
        parent = (i - 1) >> 1
        if node_lt(&h.items[i], &h.items[parent]):
            tmp = h.items[i]
            h.items[i] = h.items[parent]
            h.items[parent] = tmp
            i = parent
        else:
            break
    return 0


cdef Node heap_pop(Heap* h) nogil:
    cdef Node top = h.items[0]
    cdef Node tmp
    cdef long i = 0, child
    h.size -= 1
    if h.size > 0:
        h.items[0] = h.items[h.size]
        while True:
            child = 2 * i + 1
            if child >= h.size:
                break
            if child + 1 < h.size and node_lt(&h.items[child + 1], &h.items[child]):
                child += 1
            if node_lt(&h.items[child], &h.items[i]):
                tmp = h.items[i]
                h.items[i] = h.items[child]
                h.items[child] = tmp
                i = child
            else:
                break
    return top


cdef void load_params(tuple params, double* p):
    cdef int i
    for i in range(8):
        p[i] = 0.0
    for i in range(len(params)):
        p[i] = params[i]


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def horizon(int kind, tuple params, double a, double t, long vertex_cap,
            u64 root_key, bint record_births, int gen_cap):
    cdef double p[8]
    load_params(params, p)
    cdef long live = 1, survivors = 0, expansions = 0
    cdef int max_gen = 0
    cdef bint cap_hit = live >= vertex_cap
    cdef Heap h
    cdef Node node, child
    cdef u64 seq = 1, ck
    cdef double c1 = 0.0, c2 = 0.0
    cdef int branch
    births_t = [0.0] if record_births else None
    births_g = [0] if record_births else None

    if not cap_hit:
        if heap_init(&h, 1024):
            raise MemoryError
        node.pri = clock_of(root_key) / lam_of(kind, p, a)
        node.seq = 0
        node.gen = 0
        node.state = a
        node.key = root_key
        heap_push(&h, node)
        try:
            while h.size > 0:
                node = heap_pop(&h)
                if node.pri >= t:
                    survivors += 1
                    continue
                if node.gen + 1 > gen_cap:
                    raise GenerationCapError(
                        f"expansion reached generation cap {gen_cap}")
                if sample_children(kind, p, node.state, node.key, &c1, &c2):
                    raise SamplingFailureError(
                        "rejection sampler exhausted its cap",
                        generation=node.gen, key=node.key)
                for branch in range(1, 3):
                    ck = child_key(node.key, branch)
                    child.state = c1 if branch == 1 else c2
                    child.pri = node.pri + clock_of(ck) / lam_of(kind, p, child.state)
                    child.seq = seq
                    child.gen = node.gen + 1
                    child.key = ck
                    seq += 1
                    if heap_push(&h, child):
                        raise MemoryError
                expansions += 1
                live += 1
                if node.gen + 1 > max_gen:
                    max_gen = node.gen + 1
                if record_births:
                    births_t.append(node.pri)
                    births_t.append(node.pri)
                    births_g.append(node.gen + 1)
                    births_g.append(node.gen + 1)
                if live >= vertex_cap:
                    cap_hit = True
                    break
        finally:
            free(h.items)
    population = live if cap_hit else survivors
    return population, cap_hit, expansions, max_gen, births_t, births_g


def zeta_curve(int kind, tuple params, double a, int n_max, int stop_gap,
               double stop_tol, long node_budget, u64 root_key):
    cdef double p[8]
    load_params(params, p)
    zetas = [float("nan")] * (n_max + 1)
    cdef char* found = <char*> malloc(n_max + 1)
    if found == NULL:
        raise MemoryError
    cdef int i
    for i in range(n_max + 1):
        found[i] = 0
    cdef Heap h
    if heap_init(&h, 1024):
        free(found)
        raise MemoryError
    cdef Node node, child
    cdef u64 seq = 1, ck
    cdef double c1 = 0.0, c2 = 0.0, prev
    cdef long pops = 0
    cdef int branch, g
    node.pri = clock_of(root_key) / lam_of(kind, p, a)
    node.seq = 0
    node.gen = 0
    node.state = a
    node.key = root_key
    heap_push(&h, node)
    try:
        while h.size > 0:
            node = heap_pop(&h)
            pops += 1
            g = node.gen
            if not found[g]:
                found[g] = 1
                zetas[g] = node.pri
                if g == n_max:
                    return zetas, g, False, pops
                if stop_gap and g >= stop_gap and found[g - stop_gap]:
                    prev = zetas[g - stop_gap]
                    if node.pri - prev < stop_tol:
                        return zetas[:g + 1], g, True, pops
            if g == n_max:
                continue
            if sample_children(kind, p, node.state, node.key, &c1, &c2):
                raise SamplingFailureError(
                    "rejection sampler exhausted its cap",
                    generation=g, key=node.key)
            for branch in range(1, 3):
                ck = child_key(node.key, branch)
                child.state = c1 if branch == 1 else c2
                child.pri = node.pri + clock_of(ck) / lam_of(kind, p, child.state)
                child.seq = seq
                child.gen = g + 1
                child.key = ck
                seq += 1
                if heap_push(&h, child):
                    raise MemoryError
            if seq > <u64> node_budget:
                raise NodeBudgetError(
                    f"best-first search exceeded its node budget ({node_budget})")
    finally:
        free(h.items)
        free(found)
    raise AssertionError("unreachable: binary tree search ran out of nodes")


def greedy(int kind, tuple params, double a, long term_cap, double tail_tol,
           u64 root_key):
    cdef double p[8]
    load_params(params, p)
    cdef u64 key = root_key, ck
    cdef double x = a
    cdef double z = lam_of(kind, p, a)
    cdef double term = clock_of(key) / z
    cdef double partial = term
    cdef double ratio_sum = 0.0, kappa_hat = NAN, z_new, l1, l2
    cdef double c1 = 0.0, c2 = 0.0
    cdef bint converged = False
    cdef long j
    cdef int branch
    intensities = [z]
    terms = [term]
    for j in range(1, term_cap):
        if sample_children(kind, p, x, key, &c1, &c2):
            raise SamplingFailureError(
                "rejection sampler exhausted its cap", generation=j - 1, key=key)
        l1 = lam_of(kind, p, c1)
        l2 = lam_of(kind, p, c2)
        if l1 >= l2:
            branch = 1
            x = c1
            z_new = l1
        else:
            branch = 2
            x = c2
            z_new = l2
        key = child_key(key, branch)
        term = clock_of(key) / z_new
        partial += term
        ratio_sum += z / z_new
        z = z_new
        intensities.append(z)
        terms.append(term)
        kappa_hat = ratio_sum / j
        if kappa_hat < 1.0 and term * kappa_hat / (1.0 - kappa_hat) < tail_tol:
            converged = True
            break
    return partial, len(terms), converged, kappa_hat, intensities, terms


def selftest_rng(u64 key):
    """Expose the key/stream primitives for cross-backend tests."""
    cdef Stream s
    stream_init(&s, key)
    return (clock_of(key), child_key(key, 1), child_key(key, 2),
            nu(&s), nu(&s), nu(&s))
