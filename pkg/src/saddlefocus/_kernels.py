"""Compiled scalar kernels shared by every public module.

All map arithmetic lives here so that the scalar API, the sweeps and the
orbit diagrams evaluate bit-identical floating point for identical inputs.
Kernels never raise; they report through integer status codes and the
callers translate those into exceptions or sentinels.
"""

import math

import numpy as np
from numba import njit

# trajectory status codes (mirrored by mapcore.Status)
MAX_ITERATIONS = 0
REACHED_ZERO = 1
DIVERGED = 2
LEFT_DOMAIN = 3

DIVERGENCE_GUARD = 1e12

# field kind codes (mirrored by sweep.FieldKind)
FIELD_ITERATE = 0
FIELD_EMBEDDING = 1
FIELD_LYAPUNOV = 2
FIELD_LZ = 3
FIELD_PERIOD = 4

SENTINEL_DIVERGED = 1e308
SENTINEL_REACHED_ZERO = -1e308
SENTINEL_UNDEFINED = 1.7976931348623157e308


# ---------------------------------------------------------------------------
# Map and derivative
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def map_step(x, rho, mu, omega, phi):
    # evaluated on |x| and negated afterwards: odd symmetry is exact
    a = abs(x)
    v = mu + a ** rho * math.cos(omega * math.log(a) + phi)
    if x < 0.0:
        return -v
    return v


@njit(cache=True, nogil=True)
def map_derivative(x, rho, omega, phi):
    a = abs(x)
    amp = math.sqrt(rho * rho + omega * omega)
    return a ** (rho - 1.0) * amp * math.cos(omega * math.log(a) + math.atan2(omega, rho) + phi)


@njit(cache=True, nogil=True)
def _classify(x, symmetric, zero_eps):
    if not (abs(x) <= DIVERGENCE_GUARD):
        return DIVERGED
    if abs(x) < zero_eps:
        return REACHED_ZERO
    if not symmetric and x <= 0.0:
        return LEFT_DOMAIN
    return -1


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def iterate_into(x0, rho, mu, omega, phi, symmetric, zero_eps, out):
    """Fill ``out`` with x0, f(x0), ... ; return (count, status)."""
    out[0] = x0
    status = _classify(x0, symmetric, zero_eps)
    if status >= 0:
        return 1, status
    x = x0
    n = out.shape[0]
    for i in range(1, n):
        x = map_step(x, rho, mu, omega, phi)
        out[i] = x
        status = _classify(x, symmetric, zero_eps)
        if status >= 0:
            return i + 1, status
    return n, MAX_ITERATIONS


@njit(cache=True, nogil=True)
def nth_iterate(x1, rho, mu, omega, phi, symmetric, n, zero_eps):
    """Apply the map n times to x1; intermediate states must stay regular.

    Returns (value, status) where status < 0 means a regular value.  The
    final image itself is returned whatever its magnitude or sign, because
    its zero set is the object of interest.
    """
    x = x1
    for _ in range(n):
        status = _classify(x, symmetric, zero_eps)
        if status >= 0:
            return x, status
        x = map_step(x, rho, mu, omega, phi)
    if not (abs(x) <= DIVERGENCE_GUARD):
        return x, DIVERGED
    return x, -1


@njit(cache=True, nogil=True)
def lyapunov(x0, rho, mu, omega, phi, symmetric, n_transient, n_sample):
    """Mean of log|f'| along an orbit; +inf diverged, -inf superstable, nan off-domain."""
    x = x0
    for _ in range(n_transient):
        if x == 0.0:
            return -math.inf
        if not symmetric and x < 0.0:
            return math.nan
        x = map_step(x, rho, mu, omega, phi)
        if not (abs(x) <= DIVERGENCE_GUARD):
            return math.inf
    acc = 0.0
    for _ in range(n_sample):
        if x == 0.0:
            return -math.inf
        if not symmetric and x < 0.0:
            return math.nan
        d = abs(map_derivative(x, rho, omega, phi))
        if d == 0.0:
            return -math.inf
        acc += math.log(d)
        x = map_step(x, rho, mu, omega, phi)
        if not (abs(x) <= DIVERGENCE_GUARD):
            return math.inf
    return acc / n_sample


@njit(cache=True, nogil=True)
def mean_log_derivative(points, rho, omega, phi):
    acc = 0.0
    for i in range(points.shape[0]):
        d = abs(map_derivative(points[i], rho, omega, phi))
        if d == 0.0:
            return -math.inf
        acc += math.log(d)
    return acc / points.shape[0]


@njit(cache=True, nogil=True)
def orbit_run(x0, rho, mu, omega, phi, symmetric, n_transient, out):
    """Discard n_transient iterates, then record len(out) states.

    Returns (count, status).  Unlike ``iterate_into`` the orbit is allowed to
    pass close to the origin; only an exact zero stops it.
    """
    x = x0
    for _ in range(n_transient):
        if x == 0.0:
            return 0, REACHED_ZERO
        if not symmetric and x < 0.0:
            return 0, LEFT_DOMAIN
        x = map_step(x, rho, mu, omega, phi)
        if not (abs(x) <= DIVERGENCE_GUARD):
            return 0, DIVERGED
    for i in range(out.shape[0]):
        out[i] = x
        if x == 0.0:
            return i + 1, REACHED_ZERO
        if not symmetric and x < 0.0:
            return i + 1, LEFT_DOMAIN
        x = map_step(x, rho, mu, omega, phi)
        if not (abs(x) <= DIVERGENCE_GUARD):
            return i + 1, DIVERGED
    return out.shape[0], MAX_ITERATIONS


@njit(cache=True, nogil=True)
def window_period(window, max_period, tol):
    """Smallest p with |w[i+p] - w[i]| < tol*amp for i < 3p; 0 if none."""
    amp = 0.0
    for i in range(window.shape[0]):
        if abs(window[i]) > amp:
            amp = abs(window[i])
    thr = tol * max(amp, 1e-300)
    for p in range(1, max_period + 1):
        if 4 * p > window.shape[0]:
            break
        ok = True
        for i in range(3 * p):
            if not (abs(window[i + p] - window[i]) < thr):
                ok = False
                break
        if ok:
            return p
    return 0


@njit(cache=True, nogil=True)
def detect_period(x0, rho, mu, omega, phi, symmetric, n_transient, max_period, tol):
    """Return (period or 0, status)."""
    window = np.empty(4 * max_period)
    count, status = orbit_run(x0, rho, mu, omega, phi, symmetric, n_transient, window)
    if status != MAX_ITERATIONS:
        return 0, status
    return window_period(window, max_period, tol), status


# ---------------------------------------------------------------------------
# Symbolic coding
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def encode_into(rho, mu, omega, phi, symmetric, negative, zero_eps, bits):
    """Write the itinerary of the orbit leaving the origin; return (len, status).

    bits[0] is the departure branch; bits[k] (k >= 1) records whether x_k has
    the sign of mu, i.e. the direction of the excursion that starts at x_k.
    """
    n = bits.shape[0]
    if negative:
        bits[0] = 0
        x = -mu
    else:
        bits[0] = 1
        x = mu
    sgn = 1.0 if mu > 0.0 else -1.0
    count = 1
    while count < n:
        if abs(x) < zero_eps:
            return count, REACHED_ZERO
        if not (abs(x) <= DIVERGENCE_GUARD):
            return count, DIVERGED
        bits[count] = 1 if x * sgn > 0.0 else 0
        count += 1
        if not symmetric and x <= 0.0:
            return count, LEFT_DOMAIN
        if count >= n:
            break
        x = map_step(x, rho, mu, omega, phi)
    return count, MAX_ITERATIONS


@njit(cache=True, nogil=True)
def lz_phrase_count(bits, n):
    """Dictionary-parse phrase count of bits[:n].

    Each phrase is the shortest block not already in the set of earlier
    phrases; a trailing block equal to an earlier phrase is not counted.
    Phrases are stored in a binary trie, so the parse is linear in n.
    """
    child = np.full((n + 1, 2), -1, dtype=np.int64)
    nodes = 1
    node = 0
    count = 0
    for i in range(n):
        b = bits[i]
        nxt = child[node, b]
        if nxt >= 0:
            node = nxt
        else:
            child[node, b] = nodes
            nodes += 1
            count += 1
            node = 0
    return count


@njit(cache=True, nogil=True)
def embed_truncated(bits, n):
    """sum bits[i] 2^-(i+1), truncated to 53 significant bits (round toward zero)."""
    first = -1
    for i in range(n):
        if bits[i] != 0:
            first = i
            break
    if first < 0:
        return 0.0
    acc = 0.0
    stop = min(n, first + 53)
    for i in range(first, stop):
        if bits[i] != 0:
            acc += math.ldexp(1.0, -(i + 1))
    return acc


# ---------------------------------------------------------------------------
# Field evaluation over flat parameter arrays
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _status_sentinel(status):
    if status == DIVERGED:
        return SENTINEL_DIVERGED
    if status == REACHED_ZERO:
        return SENTINEL_REACHED_ZERO
    return SENTINEL_UNDEFINED


@njit(cache=True, nogil=True)
def field_value(kind, rho, mu, omega, phi, symmetric, negative, zero_eps,
                iarg0, iarg1, tol, scratch):
    if mu == 0.0:
        return SENTINEL_UNDEFINED
    if not symmetric and (negative or mu < 0.0):
        return SENTINEL_UNDEFINED
    x1 = -mu if negative else mu

    if kind == FIELD_ITERATE:
        v, status = nth_iterate(x1, rho, mu, omega, phi, symmetric, iarg0, zero_eps)
        if status >= 0:
            return _status_sentinel(status)
        return v

    if kind == FIELD_EMBEDDING:
        n, status = encode_into(rho, mu, omega, phi, symmetric, negative, zero_eps, scratch[:iarg0])
        if status == REACHED_ZERO or status == DIVERGED:
            return _status_sentinel(status)
        if not symmetric:
            # one-sided itineraries are cut before their first 0 symbol
            m = 0
            while m < n and scratch[m] == 1:
                m += 1
            n = m
        return embed_truncated(scratch, n)

    if kind == FIELD_LYAPUNOV:
        v = lyapunov(x1, rho, mu, omega, phi, symmetric, iarg0, iarg1)
        if v == math.inf:
            return SENTINEL_DIVERGED
        if v == -math.inf:
            return SENTINEL_REACHED_ZERO
        if v != v:
            return SENTINEL_UNDEFINED
        return v

    if kind == FIELD_LZ:
        n, status = encode_into(rho, mu, omega, phi, symmetric, negative, zero_eps, scratch[:iarg0])
        if status != MAX_ITERATIONS or n < 2:
            return _status_sentinel(status)
        c = lz_phrase_count(scratch, n)
        return math.log(n) / n * c

    if kind == FIELD_PERIOD:
        p, status = detect_period(x1, rho, mu, omega, phi, symmetric, iarg1, iarg0, tol)
        if status != MAX_ITERATIONS:
            return _status_sentinel(status)
        return float(p)

    return SENTINEL_UNDEFINED


@njit(cache=True, nogil=True)
def fill_field(kind, rho, mu, omega, phi, symmetric, negative, zero_eps,
               iarg0, iarg1, tol, out):
    """Evaluate a field at every index of the flat parameter arrays."""
    scratch = np.empty(max(iarg0, 1), dtype=np.int8)
    for i in range(out.shape[0]):
        out[i] = field_value(kind, rho[i], mu[i], omega[i], phi[i], symmetric, negative,
                             zero_eps, iarg0, iarg1, tol, scratch)


# ---------------------------------------------------------------------------
# Residuals scanned by the curve root finders
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def secondary_residual(mu, rho, omega, phi):
    return map_step(mu, rho, mu, omega, phi)


@njit(cache=True, nogil=True)
def implicit_residual(mu, rho, omega, phi, c, k_even, signed):
    """Second-image tangency residual for the k-th critical point.

    c is |mu| of the k-th explicit tangency.  The map-consistent form uses
    x_2 = f(x_c) = mu -+ c; the signed form uses x_2 = +-mu + c.
    """
    sgn = 1.0 if k_even else -1.0
    if signed:
        x2 = sgn * mu + c
    else:
        x2 = mu - sgn * c
    a = abs(x2)
    if a == 0.0:
        return mu
    return mu + a ** rho * math.cos(omega * math.log(a) + phi)


@njit(cache=True, nogil=True)
def secondary_scan(rho, omega, phi, mus, out):
    for i in range(mus.shape[0]):
        out[i] = secondary_residual(mus[i], rho, omega, phi)


@njit(cache=True, nogil=True)
def implicit_scan(rho, omega, phi, c, k_even, signed, mus, out):
    for i in range(mus.shape[0]):
        out[i] = implicit_residual(mus[i], rho, omega, phi, c, k_even, signed)
