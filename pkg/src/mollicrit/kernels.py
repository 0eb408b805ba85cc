"""Hot inner loops with two interchangeable backends.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with the same signature.  The numba path is used when numba imports
and the environment variable ``MOLLICRIT_DISABLE_NUMBA`` is unset (or set to
``0``).  ``set_backend`` switches at runtime, which is what the benchmark and
the backend-equivalence tests rely on.

Index convention for Dirichlet coefficient arrays: ``a[n - 1]`` is the
coefficient of ``n**-s``.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
        # prefer OpenMP; an outdated TBB otherwise warns on first launch
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_DISABLED = os.environ.get("MOLLICRIT_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
_backend = "numba" if (HAVE_NUMBA and not _DISABLED) else "numpy"

# rotation is re-seeded from an exact exponential every BLOCK grid points
BLOCK = 128
# numpy fallback keeps temporary matrices near this many complex entries
_CHUNK_ENTRIES = 1 << 21


def backend():
    return _backend


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    prev, _backend = _backend, name
    return prev


def set_threads(n):
    if HAVE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------


def _np_dirichlet_eval(a, s):
    n = np.arange(1, a.size + 1, dtype=np.float64)
    logn = np.log(n)
    nz = a != 0
    a, logn = a[nz], logn[nz]
    out = np.empty(s.size, dtype=np.complex128)
    step = max(1, _CHUNK_ENTRIES // max(1, a.size))
    for i in range(0, s.size, step):
        blk = s[i:i + step]
        out[i:i + step] = np.exp(-np.outer(blk, logn)) @ a
    return out


def _np_tgrid(a, sigma, t0, dt, n_t):
    n = np.arange(1, a.size + 1, dtype=np.float64)
    logn = np.log(n)
    nz = a != 0
    w = a[nz] * np.exp(-sigma * logn[nz])
    logn = logn[nz]
    t = t0 + dt * np.arange(n_t)
    out = np.empty(n_t, dtype=np.complex128)
    step = max(1, _CHUNK_ENTRIES // max(1, w.size))
    for i in range(0, n_t, step):
        out[i:i + step] = np.exp(-1j * np.outer(t[i:i + step], logn)) @ w
    return out


def _np_convolve(g, m):
    out = np.zeros(g.size * m.size, dtype=np.complex128)
    for j in range(1, m.size + 1):
        c = m[j - 1]
        if c == 0:
            continue
        idx = np.arange(1, g.size + 1) * j - 1
        out[idx] += g * c
    return out


def _np_sieve(n):
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, int(n ** 0.5) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest
    spf[:2] = (0, 1)
    mu = np.zeros(n + 1, dtype=np.int8)
    if n >= 1:
        mu[1] = 1
    for k in range(2, n + 1):
        p = spf[k]
        q = k // p
        mu[k] = 0 if q % p == 0 else -mu[q]
    return mu, spf


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _nb_dirichlet_eval(a, s):
        N = a.size
        out = np.empty(s.size, dtype=np.complex128)
        logn = np.log(np.arange(1, N + 1).astype(np.float64))
        for i in prange(s.size):
            sr = s[i].real
            si = s[i].imag
            acc_r = 0.0
            acc_i = 0.0
            c_r = 0.0
            c_i = 0.0
            for k in range(N):
                ak = a[k]
                if ak == 0:
                    continue
                mag = np.exp(-sr * logn[k])
                ph = si * logn[k]
                zr = mag * np.cos(ph)
                zi = -mag * np.sin(ph)
                vr = ak.real * zr - ak.imag * zi - c_r
                vi = ak.real * zi + ak.imag * zr - c_i
                tr = acc_r + vr
                ti = acc_i + vi
                c_r = (tr - acc_r) - vr
                c_i = (ti - acc_i) - vi
                acc_r = tr
                acc_i = ti
            out[i] = complex(acc_r, acc_i)
        return out

    @njit(cache=True, parallel=True)
    def _nb_tgrid(a, sigma, t0, dt, n_t):
        N = a.size
        out = np.empty(n_t, dtype=np.complex128)
        idx = np.empty(N, dtype=np.int64)
        m = 0
        for k in range(N):
            if a[k] != 0:
                idx[m] = k
                m += 1
        logn = np.empty(m, dtype=np.float64)
        w = np.empty(m, dtype=np.complex128)
        rot = np.empty(m, dtype=np.complex128)
        for j in range(m):
            ln = np.log(idx[j] + 1.0)
            logn[j] = ln
            w[j] = a[idx[j]] * np.exp(-sigma * ln)
            rot[j] = complex(np.cos(dt * ln), -np.sin(dt * ln))
        n_blocks = (n_t + BLOCK - 1) // BLOCK
        for b in prange(n_blocks):
            j0 = b * BLOCK
            nb = min(BLOCK, n_t - j0)
            t_start = t0 + dt * j0
            acc_r = np.zeros(nb)
            acc_i = np.zeros(nb)
            c_r = np.zeros(nb)
            c_i = np.zeros(nb)
            for j in range(m):
                ph = t_start * logn[j]
                z = w[j] * complex(np.cos(ph), -np.sin(ph))
                r = rot[j]
                for q in range(nb):
                    vr = z.real - c_r[q]
                    vi = z.imag - c_i[q]
                    tr = acc_r[q] + vr
                    ti = acc_i[q] + vi
                    c_r[q] = (tr - acc_r[q]) - vr
                    c_i[q] = (ti - acc_i[q]) - vi
                    acc_r[q] = tr
                    acc_i[q] = ti
                    z = z * r
            for q in range(nb):
                out[j0 + q] = complex(acc_r[q], acc_i[q])
        return out

    @njit(cache=True)
    def _nb_convolve(g, m):
        Lg = g.size
        Lm = m.size
        out = np.zeros(Lg * Lm, dtype=np.complex128)
        for j in range(1, Lm + 1):
            c = m[j - 1]
            if c == 0:
                continue
            for i in range(1, Lg + 1):
                out[i * j - 1] += g[i - 1] * c
        return out

    @njit(cache=True)
    def _nb_sieve(n):
        spf = np.zeros(n + 1, dtype=np.int64)
        mu = np.zeros(n + 1, dtype=np.int8)
        primes = np.empty(n + 1, dtype=np.int64)
        n_primes = 0
        if n >= 1:
            spf[1] = 1
            mu[1] = 1
        for i in range(2, n + 1):
            if spf[i] == 0:
                spf[i] = i
                mu[i] = -1
                primes[n_primes] = i
                n_primes += 1
            for k in range(n_primes):
                p = primes[k]
                if p > spf[i] or p * i > n:
                    break
                spf[p * i] = p
                if p == spf[i]:
                    mu[p * i] = 0
                else:
                    mu[p * i] = -mu[i]
        return mu, spf


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def dirichlet_eval(a, s):
    """Evaluate sum_n a[n-1] n**-s at every point of ``s``."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    s = np.ascontiguousarray(np.atleast_1d(s), dtype=np.complex128)
    if _backend == "numba":
        return _nb_dirichlet_eval(a, s)
    return _np_dirichlet_eval(a, s)


def dirichlet_eval_tgrid(a, sigma, t0, dt, n_t):
    """Evaluate at sigma + i(t0 + j dt) for j = 0..n_t-1."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if _backend == "numba":
        return _nb_tgrid(a, float(sigma), float(t0), float(dt), int(n_t))
    return _np_tgrid(a, float(sigma), float(t0), float(dt), int(n_t))


def power_sums(s, n_max):
    """sum_{n=1}^{n_max} n**-s for each point of ``s``."""
    return dirichlet_eval(np.ones(int(n_max), dtype=np.complex128), s)


def dirichlet_convolve(g, m):
    """Coefficients of the product of two Dirichlet polynomials.

    Contributions to each output index are added in ascending order of the
    second factor's index, identically in both backends.
    """
    g = np.ascontiguousarray(g, dtype=np.complex128)
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if _backend == "numba":
        return _nb_convolve(g, m)
    return _np_convolve(g, m)


def linear_sieve(n):
    """Moebius function and smallest prime factor for 0..n (index 0 unused)."""
    n = int(n)
    if _backend == "numba":
        return _nb_sieve(n)
    return _np_sieve(n)
