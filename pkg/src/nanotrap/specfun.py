"""Integer-order cylinder functions J_n, Y_n, H_n^(1) for real arguments.

J is built by Miller's downward recurrence normalised with
``J_0 + 2 sum_k J_2k = 1``; Y_0 and Y_1 come from the Neumann series over the
same J table and higher orders of Y by upward recurrence.  Both directions
are the stable ones for their respective functions, so a single pass returns
all orders ``0..nmax`` at full double precision.

Two interchangeable kernels produce the table: ``_jy_table_numpy`` is
vectorised over arguments, ``_jy_table_loops`` is a per-point loop that numba
compiles.  :func:`jy_table` dispatches according to :mod:`nanotrap._accel`.
"""
import math

import numpy as np

from . import _accel
from .errors import DomainError

EULER_GAMMA = 0.5772156649015329
_BIG = 1e250
_SMALL = 1e-250
_SEED = 1e-30


def _start_order(nmax, xmax):
    top = max(float(nmax), xmax)
    m = int(top + 30.0 + 6.0 * math.sqrt(top))
    return m + (m % 2)


def _jy_table_numpy(nmax, x):
    x = np.asarray(x, dtype=np.float64)
    npts = x.shape[0]
    jt = np.zeros((nmax + 1, npts))
    yt = np.full((nmax + 1, npts), -np.inf)
    pos = x > 0.0
    jt[0, ~pos] = 1.0
    if not pos.any():
        return jt, yt
    xp = x[pos]
    m = _start_order(nmax, float(xp.max()))
    f = np.zeros((m + 2, xp.shape[0]))
    f[m] = _SEED
    two_over_x = 2.0 / xp
    for n in range(m, 0, -1):
        f[n - 1] = n * two_over_x * f[n] - f[n + 1]
        big = np.abs(f[n - 1]) > _BIG
        if big.any():
            f[n - 1:, big] *= _SMALL
    norm = f[0] + 2.0 * f[2:m + 1:2].sum(axis=0)
    jall = f / norm
    jt[:, pos] = jall[:nmax + 1]

    k = np.arange(1, m // 2 + 1, dtype=np.float64)[:, None]
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    lg = np.log(0.5 * xp) + EULER_GAMMA
    y0 = (2.0 / np.pi) * lg * jall[0] - (4.0 / np.pi) * (sign * jall[2:m + 1:2] / k).sum(axis=0)
    odd_lo = jall[1:m:2]
    odd_hi = jall[3:m + 2:2]
    y1 = (2.0 / np.pi) * (lg * jall[1] - jall[0] / xp) + (2.0 / np.pi) * (sign * (odd_lo - odd_hi) / k).sum(axis=0)
    yp = np.empty((nmax + 1, xp.shape[0]))
    yp[0] = y0
    if nmax >= 1:
        yp[1] = y1
    for n in range(1, nmax):
        yp[n + 1] = n * two_over_x * yp[n] - yp[n - 1]
    yt[:, pos] = yp
    return jt, yt


@_accel.njit
def _jy_point(nmax, x, jout, yout):
    if x == 0.0:
        for n in range(nmax + 1):
            jout[n] = 0.0
            yout[n] = -np.inf
        jout[0] = 1.0
        return
    top = max(float(nmax), x)
    m = int(top + 30.0 + 6.0 * math.sqrt(top))
    m += m % 2
    f = np.zeros(m + 2)
    f[m] = 1e-30
    for n in range(m, 0, -1):
        f[n - 1] = (2.0 * n / x) * f[n] - f[n + 1]
        if abs(f[n - 1]) > 1e250:
            for j in range(n - 1, m + 1):
                f[j] *= 1e-250
    norm = f[0]
    for j in range(2, m + 1, 2):
        norm += 2.0 * f[j]
    for j in range(m + 2):
        f[j] /= norm
    lg = math.log(0.5 * x) + 0.5772156649015329
    s0 = 0.0
    s1 = 0.0
    for kk in range(1, m // 2 + 1):
        sg = 1.0 if kk % 2 == 0 else -1.0
        s0 += sg * f[2 * kk] / kk
        s1 += sg * (f[2 * kk - 1] - f[2 * kk + 1]) / kk
    y0 = (2.0 / math.pi) * lg * f[0] - (4.0 / math.pi) * s0
    y1 = (2.0 / math.pi) * (lg * f[1] - f[0] / x) + (2.0 / math.pi) * s1
    for n in range(nmax + 1):
        jout[n] = f[n]
    yout[0] = y0
    if nmax >= 1:
        yout[1] = y1
    for n in range(1, nmax):
        yout[n + 1] = (2.0 * n / x) * yout[n] - yout[n - 1]


@_accel.njit
def _jy_table_loops(nmax, x):
    npts = x.shape[0]
    jt = np.empty((nmax + 1, npts))
    yt = np.empty((nmax + 1, npts))
    jcol = np.empty(nmax + 1)
    ycol = np.empty(nmax + 1)
    for i in range(npts):
        _jy_point(nmax, x[i], jcol, ycol)
        for n in range(nmax + 1):
            jt[n, i] = jcol[n]
            yt[n, i] = ycol[n]
    return jt, yt


def _check_args(x, allow_zero=True):
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DomainError("cylinder function argument must be finite")
    if allow_zero:
        if np.any(x < 0):
            raise DomainError("cylinder function argument must be >= 0")
    elif np.any(x <= 0):
        raise DomainError("Y_n and H_n have a singularity at x <= 0")
    return x


def jy_table(nmax, x, use_numba=None):
    """Return ``(J, Y)`` with ``J[n] = J_n(x)`` for ``n = 0..nmax``.

    ``x`` may be a scalar or any-shaped array of non-negative reals; the
    result has shape ``(nmax + 1,) + x.shape``.  ``Y`` is ``-inf`` at x = 0.
    """
    nmax = int(nmax)
    if nmax < 0:
        raise DomainError("nmax must be non-negative")
    x = _check_args(x)
    shape = x.shape
    flat = np.ascontiguousarray(x.ravel())
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    if use_numba:
        jt, yt = _jy_table_loops(nmax, flat)
    else:
        jt, yt = _jy_table_numpy(nmax, flat)
    return jt.reshape((nmax + 1,) + shape), yt.reshape((nmax + 1,) + shape)


def _reflect(n, values):
    # C_{-n} = (-1)^n C_n for J, Y and H
    return values if n >= 0 or n % 2 == 0 else -values


def _scalar_or_array(v):
    return v.item() if np.ndim(v) == 0 else v


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x) for integer n."""
    n = int(n)
    xa = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(xa)):
        raise DomainError("cylinder function argument must be finite")
    # J_n(-x) = (-1)^n J_n(x)
    sign = np.where((xa < 0) & (abs(n) % 2 == 1), -1.0, 1.0)
    jt, _ = jy_table(abs(n), np.abs(xa))
    return _scalar_or_array(sign * _reflect(n, jt[abs(n)]))


def bessel_y(n, x):
    """Bessel function of the second kind Y_n(x) for integer n and x > 0."""
    n = int(n)
    xa = _check_args(x, allow_zero=False)
    _, yt = jy_table(abs(n), xa)
    return _scalar_or_array(_reflect(n, yt[abs(n)]))


def hankel1(n, x):
    """Hankel function of the first kind H_n(x) = J_n(x) + i Y_n(x), x > 0."""
    n = int(n)
    xa = _check_args(x, allow_zero=False)
    jt, yt = jy_table(abs(n), xa)
    return _scalar_or_array(_reflect(n, jt[abs(n)] + 1j * yt[abs(n)]))


_KINDS = {"J": bessel_j, "Y": bessel_y, "H1": hankel1}


def cyl_derivative(kind, n, x):
    """Derivative C_n'(x) = (C_{n-1}(x) - C_{n+1}(x)) / 2 for C in {J, Y, H1}."""
    try:
        base = _KINDS[kind]
    except KeyError:
        raise DomainError(f"unknown cylinder function kind {kind!r}") from None
    n = int(n)
    return 0.5 * (base(n - 1, x) - base(n + 1, x))


def hankel_table(nmax, x):
    """``H_n(x)`` and ``H_n'(x)`` for ``n = 0..nmax`` (complex arrays)."""
    xa = _check_args(x, allow_zero=False)
    jt, yt = jy_table(nmax + 1, xa)
    h = jt + 1j * yt
    hp = np.empty((nmax + 1,) + xa.shape, dtype=np.complex128)
    hp[0] = -h[1]
    hp[1:] = 0.5 * (h[:nmax] - h[2:nmax + 2])
    return h[:nmax + 1], hp
