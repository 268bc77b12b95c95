"""Continued fractions, convergents, Gauss map, and return-time combinatorics.

Rotation numbers of bounded type drive everything downstream: the
convergent denominators q_n are the closest-return times, the
combinatorial lengths l_n = |p_n - q_n*theta| set every scale, and the
dynamical tilings P_n refine each other along the expansion.

Quadratic irrationals (eventually periodic expansions) are represented
symbolically by (preperiod, period) so quotients at arbitrary depth are
exact; float inputs are expanded only as far as round-off allows.
"""

import math
from dataclasses import dataclass, field

import mpmath

# working precision for theta-dependent quantities (l_n, tilings, orderings)
_DPS = 60


class RationalInputError(ValueError):
    """Raised when a continued-fraction expansion terminates (rational input)."""


@dataclass
class Convergents:
    """Convergent pairs (p_n, q_n) and combinatorial lengths l_n.

    Index convention follows the recurrence p_n = a_n p_{n-1} + p_{n-2}
    with p_0 = q_{-1} = 0, q_0 = p_{-1} = 1, so entry n of p/q is the
    n-th convergent and lengths[n] = |p_n - q_n*theta|.
    """

    p: list = field(default_factory=list)
    q: list = field(default_factory=list)
    lengths: list = field(default_factory=list)


class ContinuedFraction:
    """A rotation number in (0,1) with its partial quotients a_1, a_2, ...

    Construct via :meth:`from_value` (float/mpf expansion),
    :meth:`from_quotients` (explicit finite list), or
    :meth:`from_periodic` (exact quadratic irrational).
    """

    def __init__(self, quotients, preperiod=None, period=None, value=None):
        quotients = [int(a) for a in quotients]
        if any(a < 1 for a in quotients):
            raise ValueError("partial quotients must be >= 1")
        self._quotients = quotients
        self.preperiod = list(preperiod) if preperiod is not None else None
        self.period = list(period) if period is not None else None
        self._value = value

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_value(cls, theta, n):
        """Expand theta in (0,1) to n partial quotients.

        Stops (raising RationalInputError) when the remainder falls below
        64*eps*q_n^2, past which further quotients are round-off noise.
        """
        if not 0 < float(theta) < 1:
            raise ValueError("theta must lie in (0,1)")
        if n < 1:
            raise ValueError("need n >= 1")
        high_prec = isinstance(theta, mpmath.mpf)
        with mpmath.workdps(_DPS if high_prec else 25):
            x = mpmath.mpf(theta)
            # round-off scale of the *input*: mp precision for mpf inputs,
            # double precision for python floats
            eps = mpmath.mpf(2) ** (-mpmath.mp.prec) if high_prec else mpmath.mpf(2) ** -52
            quotients = []
            qm1, qm2 = 1, 0
            for _ in range(n):
                if x == 0 or x < 64 * eps * qm1 * qm1:
                    raise RationalInputError(
                        "rational input: expansion terminated after %d quotients %r"
                        % (len(quotients), quotients)
                    )
                inv = 1 / x
                a = int(mpmath.floor(inv))
                x = inv - a
                # snap to the integer above when the remainder is round-off
                if 1 - x < 64 * eps * qm1 * qm1:
                    a += 1
                    x = mpmath.mpf(0)
                quotients.append(a)
                qm1, qm2 = a * qm1 + qm2, qm1
        return cls(quotients, value=theta)

    @classmethod
    def from_quotients(cls, quotients):
        return cls(quotients)

    @classmethod
    def from_periodic(cls, preperiod, period):
        if not period:
            raise ValueError("period must be nonempty")
        return cls([], preperiod=preperiod, period=period)

    # -- quotient access ----------------------------------------------------

    def quotient(self, i):
        """a_i (1-based)."""
        if self.period is not None:
            pre = self.preperiod or []
            if i <= len(pre):
                return pre[i - 1]
            return self.period[(i - 1 - len(pre)) % len(self.period)]
        if i <= len(self._quotients):
            return self._quotients[i - 1]
        raise IndexError("quotient a_%d beyond available depth %d" % (i, len(self._quotients)))
    def quotients(self, n):
        return [self.quotient(i) for i in range(1, n + 1)]

    @property
    def depth(self):
        """Number of exactly-known quotients (None = unbounded, periodic form)."""
        return None if self.period is not None else len(self._quotients)

    def is_bounded_type(self, n=40):
        try:
            return max(self.quotients(n)) < math.inf
        except IndexError:
            return max(self._quotients) < math.inf

    def bound(self, n=40):
        """Max partial quotient over the first n (the bounded-type constant)."""
        if self.period is not None:
            return max((self.preperiod or []) + self.period)
        return max(self._quotients[:n] or [1])

    # -- value --------------------------------------------------------------

    def value_mp(self, dps=_DPS):
        """theta as an mpmath mpf at the given precision."""
        with mpmath.workdps(dps):
            if self.period is not None:
                # periodic tail y = [0; period, period, ...] is a fixed point of
                # the Moebius map composed of x -> 1/(a+x) over one period:
                # y = (A*y + B)/(C*y + D) with [[A,B],[C,D]] = prod [[0,1],[1,a]]
                A, B, C, D = 1, 0, 0, 1
                for a in self.period:
                    A, B, C, D = B, A + a * B, D, C + a * D
                # C y^2 + (D - A) y - B = 0, take the root in (0,1)
                aa, bb, cc = C, D - A, -B
                y = (-bb + mpmath.sqrt(bb * bb - 4 * aa * cc)) / (2 * aa)
                x = y
                for a in reversed(self.preperiod or []):
                    x = 1 / (a + x)
                val = x
            elif self._value is not None:
                val = mpmath.mpf(self._value)
            else:
                x = mpmath.mpf(0)
                for a in reversed(self._quotients):
                    x = 1 / (a + x)
                val = x
            return +val

    def value_float(self):
        return float(self.value_mp(dps=25))

    def shift(self):
        """Gauss-map shift: drop a_1 (exact on the symbolic representation)."""
        if self.period is not None:
            pre = list(self.preperiod or [])
            if pre:
                return ContinuedFraction.from_periodic(pre[1:], self.period)
            per = self.period
            return ContinuedFraction.from_periodic([], per[1:] + per[:1])
        if len(self._quotients) < 2:
            raise ValueError("cannot shift: fewer than 2 known quotients")
        return ContinuedFraction(self._quotients[1:])

    def __repr__(self):
        if self.period is not None:
            return "ContinuedFraction(preperiod=%r, period=%r)" % (
                self.preperiod or [], self.period)
        return "ContinuedFraction(%r)" % (self._quotients,)


# named rotation numbers
GOLDEN = ContinuedFraction.from_periodic([], [1])        # (sqrt5-1)/2
SILVER = ContinuedFraction.from_periodic([], [2])        # sqrt2-1
BRONZE_ALT = ContinuedFraction.from_periodic([], [1, 2])  # [0;1,2,1,2,...]

NAMED_THETAS = {"golden": GOLDEN, "silver": SILVER, "bronze-alt": BRONZE_ALT}


def cf_expand(theta, n):
    """First n partial quotients of theta in (0,1). See ContinuedFraction.from_value."""
    return ContinuedFraction.from_value(theta, n)


def convergents(cf, n, dps=_DPS):
    """Convergents (p_k, q_k) for k <= n plus combinatorial lengths l_k."""
    if cf.depth is not None and cf.depth < n:
        raise ValueError("cf has only %d quotients, need %d" % (cf.depth, n))
    p = [0]
    q = [1]
    pm1, qm1 = 1, 0  # p_{-1}, q_{-1}
    for k in range(1, n + 1):
        a = cf.quotient(k)
        p.append(a * p[-1] + pm1)
        q.append(a * q[-1] + qm1)
        pm1, qm1 = p[-2], q[-2]
    with mpmath.workdps(dps):
        th = cf.value_mp(dps)
        lengths = [abs(p[k] - q[k] * th) for k in range(n + 1)]
    return Convergents(p=p, q=q, lengths=lengths)


def gauss(theta):
    """Gauss map G(x) = frac(1/x); on a ContinuedFraction, shifts quotients."""
    if isinstance(theta, ContinuedFraction):
        return theta.shift()
    if theta == 0:
        raise ZeroDivisionError("Gauss map undefined at 0")
    return (1.0 / theta) % 1.0


def comb_length(cf, n, dps=_DPS):
    """l_n = |p_n - q_n*theta| with a bounded-type bracketing sanity check."""
    conv = convergents(cf, n + 1, dps=dps)
    ln, lnp1 = conv.lengths[n], conv.lengths[n + 1]
    assert lnp1 < ln, "combinatorial lengths must strictly decrease"
    # l_{n-1} = a_{n+1} l_n + l_{n+1} gives l_n/l_{n+1} <= bound + 2
    bound = cf.bound(n + 2)
    assert ln / lnp1 <= bound + 2, "bounded-type length bracketing violated"
    return float(ln)


def return_ordering(cf, n, x=0.0, dps=_DPS):
    """Closest returns R^{q_k}(x) of the rigid rotation, with alternation check.

    Returns the list of angles (x + q_k*theta mod 1) for k = 1..n and
    asserts the alternating-side pattern R^{q_1} < R^{q_3} < ... < x <
    ... < R^{q_4} < R^{q_2} via the exact signed distances (-1)^k l_k.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    conv = convergents(cf, n, dps=dps)
    with mpmath.workdps(dps):
        th = cf.value_mp(dps)
        angles = [float(mpmath.frac(x + conv.q[k] * th)) for k in range(1, n + 1)]
        # signed displacement of R^{q_k}(x) from x is q_k*theta - p_k = -(-1)^k l_k
        for k in range(1, n + 1):
            s = conv.q[k] * th - conv.p[k]
            assert (s > 0) == (k % 2 == 0), "closest returns must alternate sides"
            assert abs(abs(s) - conv.lengths[k]) < mpmath.mpf(10) ** (5 - dps)
    return angles


def tiling_indices(cf, n):
    """The dynamical tiling P_n in angle coordinates, as exact integer indices.

    Interval k of the tiling has endpoints {i*theta} and {(q_n + i)*theta}
    for i < q_{n+1}, plus {(q_{n+1}+j)*theta} to {j*theta} for j < q_n.
    Returns (vertex_ks, intervals) where vertex_ks = range(q_n + q_{n+1})
    and intervals is a list of (k_left_index, k_right_index) pairs into the
    orbit index set -- all exact integers, no rounding.
    """
    conv = convergents(cf, n + 1)
    qn, qn1 = conv.q[n], conv.q[n + 1]
    intervals = [(i, qn + i) for i in range(qn1)]
    intervals += [(qn1 + j, j) for j in range(qn)]
    return list(range(qn + qn1)), intervals


def tiling_is_partition(cf, n, dps=_DPS):
    """Check exactly (in angle coordinates) that P_n tiles the circle.

    A valid tiling means: when the q_n + q_{n+1} vertex angles {k*theta}
    are sorted around the circle, the endpoint pair of every tile is an
    adjacent pair (so tiles meet only at endpoints), every adjacent pair
    is covered exactly once, and each gap length is l_n or l_{n+1}.
    """
    import numpy as np

    conv = convergents(cf, n + 1, dps=dps)
    vertex_ks, intervals = tiling_indices(cf, n)
    m = len(vertex_ks)
    ln, ln1 = float(conv.lengths[n]), float(conv.lengths[n + 1])
    # float64 positions are exact for this purpose as long as the
    # accumulated round-off m*eps stays far below the smallest gap
    th = float(cf.value_mp(dps))
    err = m * th * 2.0 ** -52
    if err > 2e-2 * ln1:
        raise ValueError("depth too large for float64 angle separation")
    ks = np.arange(m, dtype=np.float64)
    posv = (ks * th) % 1.0
    order = np.argsort(posv, kind="stable")
    rank = np.empty(m, dtype=np.int64)
    rank[order] = np.arange(m)
    left = rank[np.array([kl for kl, _ in intervals])]
    right = rank[np.array([kr for _, kr in intervals])]
    fwd = (left + 1) % m == right
    bwd = (right + 1) % m == left
    if not np.all(fwd | bwd):
        return False
    slots = np.where(fwd, left, right)
    counts = np.bincount(slots, minlength=m)
    if not np.all(counts == 1):
        return False
    sortedp = posv[order]
    gaps = np.diff(np.concatenate([sortedp, [sortedp[0] + 1.0]]))
    tol = max(1e-9 * ln1, 8 * err)
    return bool(np.all((np.abs(gaps - ln) < tol) | (np.abs(gaps - ln1) < tol)))


def tiling_refines(cf, n):
    """P_{n+1} refines P_n: vertex index sets are nested (exact integers)."""
    v_n, _ = tiling_indices(cf, n)
    v_n1, _ = tiling_indices(cf, n + 1)
    return set(v_n) <= set(v_n1)
