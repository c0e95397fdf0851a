"""Real-eigenvalue counts beyond ±1 and spectral radii.

Counts are exact: the characteristic polynomial is taken over the
rationals (float matrices are converted exactly, every binary64 value
being a dyadic rational), split into square-free factors, and each
factor's roots in ``(1, ∞)`` and ``(-∞, -1)`` are counted with a Sturm
chain.  Spectral radii are approximate and come from Aberth-Ehrlich
iteration on the float characteristic polynomial.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from .errors import DegenerateEndpoint, NoConvergence
from .matrix_core import FLOAT, RATIONAL, Matrix, Poly, char_poly

INF = math.inf

#: degeneracy flag names
EIG1_L = "eig1_L"
EIG1_R = "eig1_R"
EIGM1_L = "eigm1_L"
EIGM1_R = "eigm1_R"
EIG1_RL = "eig1_RL"

#: moduli closer than this to 1 make a stability verdict marginal
MARGINAL_BAND = 1e-8


# ---------------------------------------------------------------------------
# exact polynomial arithmetic (ascending coefficient lists of mpq)
# ---------------------------------------------------------------------------

def _trim(cs: list) -> list:
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return cs


def _is_zero(cs: Sequence) -> bool:
    return len(cs) == 1 and cs[0] == 0


def _divmod(num: Sequence, den: Sequence) -> tuple[list, list]:
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    if len(num) - 1 < dn:
        return [mpq(0)], _trim(num)
    quot = [mpq(0)] * (len(num) - dn)
    for k in range(len(num) - 1 - dn, -1, -1):
        c = num[k + dn] / lead
        quot[k] = c
        if c:
            for j in range(dn + 1):
                num[k + j] -= c * den[j]
    rem = _trim(num[:dn] if dn > 0 else [mpq(0)])
    return _trim(quot), rem


def _monic(cs: Sequence) -> list:
    lead = cs[-1]
    return [c / lead for c in cs]


def _gcd(a: Sequence, b: Sequence) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while not _is_zero(b):
        _, r = _divmod(a, b)
        a, b = b, r
    return _monic(a)


def _deriv(cs: Sequence) -> list:
    if len(cs) == 1:
        return [mpq(0)]
    return [k * cs[k] for k in range(1, len(cs))]


def _eval(cs: Sequence, x):
    acc = cs[-1]
    for c in reversed(cs[:-1]):
        acc = acc * x + c
    return acc


def _exact_coeffs(p: Poly) -> list:
    return [c if not isinstance(c, float) else mpq(c) for c in p.coeffs]


def squarefree_factors(p: Poly) -> list[tuple[list, int]]:
    """Yun's algorithm: ``p = lc * prod f_i ** i`` with each ``f_i`` square-free and monic."""
    cs = _trim(_exact_coeffs(p))
    if len(cs) <= 1:
        return []
    d = _deriv(cs)
    a = _gcd(cs, d)
    b, _ = _divmod(cs, a)
    c, _ = _divmod(d, a)
    out = []
    i = 1
    while len(b) > 1:
        dd = [x - y for x, y in _pad(c, _deriv(b))]
        dd = _trim(dd)
        g = _gcd(b, dd) if not _is_zero(dd) else _monic(b)
        if len(g) > 1:
            out.append((g, i))
        b, _ = _divmod(b, g)
        if not _is_zero(dd):
            c, _ = _divmod(dd, g)
        else:
            c = [mpq(0)]
        i += 1
    return out


def _pad(a: Sequence, b: Sequence):
    n = max(len(a), len(b))
    za = list(a) + [mpq(0)] * (n - len(a))
    zb = list(b) + [mpq(0)] * (n - len(b))
    return zip(za, zb)


@lru_cache(maxsize=256)
def _cached_chain(cs: tuple) -> tuple:
    return tuple(_sturm_chain(list(cs)))


def _sturm_chain(cs: list) -> list[list]:
    chain = [cs, _deriv(cs)]
    while len(chain[-1]) > 1:
        _, r = _divmod(chain[-2], chain[-1])
        if _is_zero(r):
            break
        chain.append([-c for c in r])
    return chain


def _sign_at(cs: Sequence, x) -> int:
    if x == INF:
        lead = cs[-1]
        return (lead > 0) - (lead < 0)
    if x == -INF:
        lead = cs[-1]
        s = (lead > 0) - (lead < 0)
        return s if (len(cs) - 1) % 2 == 0 else -s
    v = _eval(cs, x)
    return (v > 0) - (v < 0)


def _variations(chain: list[list], x) -> int:
    count = 0
    last = 0
    for cs in chain:
        s = _sign_at(cs, x)
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _endpoint(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return x
    return x if not isinstance(x, float) else mpq(x)


def _count_squarefree(cs: list, lo, hi) -> int:
    chain = _sturm_chain(cs)
    return _variations(chain, lo) - _variations(chain, hi)


def sturm_count(p: Poly, interval: tuple) -> int:
    """Number of real roots of ``p`` in the open interval, counted with multiplicity.

    ``interval`` is ``(lo, hi)``; use ``-math.inf`` / ``math.inf`` for
    unbounded ends.  Raises :class:`DegenerateEndpoint` if ``p`` vanishes
    at a finite endpoint.
    """
    lo, hi = (_endpoint(x) for x in interval)
    if not lo < hi:
        raise ValueError("empty interval")
    cs = _trim(_exact_coeffs(p))
    for x in (lo, hi):
        if not (isinstance(x, float) and math.isinf(x)) and _eval(cs, x) == 0:
            raise DegenerateEndpoint(f"polynomial vanishes at endpoint {x}")
    if len(cs) <= 1:
        return 0
    return sum(mult * _count_squarefree(f, lo, hi) for f, mult in squarefree_factors(p))


def _count_outside_unit(p: Poly) -> tuple[int, int]:
    """(#roots > 1, #roots < -1) with multiplicity; roots at ±1 are excluded."""
    one = mpq(1)
    cs = _trim(_exact_coeffs(p))
    if len(cs) <= 1:
        return 0, 0
    if len(cs) == 2:
        root = -cs[0] / cs[1]
        return int(root > 1), int(root < -1)
    if 0 not in _at_unit(cs):
        # the Sturm chain ends in gcd(p, p'); a constant means p is square-free
        chain = _cached_chain(tuple(cs))
        if len(chain[-1]) == 1:
            return _chain_counts(chain)
    plus = minus = 0
    for f, mult in squarefree_factors(p):
        for r in (one, -one):
            if _eval(f, r) == 0:
                f, _ = _divmod(f, [-r, one])
        if len(f) <= 1:
            continue
        fp, fm = _chain_counts(_sturm_chain(f))
        plus += mult * fp
        minus += mult * fm
    return plus, minus


def _at_unit(cs: Sequence) -> tuple:
    """``(p(1), p(-1))`` without Horner: plain and alternating coefficient sums."""
    even, odd = sum(cs[0::2]), sum(cs[1::2])
    return even + odd, even - odd


def _chain_counts(chain: list[list]) -> tuple[int, int]:
    # sign variations at -inf, -1, 1, +inf in one pass over the chain
    counts = [0, 0, 0, 0]
    last = [0, 0, 0, 0]
    for cs in chain:
        lead = cs[-1]
        s_inf = (lead > 0) - (lead < 0)
        s_minf = s_inf if (len(cs) - 1) % 2 == 0 else -s_inf
        v1, vm1 = _at_unit(cs)
        signs = (s_minf, (vm1 > 0) - (vm1 < 0), (v1 > 0) - (v1 < 0), s_inf)
        for k in range(4):
            sg = signs[k]
            if sg:
                if last[k] and sg != last[k]:
                    counts[k] += 1
                last[k] = sg
    v_minf, v_m1, v_1, v_inf = counts
    return v_1 - v_inf, v_minf - v_m1


# ---------------------------------------------------------------------------
# counts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralCounts:
    sigma_L_plus: int
    sigma_L_minus: int
    sigma_R_plus: int
    sigma_R_minus: int
    sigma_LR_plus: int
    sigma_LL_plus: int
    degenerate: frozenset = field(default_factory=frozenset)

    @property
    def fixed_point_parity(self) -> int:
        """Parity of ``σ_L⁺ + σ_R⁺``."""
        return (self.sigma_L_plus + self.sigma_R_plus) % 2

    @property
    def two_cycle_parity(self) -> int:
        """Parity of ``σ_L⁻ + σ_R⁻``."""
        return (self.sigma_L_minus + self.sigma_R_minus) % 2

    @property
    def coexistence_parity(self) -> int:
        """Parity of ``σ_LL⁺ + σ_LR⁺``."""
        return (self.sigma_LL_plus + self.sigma_LR_plus) % 2

    def as_dict(self) -> dict:
        return {
            "sigma_L_plus": self.sigma_L_plus,
            "sigma_L_minus": self.sigma_L_minus,
            "sigma_R_plus": self.sigma_R_plus,
            "sigma_R_minus": self.sigma_R_minus,
            "sigma_LR_plus": self.sigma_LR_plus,
            "sigma_LL_plus": self.sigma_LL_plus,
            "degenerate": sorted(self.degenerate),
        }


def _vanishes(p_exact: Poly, p_float: Poly | None, x: int, band: float) -> bool:
    if p_float is None:
        return p_exact(mpq(x)) == 0
    return abs(p_float(float(x))) <= band


def exact_char_polys(a_left: Matrix, a_right: Matrix) -> tuple[Poly, Poly, Poly, Poly]:
    """Exact characteristic polynomials of ``A_L``, ``A_R``, ``A_R A_L``, ``A_L²``."""
    exact_l = a_left.with_backend(RATIONAL)
    exact_r = a_right.with_backend(RATIONAL)
    return tuple(char_poly(m) for m in (exact_l, exact_r, exact_r @ exact_l, exact_l @ exact_l))


def counts(a_left: Matrix, a_right: Matrix, polys: tuple | None = None) -> SpectralCounts:
    """All six σ counts plus degeneracy flags for the pair ``(A_L, A_R)``.

    ``polys`` may carry precomputed :func:`exact_char_polys` output.
    """
    if a_left.n != a_right.n or a_left.backend != a_right.backend:
        raise ValueError("A_L and A_R must share dimension and backend")
    p_l, p_r, p_rl, p_ll = polys or exact_char_polys(a_left, a_right)

    flags = set()
    if a_left.backend == FLOAT:
        fl_rl = a_right @ a_left
        pairs = (
            (p_l, char_poly(a_left), a_left.zero_band()),
            (p_r, char_poly(a_right), a_right.zero_band()),
            (p_rl, char_poly(fl_rl), fl_rl.zero_band()),
        )
    else:
        pairs = ((p_l, None, 0.0), (p_r, None, 0.0), (p_rl, None, 0.0))
    (pl, fl, bl), (pr, fr, br), (prl, frl, brl) = pairs
    if _vanishes(pl, fl, 1, bl):
        flags.add(EIG1_L)
    if _vanishes(pl, fl, -1, bl):
        flags.add(EIGM1_L)
    if _vanishes(pr, fr, 1, br):
        flags.add(EIG1_R)
    if _vanishes(pr, fr, -1, br):
        flags.add(EIGM1_R)
    if _vanishes(prl, frl, 1, brl):
        flags.add(EIG1_RL)

    l_plus, l_minus = _count_outside_unit(p_l)
    r_plus, r_minus = _count_outside_unit(p_r)
    rl_plus, _ = _count_outside_unit(p_rl)
    ll_plus, _ = _count_outside_unit(p_ll)
    return SpectralCounts(l_plus, l_minus, r_plus, r_minus, rl_plus, ll_plus, frozenset(flags))


# ---------------------------------------------------------------------------
# spectral radius
# ---------------------------------------------------------------------------

_EPS = sys.float_info.epsilon


def aberth_roots(coeffs: Sequence[float], tol: float = 1e-12, max_iter: int = 1000) -> list[complex]:
    """All complex roots of the polynomial with ascending ``coeffs``."""
    cs = [complex(c) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    n = len(cs) - 1
    if n < 1:
        return []
    lead = cs[-1]
    cs = [c / lead for c in cs]
    # leading zeros of the coefficient list are exact roots at 0
    zeros_at_origin = 0
    while zeros_at_origin < n and cs[zeros_at_origin] == 0:
        zeros_at_origin += 1
    cs = cs[zeros_at_origin:]
    n -= zeros_at_origin
    roots = [0j] * zeros_at_origin
    if n == 0:
        return roots
    dcs = [k * cs[k] for k in range(1, n + 1)]
    abs_cs = [abs(c) for c in cs]

    bound = 1 + max(abs(c) for c in cs[:-1])
    low = abs(cs[0]) ** (1.0 / n)
    radius = min(bound, max(low, 1e-3))
    z = [radius * cmath.exp(1j * (2 * math.pi * k / n + 0.4)) for k in range(n)]

    for _ in range(max_iter):
        done = True
        for k in range(n):
            zk = z[k]
            p = cs[-1]
            for c in reversed(cs[:-1]):
                p = p * zk + c
            if p == 0:
                continue
            dp = dcs[-1]
            for c in reversed(dcs[:-1]):
                dp = dp * zk + c
            scale = 0.0
            az = abs(zk)
            for c in reversed(abs_cs):
                scale = scale * az + c
            if abs(p) <= 8 * _EPS * scale:
                continue
            ratio = p / dp if dp != 0 else complex(1e300)
            s = sum(1.0 / (zk - z[j]) for j in range(n) if j != k and zk != z[j])
            denom = 1 - ratio * s
            w = ratio / denom if denom != 0 else ratio
            z[k] = zk - w
            if abs(w) > tol * max(1.0, abs(zk)):
                done = False
        if done:
            return roots + z
    raise NoConvergence(f"Aberth iteration did not converge in {max_iter} sweeps")


def spectral_radius(m: Matrix, poly: Poly | None = None) -> float:
    """Largest eigenvalue modulus of ``m`` (float regardless of backend)."""
    poly = poly or char_poly(m)
    cs = _trim(list(poly.coeffs))
    if len(cs) > 2 and not any(isinstance(c, float) for c in cs):
        # repeated roots are ill-conditioned; the square-free part has the same spectrum
        gcd = _cached_chain(tuple(cs))[-1]
        if len(gcd) > 1:
            cs = _divmod(cs, gcd)[0]
    roots = aberth_roots([float(c) for c in cs])
    return max((abs(r) for r in roots), default=0.0)


def _real_root_beyond(poly: Poly, r: mpq) -> bool:
    """Exact test for a real root of modulus greater than ``r`` (``r >= 1``)."""
    cs = _trim(_exact_coeffs(poly))
    if len(cs) <= 1:
        return False
    chain = _cached_chain(tuple(cs))
    if len(chain[-1]) > 1:
        # repeated roots: the chain counts distinct roots of the square-free part
        chain = tuple(_sturm_chain(_divmod(cs, chain[-1])[0]))
    if _eval(cs, r) == 0 or _eval(cs, -r) == 0:
        return False
    beyond = (_variations(chain, r) - _variations(chain, INF)) + (
        _variations(chain, -INF) - _variations(chain, -r))
    return beyond > 0


_UNSTABLE_EDGE = 1 + mpq(1, 10**8)


def stability(m: Matrix, poly: Poly | None = None) -> str:
    """``"YES"`` / ``"NO"`` / ``"MARGINAL"`` for the attracting test ``ρ(m) < 1``.

    A real eigenvalue beyond ``±(1 + 1e-8)``, found exactly by a Sturm
    count, settles ``"NO"`` without root finding.
    """
    poly = poly or char_poly(m)
    if _real_root_beyond(poly, _UNSTABLE_EDGE):
        return "NO"
    try:
        rho = spectral_radius(m, poly)
    except NoConvergence:
        return "MARGINAL"
    if rho < 1 - MARGINAL_BAND:
        return "YES"
    if rho > 1 + MARGINAL_BAND:
        return "NO"
    return "MARGINAL"
