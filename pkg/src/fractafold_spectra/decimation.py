"""Spectral decimation dynamics: R, its inverse branches, the limits fR and sR,
eigenvalue series, the normalization product M and a Julia set approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, DiscriminantError, PoleError

DEFAULT_TOL = 1e-13
MAX_ITER = 200
DEDUP_TOL = 1e-9


class Branch(str, Enum):
    LO = "LO"
    HI = "HI"


@dataclass(frozen=True)
class DecimationPolynomial:
    """The map z -> z(m - z) with multiplier m."""

    multiplier: float = 5.0

    @property
    def m(self) -> float:
        return self.multiplier

    @property
    def is_gasket(self) -> bool:
        return self.multiplier == 5.0

    def __call__(self, z):
        return apply_R(self, z)

    def norm_factor(self, x):
        """Factor of the M product at one level.

        For the gasket this is (1 - x/5)(1 - x/2) / ((1 - x/6)(1 - 2x/5)), the
        ratio of measure-weighted squared norms of an eigenfunction before and
        after one refinement. Subdivision of the interval preserves the
        trapezoid norm of sampled sines, so the interval factor is identically 1.
        """
        x = np.asarray(x, dtype=float)
        if not self.is_gasket:
            return np.ones_like(x)
        den = (1.0 - x / 6.0) * (1.0 - 2.0 * x / 5.0)
        if np.any(np.abs(den) < 1e-14):
            raise PoleError(f"norm factor has a pole at {x}")
        return (1.0 - x / 5.0) * (1.0 - x / 2.0) / den


GASKET = DecimationPolynomial(5.0)
INTERVAL = DecimationPolynomial(4.0)


def apply_R(poly: DecimationPolynomial, z):
    return z * (poly.multiplier - z)


def inverse_branches(poly: DecimationPolynomial, w):
    """Return (LO, HI) with R(LO) = R(HI) = w and LO <= m/2 <= HI."""
    m = poly.multiplier
    w_arr = np.asarray(w, dtype=float)
    disc = m * m - 4.0 * w_arr
    if np.any(disc < 0):
        # tolerate rounding right at the critical value m^2/4
        if np.all(disc > -1e-12 * m * m):
            disc = np.maximum(disc, 0.0)
        else:
            raise DiscriminantError(f"w > m^2/4 = {m * m / 4}: no real preimage of {w}")
    root = np.sqrt(disc)
    # 2w/(m + root) avoids cancellation for small w
    lo = 2.0 * w_arr / (m + root)
    hi = (m + root) / 2.0
    if np.ndim(w) == 0:
        return float(lo), float(hi)
    return lo, hi


def branch(poly: DecimationPolynomial, w, letter: Branch):
    lo, hi = inverse_branches(poly, w)
    return lo if Branch(letter) is Branch.LO else hi


def apply_word(poly: DecimationPolynomial, w: float, word: Sequence[Branch]) -> list[float]:
    """Push w backwards through the branches of word; returns the orbit including w."""
    orbit = [float(w)]
    for letter in word:
        orbit.append(branch(poly, orbit[-1], letter))
    return orbit


def frak_R(poly: DecimationPolynomial, z, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER):
    """Evaluate fR(z) = lim_k R^k(z / m^k) elementwise."""
    m = poly.multiplier
    z_arr = np.asarray(z)
    dtype = complex if np.iscomplexobj(z_arr) else float
    z_arr = z_arr.astype(dtype)
    zmax = float(np.max(np.abs(z_arr))) if z_arr.size else 0.0
    k0 = max(1, int(math.ceil(math.log(zmax, m))) + 1) if zmax > 1 else 1
    prev = None
    for k in range(k0, k0 + max_iter):
        w = z_arr / m**k
        for _ in range(k):
            w = w * (m - w)
        if prev is not None:
            gap = np.abs(w - prev)
            if not np.all(np.isfinite(w)):
                break
            if np.all(gap <= tol * np.maximum(1.0, np.abs(w))):
                return w.item() if w.ndim == 0 else w
        prev = w
    raise ConvergenceError(f"fR did not converge for z with |z| up to {zmax}")


def s_R(poly: DecimationPolynomial, w, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER):
    """Evaluate sR(w) = lim_k m^k LO^k(w), the inverse of fR near 0."""
    return _scaled_lo_limit(poly, w, tol, max_iter)


def _scaled_lo_limit(poly, w, tol, max_iter):
    m = poly.multiplier
    cur = np.asarray(w, dtype=float)
    scale = 1.0
    prev = cur.copy()
    for _ in range(max_iter):
        cur, _hi = inverse_branches(poly, cur) if cur.ndim else inverse_branches(poly, float(cur))
        cur = np.asarray(cur, dtype=float)
        scale *= m
        val = scale * cur
        if np.all(np.abs(val - prev) <= tol * np.maximum(1.0, np.abs(val))):
            return val.item() if val.ndim == 0 else val
        prev = val
    raise ConvergenceError(f"sR did not converge for {w}")


@dataclass
class EigenvalueAddress:
    """Eigenvalue encoded as m0, seed and an inverse-branch word with implicit LO tail."""

    m0: int
    seed: float
    word: tuple[Branch, ...] = ()
    approx: float | None = None
    poly: DecimationPolynomial = field(default=GASKET, compare=False)

    def __post_init__(self):
        if self.m0 < 0:
            raise ValueError("m0 must be nonnegative")
        self.word = canonical_word(self.word)

    def lambda_sequence(self, n: int) -> np.ndarray:
        """Return lambda_0 .. lambda_n of the discrete approximation sequence.

        lambda_{m0} is the seed, earlier terms are forward images and later
        terms follow the word and then the LO branch.
        """
        seq = [0.0] * (n + 1)
        vals = {self.m0: float(self.seed)}
        for j in range(self.m0 - 1, -1, -1):
            vals[j] = apply_R(self.poly, vals[j + 1])
        cur = float(self.seed)
        j = self.m0
        letters = list(self.word)
        while j < n:
            letter = letters[j - self.m0] if j - self.m0 < len(letters) else Branch.LO
            cur = branch(self.poly, cur, letter)
            j += 1
            vals[j] = cur
        for i in range(n + 1):
            seq[i] = vals[i]
        return np.array(seq)


def canonical_word(word: Iterable) -> tuple[Branch, ...]:
    letters = [Branch(w) for w in word]
    while letters and letters[-1] is Branch.LO:
        letters.pop()
    return tuple(letters)


def resolve_address(addr: EigenvalueAddress, tol: float = DEFAULT_TOL) -> float:
    """Compute m^{m0} lim_k m^k lambda_k and store it on addr.approx."""
    poly = addr.poly
    m = poly.multiplier
    orbit = apply_word(poly, addr.seed, addr.word)
    L = len(addr.word)
    value = m**L * s_R(poly, orbit[-1], tol=tol)
    for _ in range(addr.m0):
        value = value * m
    addr.approx = float(value)
    return addr.approx


def address_check(addr: EigenvalueAddress, tol: float = 1e-8) -> float:
    """Residual of fR(approx / m^{m0}) against the seed."""
    if addr.approx is None:
        resolve_address(addr)
    m = addr.poly.multiplier
    return abs(frak_R(addr.poly, addr.approx / m**addr.m0) - addr.seed)


# ----------------------------------------------------------------------------
# series

SERIES_KINDS = ("Sigma_ext", "Sigma_inf", "Sigma_inf_prime", "Sigma_D", "Sigma_N")


@dataclass
class SeriesSet:
    kind: str
    cutoff: tuple[int, int]
    members: list[EigenvalueAddress]

    @property
    def values(self) -> np.ndarray:
        return np.array([a.approx for a in self.members])


def _series_components(kind: str, max_m0: int, poly: DecimationPolynomial):
    """List of (m0, seeds) pairs making up a series; unions over m0 are truncated."""
    if not poly.is_gasket:
        if kind in ("Sigma_D", "Sigma_N"):
            return [(0, (0.0, 4.0))]
        raise ValueError(f"series {kind} is only defined for the gasket")
    comps: list[tuple[int, tuple[float, ...]]] = []
    if kind == "Sigma_D":
        comps.append((1, (2.0, 5.0)))
        comps.append((2, (5.0,)))
        comps += [(k, (3.0, 5.0)) for k in range(3, max_m0 + 1)]
    elif kind == "Sigma_N":
        comps.append((1, (3.0,)))
        comps += [(k, (3.0, 5.0)) for k in range(2, max_m0 + 1)]
    elif kind == "Sigma_ext":
        comps.append((1, (2.0,)))
        comps += [(k, (5.0,)) for k in range(1, max_m0 + 1)]
    elif kind == "Sigma_inf":
        comps.append((1, (2.0,)))
        comps += [(k, (3.0, 5.0)) for k in range(1, max_m0 + 1)]
    elif kind == "Sigma_inf_prime":
        comps += [(k, (3.0, 5.0)) for k in range(2, max_m0 + 1)]
    else:
        raise ValueError(f"unknown series kind {kind!r}; expected one of {SERIES_KINDS}")
    return [c for c in comps if c[0] <= max_m0]


def hi_terminated_words(max_len: int) -> list[tuple[Branch, ...]]:
    """All canonical words of length <= max_len (the empty word and words ending in HI)."""
    out: list[tuple[Branch, ...]] = [()]
    for n in range(1, max_len + 1):
        for bits in range(2 ** (n - 1)):
            prefix = tuple(Branch.HI if (bits >> i) & 1 else Branch.LO for i in range(n - 1))
            out.append(prefix + (Branch.HI,))
    return out


def preimage_addresses(poly: DecimationPolynomial, seed: float, m0: int, max_len: int,
                       tol: float = DEFAULT_TOL) -> list[EigenvalueAddress]:
    """Addresses enumerating m^{m0} fR^{-1}{seed} up to word length max_len."""
    out = []
    for word in hi_terminated_words(max_len):
        addr = EigenvalueAddress(m0=m0, seed=seed, word=word, poly=poly)
        resolve_address(addr, tol=tol)
        out.append(addr)
    return out


def dedup_addresses(addrs: list[EigenvalueAddress], tol: float = DEDUP_TOL) -> list[EigenvalueAddress]:
    addrs = sorted(addrs, key=lambda a: (a.approx, a.m0, len(a.word)))
    out: list[EigenvalueAddress] = []
    for a in addrs:
        if out and abs(a.approx - out[-1].approx) <= tol:
            continue
        out.append(a)
    return out


def enumerate_series(kind: str, cutoff: tuple[int, int], poly: DecimationPolynomial = GASKET,
                     tol: float = DEFAULT_TOL) -> SeriesSet:
    """Enumerate a series to cutoff = (max m0, max word length)."""
    max_m0, max_len = cutoff
    if max_m0 < 0 or max_len < 0:
        raise ValueError("cutoff entries must be nonnegative")
    members: list[EigenvalueAddress] = []
    for m0, seeds in _series_components(kind, max_m0, poly):
        for s in seeds:
            members += preimage_addresses(poly, s, m0, max_len, tol)
    if kind == "Sigma_N" or (not poly.is_gasket and kind == "Sigma_N"):
        zero = EigenvalueAddress(m0=0, seed=0.0, poly=poly)
        zero.approx = 0.0
        members.append(zero)
    members = dedup_addresses(members)
    if not poly.is_gasket and kind == "Sigma_D":
        members = [a for a in members if abs(a.approx) > DEDUP_TOL]
    return SeriesSet(kind=kind, cutoff=(max_m0, max_len), members=members)


def frak_R_preimages(poly: DecimationPolynomial, target: float, max_len: int,
                     m0: int = 0) -> np.ndarray:
    """Sorted values m^{m0} fR^{-1}{target} up to word length max_len."""
    vals = [a.approx for a in preimage_addresses(poly, target, m0, max_len)]
    if abs(target) < DEDUP_TOL and m0 == 0:
        vals.append(0.0)
    vals = np.sort(np.array(vals))
    keep = np.concatenate([[True], np.diff(vals) > DEDUP_TOL]) if vals.size else vals.astype(bool)
    return vals[keep]


# ----------------------------------------------------------------------------
# normalization product

def M_of_lambda(addr: EigenvalueAddress, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER,
                return_partials: bool = False):
    """Infinite product M = prod_{m >= 1} factor(lambda_m).

    Raises PoleError when some lambda_m hits a pole of the factor.
    """
    poly = addr.poly
    prod = 1.0
    partials = []
    cur = None
    for mm in range(1, max_iter + 1):
        if cur is None or mm <= addr.m0 + len(addr.word):
            lam = addr.lambda_sequence(mm)[mm]
        else:
            lam = inverse_branches(poly, cur)[0]
        cur = lam
        f = float(poly.norm_factor(lam))
        new = prod * f
        partials.append(new)
        done = mm > addr.m0 + len(addr.word) and abs(new - prod) <= tol * max(1.0, abs(new))
        prod = new
        if done:
            return (prod, np.array(partials)) if return_partials else prod
    raise ConvergenceError("M product did not converge")


def M_of_seed(poly: DecimationPolynomial, lam0: float, word: Sequence[Branch] = (),
              tol: float = DEFAULT_TOL) -> float:
    """M for an arbitrary real level-0 eigenvalue lam0 (m0 = 0)."""
    return M_of_lambda(EigenvalueAddress(m0=0, seed=lam0, word=tuple(word), poly=poly), tol=tol)


# ----------------------------------------------------------------------------
# Julia set

def julia_backward_orbit(poly: DecimationPolynomial, depth: int) -> np.ndarray:
    """All 2^depth preimages of the repelling fixed point m - 1 under depth inverse steps."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    pts = np.array([poly.multiplier - 1.0])
    for _ in range(depth):
        lo, hi = inverse_branches(poly, pts)
        pts = np.concatenate([lo, hi])
    if pts.size != 2**depth:
        raise ConvergenceError("backward orbit lost points")
    return np.sort(pts)


def frak_R_inverse_of_set(poly: DecimationPolynomial, points: np.ndarray, max_len: int) -> np.ndarray:
    """fR^{-1} of a finite point set (inside the LO-contraction domain) to word length max_len."""
    out = []
    for p in np.asarray(points, dtype=float):
        out.extend(a.approx for a in preimage_addresses(poly, float(p), 0, max_len))
    return np.sort(np.array(out))


def with_approx(addr: EigenvalueAddress) -> EigenvalueAddress:
    a = replace(addr)
    resolve_address(a)
    return a
