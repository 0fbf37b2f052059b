"""Exact arithmetic in Clifford algebras over the integers.

Elements of ``Cl_{p,q}(Z)`` are set functions over generator indices
``1..n``: the coefficient at mask ``A`` multiplies the ordered monomial
``x_A``.  Three multiplication routes are provided and must agree exactly:

* :func:`clifford_mul_naive` - the O(4^n) sign-twisted symmetric-difference sum;
* :func:`clifford_mul_fast` - through a Jordan-Wigner style Pauli matrix image
  with ``2**ceil(n/2)``-sided Gaussian-integer matrices;
* :func:`clifford_mul_via_gamma` - through the block recursion for
  ``Cl_{k,k}`` and the trivial embedding ``Cl_{n,0} -> Cl_{n,n}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .subsetfn import SetFunction, Universe, popcounts, sign_I_array

PHI_CAP = 20
GAMMA_CAP = 12
STRASSEN_THRESHOLD = 128
_FLOAT_EXACT = 1 << 52


class NotInImage(ArithmeticError):
    """A matrix handed to an inverse transform is not the image of an element."""


@dataclass(frozen=True)
class Signature:
    p: int
    q: int = 0

    @property
    def n(self) -> int:
        return self.p + self.q

    def square(self, i: int) -> int:
        """Square of generator ``i`` (1-based) as +1 or -1."""
        return 1 if i <= self.p else -1


@dataclass(frozen=True)
class CliffordElement:
    coeffs: SetFunction

    @classmethod
    def from_dict(cls, n: int, values: dict) -> "CliffordElement":
        return cls(SetFunction.from_dict(Universe.of_size(n), values))

    @classmethod
    def from_array(cls, values) -> "CliffordElement":
        values = np.asarray(values, dtype=object)
        n = (len(values) - 1).bit_length()
        return cls(SetFunction(Universe.of_size(n), values))

    @classmethod
    def scalar(cls, n: int, value: int = 1) -> "CliffordElement":
        return cls.from_dict(n, {0: value})

    @property
    def n(self) -> int:
        return self.coeffs.n

    @property
    def array(self) -> np.ndarray:
        return self.coeffs.coeffs

    def __add__(self, other):
        return CliffordElement(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return CliffordElement(self.coeffs - other.coeffs)

    def __eq__(self, other):
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None  # type: ignore[assignment]


class GaussianInt(NamedTuple):
    re: int
    im: int

    def __mul__(self, other):
        return GaussianInt(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    def __add__(self, other):
        return GaussianInt(self.re + other.re, self.im + other.im)


@dataclass(frozen=True)
class ComplexMatrix:
    """Square Gaussian-integer matrix of side ``2**t`` stored as separate real and imaginary parts."""

    t: int
    re: np.ndarray
    im: np.ndarray

    def __getitem__(self, idx) -> GaussianInt:
        r, c = idx
        return GaussianInt(int(self.re[r, c]), int(self.im[r, c]))

    def __matmul__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        re, im = gaussian_matmul(self.re, self.im, other.re, other.im)
        return ComplexMatrix(self.t, re, im)

    def __add__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self.t, self.re + other.re, self.im + other.im)

    def __eq__(self, other):
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.re, other.re) and np.array_equal(self.im, other.im)

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_complex(cls, rows) -> "ComplexMatrix":
        arr = np.asarray(rows, dtype=complex)
        t = (arr.shape[0] - 1).bit_length()
        re = np.array([[int(round(z.real)) for z in row] for row in arr], dtype=object)
        im = np.array([[int(round(z.imag)) for z in row] for row in arr], dtype=object)
        return cls(t, re, im)


@dataclass(frozen=True)
class RealBlockMatrix:
    """Integer matrix whose true value is ``entries / 2**deferred_shift``."""

    k: int
    entries: np.ndarray
    deferred_shift: int = 0


# -- naive multiplication ----------------------------------------------------


def clifford_mul_naive(f: CliffordElement, g: CliffordElement, sig: Signature | None = None) -> CliffordElement:
    n = f.n
    if g.n != n:
        raise ValueError("generator counts differ")
    if sig is None:
        sig = Signature(n, 0)
    if sig.n != n:
        raise ValueError(f"signature has {sig.n} generators, element has {n}")
    neg = 0
    for i in range(sig.p + 1, n + 1):
        neg |= 1 << (i - 1)
    fa, ga = f.array, g.array
    out = np.zeros(1 << n, dtype=object)
    bs = np.flatnonzero(np.array([bool(v) for v in ga], dtype=bool))
    gb = ga[bs]
    pc = popcounts(n)
    for a in range(1 << n):
        fv = fa[a]
        if not fv:
            continue
        # one row of the O(4^n) double sum; a ^ bs hits each target at most once
        s = sign_I_array(np.int64(a), bs, n) * (1 - 2 * (pc[a & bs & neg] & 1))
        out[a ^ bs] += s.astype(object) * fv * gb
    return CliffordElement(SetFunction(f.coeffs.universe, out))


# -- Pauli (Jordan-Wigner) matrix image ---------------------------------------

# Pauli letters use 2 bits: 0=I, 1=X, 2=Z, 3=Y.
_I, _X, _Z, _Y = 0, 1, 2, 3

# (bit of x_{2k-1}, bit of x_{2k}, parity of later generators) -> (letter, power of i)
_QUBIT_TABLE = {
    (0, 0, 0): (_I, 0),
    (0, 0, 1): (_Z, 0),
    (1, 0, 0): (_X, 0),
    (1, 0, 1): (_Y, 3),  # X Z = -i Y
    (0, 1, 0): (_Y, 0),
    (0, 1, 1): (_X, 1),  # Y Z = i X
    (1, 1, 0): (_Z, 1),  # X Y = i Z
    (1, 1, 1): (_I, 1),  # X Y Z = i I
}


def qubits(n: int) -> int:
    return (n + 1) // 2


@lru_cache(maxsize=None)
def pauli_map(n: int) -> tuple[np.ndarray, np.ndarray]:
    """For every mask: (Pauli string index, phase exponent mod 4) of the monomial's image.

    Qubit 1 occupies the two most significant bits of the string index.
    """
    t = qubits(n)
    masks = np.arange(1 << n, dtype=np.int64)
    index = np.zeros(1 << n, dtype=np.int64)
    phase = np.zeros(1 << n, dtype=np.int64)
    later = np.zeros(1 << n, dtype=np.int64)  # parity of generators above the current pair
    letters = np.zeros((8,), dtype=np.int64)
    powers = np.zeros((8,), dtype=np.int64)
    for (a, b, p), (letter, power) in _QUBIT_TABLE.items():
        letters[a | b << 1 | p << 2] = letter
        powers[a | b << 1 | p << 2] = power
    for k in range(t, 0, -1):
        a = (masks >> (2 * k - 2)) & 1
        b = (masks >> (2 * k - 1)) & 1 if 2 * k <= n else np.zeros_like(masks)
        key = a | b << 1 | later << 2
        index |= letters[key] << (2 * (t - k))
        phase += powers[key]
        later ^= a ^ b
    phase %= 4
    index.setflags(write=False)
    phase.setflags(write=False)
    return index, phase


@lru_cache(maxsize=None)
def _pauli_inverse(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    index, phase = pauli_map(n)
    t = qubits(n)
    hit = np.zeros(1 << (2 * t), dtype=bool)
    hit[index] = True
    missing = np.flatnonzero(~hit)
    missing.setflags(write=False)
    return index, phase, missing


def _times_i_power(re, im, power):
    """Multiply Gaussian arrays by ``i**power`` where ``power`` is an int array (broadcast on the last axis)."""
    out_re = np.where(power == 0, re, np.where(power == 1, -im, np.where(power == 2, -re, im)))
    out_im = np.where(power == 0, im, np.where(power == 1, re, np.where(power == 2, -im, -re)))
    return out_re, out_im


def _as_dtype(arr):
    return arr.astype(object) if arr.dtype != object and arr.dtype.kind not in "iu" else arr


def phi_forward_array(coeffs: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Batched matrix image; ``coeffs`` has the subset axis last, result has two trailing matrix axes."""
    t = qubits(n)
    index, phase = pauli_map(n)
    lead = coeffs.shape[:-1]
    coeffs = _as_dtype(coeffs)
    zero = np.zeros_like(coeffs)
    pre, pim = _times_i_power(coeffs, zero, phase)
    # (1) signed permutation onto Pauli strings
    re = np.zeros(lead + (1 << (2 * t),), dtype=coeffs.dtype)
    im = np.zeros_like(re)
    re[..., index] = pre
    im[..., index] = pim
    # (2) per-qubit letter -> 2x2 block transform.  Each pass reads the leading
    # letter axis and writes its result as the trailing axis, so after t passes
    # the qubit order is restored and every inner loop runs over a long axis.
    nl = len(lead)
    rest = 1 << max(2 * (t - 1), 0)
    for _ in range(t):
        vr, vi = re.reshape(lead + (4, rest)), im.reshape(lead + (4, rest))
        cI, cX, cZ, cY = (vr[..., j, :] for j in (_I, _X, _Z, _Y))
        dI, dX, dZ, dY = (vi[..., j, :] for j in (_I, _X, _Z, _Y))
        # entry (r, c) stored at r*2 + c:  00 = I+Z, 01 = X - iY, 10 = X + iY, 11 = I - Z
        nr = np.empty(lead + (rest, 4), dtype=vr.dtype)
        ni = np.empty_like(nr)
        np.add(cI, cZ, out=nr[..., 0])
        np.add(cX, dY, out=nr[..., 1])
        np.subtract(cX, dY, out=nr[..., 2])
        np.subtract(cI, cZ, out=nr[..., 3])
        np.add(dI, dZ, out=ni[..., 0])
        np.subtract(dX, cY, out=ni[..., 1])
        np.add(dX, cY, out=ni[..., 2])
        np.subtract(dI, dZ, out=ni[..., 3])
        re, im = nr, ni
    side = 1 << t
    perm = list(range(nl)) + [nl + 2 * q for q in range(t)] + [nl + 2 * q + 1 for q in range(t)]
    re = re.reshape(lead + (2,) * (2 * t)).transpose(perm).reshape(lead + (side, side))
    im = im.reshape(lead + (2,) * (2 * t)).transpose(perm).reshape(lead + (side, side))
    return re, im


def phi_inverse_array(re: np.ndarray, im: np.ndarray, n: int, modulus: int | None = None) -> np.ndarray:
    """Inverse of :func:`phi_forward_array` with one deferred exact division by ``2**t``."""
    t = qubits(n)
    side = 1 << t
    lead = re.shape[:-2]
    if re.shape[-2:] != (side, side):
        raise ValueError(f"expected side {side} matrices for {n} generators, got {re.shape[-2:]}")
    nl = len(lead)
    perm = list(range(nl))
    for q in range(t):
        perm += [nl + q, nl + t + q]
    re = re.reshape(lead + (2,) * (2 * t)).transpose(perm).reshape(lead + (4,) * t)
    im = im.reshape(lead + (2,) * (2 * t)).transpose(perm).reshape(lead + (4,) * t)
    for q in range(t):
        ax = nl + q
        m00, m01, m10, m11 = (np.take(re, j, axis=ax) for j in range(4))
        n00, n01, n10, n11 = (np.take(im, j, axis=ax) for j in range(4))
        # twice the Pauli coefficients: I = m00+m11, X = m01+m10, Z = m00-m11, Y = i(m01-m10)
        slots = [None] * 4
        slots[_I] = (m00 + m11, n00 + n11)
        slots[_X] = (m01 + m10, n01 + n10)
        slots[_Z] = (m00 - m11, n00 - n11)
        slots[_Y] = (n10 - n01, m01 - m10)
        re = np.stack([s[0] for s in slots], axis=ax)
        im = np.stack([s[1] for s in slots], axis=ax)
    re = re.reshape(lead + (1 << (2 * t),))
    im = im.reshape(lead + (1 << (2 * t),))
    index, phase, missing = _pauli_inverse(n)
    if missing.size:
        stray_re, stray_im = re[..., missing], im[..., missing]
        if modulus is not None:
            stray_re, stray_im = stray_re % modulus, stray_im % modulus
        if np.any(stray_re != 0) or np.any(stray_im != 0):
            raise NotInImage("nonzero coefficient on a Pauli string outside the image")
    cre, cim = _times_i_power(re[..., index], im[..., index], (-phase) % 4)
    scale = 1 << t
    if modulus is not None:
        cim = cim % modulus
        if np.any(cim != 0):
            raise NotInImage("non-real coefficient")
        inv = pow(scale, -1, modulus)
        return (_as_object(cre) * inv) % modulus
    if np.any(cim != 0):
        raise NotInImage("non-real coefficient")
    cre = _as_object(cre)
    if np.any(cre % scale != 0):
        raise NotInImage(f"coefficients not divisible by 2^{t}")
    return cre // scale


def _as_object(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object:
        return arr
    return np.array(arr.astype(np.int64).tolist(), dtype=object) if arr.ndim else np.array(int(arr), dtype=object)


def phi_forward(f: CliffordElement, cap: int = PHI_CAP) -> ComplexMatrix:
    if f.n > cap:
        raise ValueError(f"{f.n} generators exceeds the matrix-image cap {cap}")
    re, im = phi_forward_array(f.array, f.n)
    return ComplexMatrix(qubits(f.n), re, im)


def phi_inverse(m: ComplexMatrix, n: int, modulus: int | None = None) -> CliffordElement:
    coeffs = phi_inverse_array(m.re, m.im, n, modulus)
    return CliffordElement(SetFunction(Universe.of_size(n), coeffs))


# -- exact matrix products ------------------------------------------------------


def _max_abs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return int(max(arr.max(), -arr.min()))
    return int(np.abs(arr).max())


def compact(arr: np.ndarray, headroom: int = 1) -> np.ndarray:
    """int64 copy of an integer array when ``max|arr| * headroom`` fits in 62 bits, else object."""
    arr = np.asarray(arr)
    if arr.dtype != object:
        return arr.astype(np.int64, copy=False)
    if _max_abs(arr) * headroom < 1 << 62:
        return arr.astype(np.int64)
    return arr


def _strassen(a: np.ndarray, b: np.ndarray, threshold: int) -> np.ndarray:
    n = a.shape[-1]
    if n <= threshold or n % 2:
        return np.matmul(a, b)
    h = n // 2
    a11, a12, a21, a22 = a[..., :h, :h], a[..., :h, h:], a[..., h:, :h], a[..., h:, h:]
    b11, b12, b21, b22 = b[..., :h, :h], b[..., :h, h:], b[..., h:, :h], b[..., h:, h:]
    m1 = _strassen(a11 + a22, b11 + b22, threshold)
    m2 = _strassen(a21 + a22, b11, threshold)
    m3 = _strassen(a11, b12 - b22, threshold)
    m4 = _strassen(a22, b21 - b11, threshold)
    m5 = _strassen(a11 + a12, b22, threshold)
    m6 = _strassen(a21 - a11, b11 + b12, threshold)
    m7 = _strassen(a12 - a22, b21 + b22, threshold)
    top = np.concatenate([m1 + m4 - m5 + m7, m3 + m5], axis=-1)
    bottom = np.concatenate([m2 + m4, m1 - m2 + m3 + m6], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


_INT64_SAFE = 1 << 62


def _limbs(x: np.ndarray, bits: int) -> list[np.ndarray]:
    """Split int64-range integers into float64 limbs of magnitude below ``2**bits``; the last limb is signed."""
    x = x.astype(np.int64)
    mask = (1 << bits) - 1
    out = []
    while np.abs(x).max(initial=0) > mask:
        out.append((x & mask).astype(np.float64))
        x = x >> bits
    out.append(x.astype(np.float64))
    return out


def _limb_matmul(a: np.ndarray, b: np.ndarray, inner: int) -> np.ndarray:
    """Exact product through BLAS on small limbs: each limb product stays below 2**52."""
    bits = max((52 - max(inner, 1).bit_length()) // 2, 1)
    la, lb = _limbs(a, bits), _limbs(b, bits)
    out = None
    for i, x in enumerate(la):
        for j, y in enumerate(lb):
            part = np.rint(np.matmul(x, y)).astype(np.int64).astype(object) << (bits * (i + j))
            out = part if out is None else out + part
    return out


def integer_matmul(a: np.ndarray, b: np.ndarray, backend: str = "auto", threshold: int = STRASSEN_THRESHOLD) -> np.ndarray:
    """Exact product of integer matrices (batched over leading axes).

    ``auto`` runs BLAS in float64 whenever every partial sum provably stays
    below 2**52, and otherwise multiplies Python integers, switching to
    Strassen above ``threshold``.  ``classical`` and ``strassen`` force the
    exact integer paths.
    """
    inner = a.shape[-1]
    if backend == "auto":
        ma, mb = _max_abs(a), _max_abs(b)
        if ma * mb * max(inner, 1) < _FLOAT_EXACT:
            prod = np.matmul(a.astype(np.float64), b.astype(np.float64))
            return np.rint(prod).astype(np.int64)
        if max(ma, mb) < _INT64_SAFE:
            return _limb_matmul(a, b, inner)
        backend = "strassen"
    a = _as_object(a)
    b = _as_object(b)
    if backend == "classical":
        return np.matmul(a, b)
    if backend == "strassen":
        return _strassen(a, b, threshold)
    raise ValueError(f"unknown matrix backend {backend!r}")


def gaussian_matmul(are, aim, bre, bim, backend: str = "auto", threshold: int = STRASSEN_THRESHOLD):
    """Exact product of Gaussian-integer matrices given as real/imaginary parts."""
    if backend == "auto":
        bound = max(_max_abs(are), _max_abs(aim)) * max(_max_abs(bre), _max_abs(bim)) * 2 * max(are.shape[-1], 1)
        if bound < _FLOAT_EXACT:
            a = are.astype(np.float64) + 1j * aim.astype(np.float64)
            b = bre.astype(np.float64) + 1j * bim.astype(np.float64)
            p = np.matmul(a, b)
            return np.rint(p.real).astype(np.int64), np.rint(p.imag).astype(np.int64)
    # Gauss's three-multiplication trick keeps the exact path at 3 real products.
    k1 = integer_matmul(are + aim, bre, backend, threshold)
    k2 = integer_matmul(are, bim - bre, backend, threshold)
    k3 = integer_matmul(aim, bre + bim, backend, threshold)
    return k1 - k3, k1 + k2


def clifford_mul_fast(f: CliffordElement, g: CliffordElement, backend: str = "auto", modulus: int | None = None) -> CliffordElement:
    if f.n != g.n:
        raise ValueError("generator counts differ")
    fre, fim = phi_forward_array(f.array, f.n)
    gre, gim = phi_forward_array(g.array, g.n)
    re, im = gaussian_matmul(fre, fim, gre, gim, backend)
    if modulus is not None:
        re, im = _as_object(re) % modulus, _as_object(im) % modulus
    try:
        coeffs = phi_inverse_array(re, im, f.n, modulus)
    except NotInImage as exc:  # products of images always lie in the image
        raise RuntimeError(f"internal failure in fast Clifford product: {exc}") from exc
    return CliffordElement(SetFunction(f.coeffs.universe, coeffs))


# -- block recursion for Cl_{k,k} -------------------------------------------------


def _hat(y: np.ndarray, n: int) -> np.ndarray:
    """Grade involution: negate odd monomials."""
    odd = popcounts(n) & 1
    return np.where(odd == 1, -y, y)


def _split_outer(y: np.ndarray, k: int):
    """``y = a + b x_- + c x_+ + d x_- x_+`` with ``x_+`` generator 1 and ``x_-`` generator 2k.

    Works on a leading batch axis and returns the inner coefficient arrays over
    generators ``2..2k-1``.  ``c`` is the right coefficient of ``x_+`` as written.
    """
    inner = 2 * k - 2
    y = y.reshape((-1, 2, 1 << inner, 2))  # [batch, x_- bit, inner mask, x_+ bit]
    sgn = 1 - 2 * (popcounts(inner) & 1)
    a = y[:, 0, :, 0]
    b = y[:, 1, :, 0]
    c = y[:, 0, :, 1] * sgn  # x_+ x_M' = (-1)^{|M'|} x_M' x_+
    d = -y[:, 1, :, 1] * sgn  # x_+ x_M' x_- = -(-1)^{|M'|} x_M' x_- x_+
    return a, b, c, d


def _join_outer(a, b, c, d, k: int) -> np.ndarray:
    inner = 2 * k - 2
    sgn = 1 - 2 * (popcounts(inner) & 1)
    out = np.empty((a.shape[0], 2, 1 << inner, 2), dtype=np.result_type(a, b, c, d))
    out[:, 0, :, 0] = a
    out[:, 1, :, 0] = b
    out[:, 0, :, 1] = c * sgn
    out[:, 1, :, 1] = -d * sgn
    return out.reshape(a.shape[0], -1)


def _gamma(y: np.ndarray, k: int) -> np.ndarray:
    """Block recursion run one level at a time over a growing batch of sub-elements."""
    # every level at most doubles magnitudes, so int64 is safe with k bits of headroom
    batch = compact(np.asarray(y, dtype=object), headroom=1 << (k + 1)).reshape(1, -1)
    for level in range(k, 0, -1):
        a, b, c, d = _split_outer(batch, level)
        n = 2 * level - 2
        # With c the right coefficient of x_+, the multiplicative block layout is
        # [[a - d, c - b], [b^ + c^, a^ + d^]] where ^ is the grade involution.
        quads = np.stack([a - d, c - b, _hat(b, n) + _hat(c, n), _hat(a, n) + _hat(d, n)], axis=1)
        batch = quads.reshape(-1, quads.shape[-1])
    # batch holds 4**k scalars in quadrant order, most significant level first
    m = batch.reshape((2, 2) * k)
    side = 1 << k
    rows = list(range(0, 2 * k, 2))
    cols = list(range(1, 2 * k, 2))
    return m.transpose(rows + cols).reshape(side, side)


def _gamma_inv(m: np.ndarray, k: int) -> np.ndarray:
    """Inverse recursion; returns coefficients scaled by ``2**k``."""
    perm = []
    for q in range(k):
        perm += [q, k + q]
    # quadrant digits (row bit, col bit) per level, outermost first
    batch = compact(np.asarray(m, dtype=object), headroom=1 << (k + 1)).reshape((2,) * (2 * k)).transpose(perm).reshape(-1, 1)
    for level in range(1, k + 1):
        n = 2 * level - 2
        quads = batch.reshape(-1, 4, batch.shape[-1])
        y11, y12, y21, y22 = (quads[:, j] for j in range(4))
        h21, h22 = _hat(y21, n), _hat(y22, n)
        batch = _join_outer(h22 + y11, h21 - y12, h21 + y12, h22 - y11, level)
    return batch.reshape(-1)


def gamma_forward(y: CliffordElement, sig: Signature) -> RealBlockMatrix:
    if sig.p != sig.q or sig.n != y.n:
        raise ValueError("gamma needs a balanced signature matching the element")
    return RealBlockMatrix(sig.p, _gamma(np.asarray(y.array, dtype=object), sig.p), 0)


def gamma_inverse(m: RealBlockMatrix, k: int | None = None) -> CliffordElement:
    k = m.k if k is None else k
    if m.entries.shape != (1 << k, 1 << k):
        raise ValueError(f"expected a {1 << k}-sided matrix")
    scaled = _gamma_inv(np.asarray(m.entries, dtype=object), k).astype(object)
    shift = k + m.deferred_shift
    div = 1 << shift
    if np.any(scaled % div != 0):
        raise NotInImage(f"final division by 2^{shift} is inexact")
    return CliffordElement.from_array(scaled // div)


def clifford_mul_via_gamma(f: CliffordElement, g: CliffordElement, cap: int = GAMMA_CAP) -> CliffordElement:
    n = f.n
    if g.n != n:
        raise ValueError("generator counts differ")
    if n > cap:
        raise ValueError(f"{n} generators exceeds the gamma-path cap {cap}")
    sig = Signature(n, n)

    def embed(x: CliffordElement) -> CliffordElement:
        arr = np.zeros(1 << (2 * n), dtype=object)
        arr[: 1 << n] = x.array
        return CliffordElement.from_array(arr)

    if n == 0:
        return CliffordElement.from_array([f.array[0] * g.array[0]])
    mf = gamma_forward(embed(f), sig).entries
    mg = gamma_forward(embed(g), sig).entries
    prod = gamma_inverse(RealBlockMatrix(n, integer_matmul(mf, mg)), n).array
    if any(prod[1 << n :]):
        raise RuntimeError("product left the embedded subalgebra")
    return CliffordElement(SetFunction(f.coeffs.universe, prod[: 1 << n].copy()))
