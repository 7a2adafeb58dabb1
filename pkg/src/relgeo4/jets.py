"""Truncated multivariate Taylor jets in three chart variables.

A :class:`Jet` stores the Taylor coefficients ``c[a,b,c]`` of a scalar
function around a base point, for all multi-indices with ``a+b+c <= order``.
Coefficients are kept in graded order (total degree first), so truncating to
a lower order is a prefix slice.

Jets are batched: the coefficient array has shape ``(ncoef, *batch)`` and
every operation acts pointwise over the batch axes. A whole sampling grid is
therefore processed with a handful of numpy calls per arithmetic operation.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError, OrderExceeded

DEFAULT_ORDER = 4
NVARS = 3


class _Basis:
    """Index tables for jets of one truncation order."""

    def __init__(self, order):
        self.order = order
        idx = []
        for d in range(order + 1):
            for a in range(d, -1, -1):
                for b in range(d - a, -1, -1):
                    idx.append((a, b, d - a - b))
        self.indices = idx
        self.n = len(idx)
        self.position = {m: k for k, m in enumerate(idx)}
        self.factorial = np.array(
            [math.factorial(a) * math.factorial(b) * math.factorial(c) for a, b, c in idx],
            dtype=float,
        )

        # products: pairs (i, j) grouped by target k for np.add.reduceat
        left, right, starts = [], [], []
        for k, target in enumerate(idx):
            starts.append(len(left))
            for i, m in enumerate(idx):
                rest = (target[0] - m[0], target[1] - m[1], target[2] - m[2])
                if min(rest) >= 0:
                    left.append(i)
                    right.append(self.position[rest])
        self.left = np.array(left)
        self.right = np.array(right)
        self.starts = np.array(starts)

        # d/du_v maps order -> order-1
        self.diff_source = []
        self.diff_scale = []
        if order > 0:
            for v in range(NVARS):
                src, scale = [], []
                for m in idx:
                    if sum(m) > order - 1:
                        break
                    up = list(m)
                    up[v] += 1
                    src.append(self.position[tuple(up)])
                    scale.append(float(up[v]))
                self.diff_source.append(np.array(src))
                self.diff_scale.append(np.array(scale))


@lru_cache(maxsize=None)
def basis(order):
    if order < 0:
        raise OrderExceeded(f"negative jet order {order}")
    return _Basis(order)


def ncoef(order):
    return math.comb(order + NVARS, NVARS)


def _expand(arr, ndim):
    # align a batch-shaped array against coefficient arrays of shape (n, *batch)
    arr = np.asarray(arr, dtype=float)
    return arr.reshape(arr.shape + (1,) * (ndim - arr.ndim)) if arr.ndim < ndim else arr


class Jet:
    """Order-``order`` Taylor expansion of a scalar field (possibly batched)."""

    __slots__ = ("coeffs", "order", "base_point")
    __array_ufunc__ = None

    def __init__(self, coeffs, order, base_point=None):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[0] != ncoef(order):
            raise ValueError(f"order-{order} jet needs {ncoef(order)} coefficients, got {coeffs.shape[0]}")
        self.coeffs = coeffs
        self.order = order
        self.base_point = base_point

    # construction

    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER, base_point=None):
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros((ncoef(order),) + value.shape)
        coeffs[0] = value
        return cls(coeffs, order, base_point)

    @classmethod
    def variable(cls, i, point, order=DEFAULT_ORDER):
        """The coordinate function ``u_{i+1}`` expanded at ``point`` (shape ``(3, *batch)``)."""
        point = np.asarray(point, dtype=float)
        coeffs = np.zeros((ncoef(order),) + point.shape[1:])
        coeffs[0] = point[i]
        if order >= 1:
            coeffs[1 + i] = 1.0
        return cls(coeffs, order, point)

    # inspection

    @property
    def value(self):
        return self.coeffs[0]

    @property
    def batch_shape(self):
        return self.coeffs.shape[1:]

    def coefficient(self, multi_index):
        if sum(multi_index) > self.order:
            raise OrderExceeded(f"multi-index {tuple(multi_index)} exceeds jet order {self.order}")
        return self.coeffs[basis(self.order).position[tuple(multi_index)]]

    def derivative(self, multi_index):
        """The partial derivative ``d^{a+b+c} f / du1^a du2^b du3^c`` at the base point."""
        a, b, c = multi_index
        return self.coefficient(multi_index) * (math.factorial(a) * math.factorial(b) * math.factorial(c))

    def is_constant(self):
        return not np.any(self.coeffs[1:])

    def __repr__(self):
        return f"Jet(order={self.order}, batch={self.batch_shape}, value={self.value!r})"

    # structural

    def truncate(self, order):
        if order > self.order:
            raise OrderExceeded(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.coeffs[: ncoef(order)], order, self.base_point)

    def diff(self, i):
        """Jet of ``d f / du_{i+1}``; one order lower."""
        if self.order == 0:
            raise OrderExceeded("cannot differentiate an order-0 jet")
        b = basis(self.order)
        coeffs = self.coeffs[b.diff_source[i]] * _expand(b.diff_scale[i], self.coeffs.ndim)
        return Jet(coeffs, self.order - 1, self.base_point)

    def _nilpotent(self):
        coeffs = self.coeffs.copy()
        coeffs[0] = 0.0
        return Jet(coeffs, self.order, self.base_point)

    def _compose(self, taylor):
        """Evaluate ``sum_k taylor[k] * (self - value)^k`` by Horner's rule."""
        t = self._nilpotent()
        res = Jet.constant(np.broadcast_to(taylor[self.order], self.batch_shape), self.order, self.base_point)
        for k in range(self.order - 1, -1, -1):
            res = res * t
            res.coeffs[0] = res.coeffs[0] + taylor[k]
        return res

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return self.truncate(order).coeffs, other.truncate(order).coeffs, order
        return self.coeffs, None, self.order

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._coerce(other)
            return Jet(a + b, order, self.base_point)
        coeffs = self.coeffs.copy()
        coeffs[0] = coeffs[0] + other
        return Jet(coeffs, self.order, self.base_point)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.order, self.base_point)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._coerce(other)
            bs = basis(order)
            prod = a[bs.left] * b[bs.right]
            return Jet(np.add.reduceat(prod, bs.starts, axis=0), order, self.base_point)
        return Jet(self.coeffs * _expand(other, self.coeffs.ndim - 1)[None], self.order, self.base_point)

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if np.any(v == 0):
            raise DomainError("division by a jet whose value is zero")
        taylor = [(-1.0) ** k / v ** (k + 1) for k in range(self.order + 1)]
        return self._compose(taylor)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise DomainError("division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        exponent = float(exponent)
        if exponent.is_integer():
            n = int(exponent)
            if n < 0:
                return self.reciprocal() ** (-n)
            result = Jet.constant(np.ones(self.batch_shape), self.order, self.base_point)
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        v = self.value
        if np.any(v <= 0):
            raise DomainError(f"non-integer power {exponent} of a non-positive value")
        taylor = [_binom(exponent, k) * v ** (exponent - k) for k in range(self.order + 1)]
        return self._compose(taylor)


def _binom(alpha, k):
    out = 1.0
    for j in range(k):
        out *= (alpha - j) / (j + 1)
    return out


def _fact(k):
    return float(math.factorial(k))


# elementary functions

def exp(f):
    e = np.exp(f.value)
    return f._compose([e / _fact(k) for k in range(f.order + 1)])


def log(f):
    v = f.value
    if np.any(v <= 0):
        raise DomainError("log of a non-positive value")
    taylor = [np.log(v)] + [(-1.0) ** (k - 1) / (k * v ** k) for k in range(1, f.order + 1)]
    return f._compose(taylor)


def sin(f):
    v = f.value
    return f._compose([np.sin(v + k * np.pi / 2) / _fact(k) for k in range(f.order + 1)])


def cos(f):
    v = f.value
    return f._compose([np.cos(v + k * np.pi / 2) / _fact(k) for k in range(f.order + 1)])


def tan(f):
    c = cos(f)
    if np.any(np.abs(c.value) < 1e-300):
        raise DomainError("tan evaluated at a pole")
    return sin(f) / c


def sinh(f):
    v = f.value
    s, c = np.sinh(v), np.cosh(v)
    return f._compose([(s if k % 2 == 0 else c) / _fact(k) for k in range(f.order + 1)])


def cosh(f):
    v = f.value
    s, c = np.sinh(v), np.cosh(v)
    return f._compose([(c if k % 2 == 0 else s) / _fact(k) for k in range(f.order + 1)])


def sqrt(f):
    if np.any(f.value <= 0):
        raise DomainError("sqrt of a non-positive value")
    return f ** 0.5


def cbrt(f):
    v = f.value
    if np.any(v == 0):
        raise DomainError("cbrt is not differentiable at 0")
    r = np.cbrt(v)
    return f._compose([_binom(1.0 / 3.0, k) * r / v ** k for k in range(f.order + 1)])


def absolute(f):
    v = f.value
    if np.any(v == 0):
        raise DomainError("abs is not differentiable at 0")
    return f * np.sign(v)


FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "sinh": sinh,
    "cosh": cosh,
    "abs": absolute,
    "cbrt": cbrt,
}


def partial(jet, sequence=()):
    """Partial derivative of ``jet`` along an index sequence, e.g. ``(0, 0, 1)`` for d1 d1 d2.

    Indices are 0-based chart variables. The empty sequence gives the value.
    """
    multi = [0, 0, 0]
    for i in sequence:
        multi[i] += 1
    if sum(multi) > jet.order:
        raise OrderExceeded(f"derivative of order {sum(multi)} exceeds jet order {jet.order}")
    return jet.derivative(tuple(multi))


class VecJet:
    """A vector of jets (four components for a field in R^4)."""

    __slots__ = ("components",)

    def __init__(self, components):
        components = tuple(components)
        bp = [c.base_point for c in components if c.base_point is not None]
        if any(p is not bp[0] and not np.array_equal(p, bp[0]) for p in bp[1:]):
            raise ValueError("VecJet components must share a base point")
        self.components = components

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, k):
        return self.components[k]

    def __len__(self):
        return len(self.components)

    @property
    def order(self):
        return min(c.order for c in self.components)

    @property
    def base_point(self):
        return self.components[0].base_point

    @property
    def value(self):
        """Point values, shape ``(*batch, dim)``."""
        return np.stack([c.value for c in self.components], axis=-1)

    def diff(self, i):
        return VecJet(c.diff(i) for c in self.components)

    def derivative(self, multi_index):
        return np.stack([c.derivative(multi_index) for c in self.components], axis=-1)

    def truncate(self, order):
        return VecJet(c.truncate(order) for c in self.components)

    def dot(self, other):
        out = self.components[0] * other[0]
        for a, b in zip(self.components[1:], list(other)[1:]):
            out = out + a * b
        return out

    def __add__(self, other):
        return VecJet(a + b for a, b in zip(self.components, other))

    def __sub__(self, other):
        return VecJet(a - b for a, b in zip(self.components, other))

    def __neg__(self):
        return VecJet(-a for a in self.components)

    def __mul__(self, s):
        return VecJet(a * s for a in self.components)

    __rmul__ = __mul__

    def __truediv__(self, s):
        if isinstance(s, Jet):
            s = s.reciprocal()
            return VecJet(a * s for a in self.components)
        return VecJet(a / s for a in self.components)

    def __repr__(self):
        return f"VecJet(order={self.order}, value={self.value!r})"
