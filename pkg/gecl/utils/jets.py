# gecl/utils/jets.py
"""
Truncated Taylor jets for exact derivatives of composed analytic functions.

A jet of order K at a point t₀ stores the normalised Taylor coefficients
c_k = f⁽ᵏ⁾(t₀)/k! for k = 0..K. Arithmetic on jets is arithmetic on
truncated power series, so a product of jets is the Leibniz rule and
exp/log/power follow the usual power-series recurrences. The batch axes
(everything after axis 0) let one jet carry many evaluation points.
"""
from math import factorial
from typing import Union

import numpy as np

Scalar = Union[int, float, complex]


class Jet:
    """Truncated Taylor series with a leading coefficient axis."""

    __slots__ = ("coeffs",)
    __array_priority__ = 100  # numpy scalars defer to Jet operators

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs)
        if self.coeffs.ndim == 0:
            raise ValueError("a jet needs at least the value coefficient")

    # -- construction ------------------------------------------------------

    @classmethod
    def variable(cls, t, order: int) -> "Jet":
        """Jet of the identity map at points ``t``."""
        t = np.asarray(t, dtype=float)
        coeffs = np.zeros((order + 1,) + t.shape)
        coeffs[0] = t
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        """Jet of a constant function."""
        value = np.broadcast_to(np.asarray(value), shape)
        coeffs = np.zeros((order + 1,) + value.shape, dtype=np.result_type(value, float))
        coeffs[0] = value
        return cls(coeffs)

    @classmethod
    def from_derivatives(cls, derivatives) -> "Jet":
        """Build a jet from the list [f, f', f'', ...]."""
        derivs = np.asarray(derivatives)
        scale = np.array([1.0 / factorial(k) for k in range(derivs.shape[0])])
        return cls(derivs * scale.reshape((-1,) + (1,) * (derivs.ndim - 1)))

    # -- accessors ---------------------------------------------------------

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    def derivative_value(self, k: int) -> np.ndarray:
        """k-th derivative at the base point."""
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative {k}")
        return self.coeffs[k] * factorial(k)

    def derivatives(self) -> np.ndarray:
        """All derivatives, stacked along axis 0."""
        scale = np.array([float(factorial(k)) for k in range(self.order + 1)])
        return self.coeffs * scale.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))

    def derivative(self) -> "Jet":
        """Jet of f' (one order lower)."""
        if self.order == 0:
            raise ValueError("cannot differentiate a jet of order 0")
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
        return Jet(self.coeffs[1:] * k)

    def truncate(self, order: int) -> "Jet":
        return Jet(self.coeffs[: order + 1])

    # -- helpers -----------------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                order = min(self.order, other.order)
                return other.truncate(order)
            return other
        value = np.asarray(other)
        return Jet.constant(value, self.order, np.broadcast_shapes(value.shape, self.value.shape))

    def _aligned(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        return self.truncate(order).coeffs, other.coeffs[: order + 1]

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "Jet":
        return Jet(-self.coeffs)

    def __add__(self, other) -> "Jet":
        a, b = self._aligned(other)
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        a, b = self._aligned(other)
        return Jet(a - b)

    def __rsub__(self, other) -> "Jet":
        a, b = self._aligned(other)
        return Jet(b - a)

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet) and np.ndim(other) == 0:
            return Jet(self.coeffs * other)
        a, b = self._aligned(other)
        K = a.shape[0]
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
        for k in range(K):
            out[k] = sum(a[i] * b[k - i] for i in range(k + 1))
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        """1/f via q_k = −(Σ_{j≥1} f_j q_{k−j}) / f_0."""
        f = self.coeffs
        q = np.zeros_like(f, dtype=np.result_type(f, float))
        q[0] = 1.0 / f[0]
        for k in range(1, f.shape[0]):
            q[k] = -sum(f[j] * q[k - j] for j in range(1, k + 1)) / f[0]
        return Jet(q)

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet) and np.ndim(other) == 0:
            return Jet(self.coeffs / other)
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, exponent: float) -> "Jet":
        if isinstance(exponent, (int, np.integer)) and exponent >= 0:
            result = Jet.constant(1.0, self.order, self.value.shape)
            for _ in range(int(exponent)):
                result = result * self
            return result
        return (self.log() * float(exponent)).exp()

    def exp(self) -> "Jet":
        """e^f via h_k = (1/k) Σ_{j=1}^k j f_j h_{k−j}."""
        f = self.coeffs
        h = np.zeros_like(f, dtype=np.result_type(f, float))
        h[0] = np.exp(f[0])
        for k in range(1, f.shape[0]):
            h[k] = sum(j * f[j] * h[k - j] for j in range(1, k + 1)) / k
        return Jet(h)

    def log(self) -> "Jet":
        """log f via h_k = (f_k − (1/k) Σ_{j=1}^{k−1} j h_j f_{k−j}) / f_0."""
        f = self.coeffs
        h = np.zeros_like(f, dtype=np.result_type(f, float))
        h[0] = np.log(f[0])
        for k in range(1, f.shape[0]):
            acc = sum(j * h[j] * f[k - j] for j in range(1, k))
            h[k] = (f[k] - acc / k) / f[0]
        return Jet(h)

    def conj(self) -> "Jet":
        return Jet(np.conj(self.coeffs))

    @property
    def real(self) -> "Jet":
        return Jet(np.real(self.coeffs))

    @property
    def imag(self) -> "Jet":
        return Jet(np.imag(self.coeffs))

    def where(self, mask, other: "Jet") -> "Jet":
        """Pointwise select: self where ``mask`` holds, ``other`` elsewhere."""
        other = self._coerce(other)
        a, b = self._aligned(other)
        return Jet(np.where(mask, a, b))

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.value.shape})"
