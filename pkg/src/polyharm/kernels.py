"""Polyharmonic radial kernels.

Two families are provided, both functions of the Euclidean distance r >= 0:

* thin-plate splines  r**(2*k) * log(r)  with integer order k >= 1, and
* radial powers       r**nu              with real exponent nu > 0 that is
  not an even integer (even integer powers of r are plain polynomials and
  are rejected at construction).

Both families are conditionally positive definite; the order is k + 1 for
thin-plate splines and ceil(nu / 2) for radial powers.  The value at r = 0
is hard-coded to 0, which is the analytic limit; log(0) is never evaluated.

Kernels are immutable value objects and every operation here is a pure
function, so they are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "KernelInfo",
    "ThinPlateSpline",
    "RadialPower",
    "Kernel",
    "parse_kernel",
    "kernel_spec",
]


@dataclass(frozen=True)
class KernelInfo:
    """Structural metadata for a kernel.

    Attributes
    ----------
    cpd_order : int
        Order of conditional positive definiteness.
    singular_derivative_order : int
        Order of the first radial derivative that is singular at r = 0.
    is_odd_integer_rp : bool
        True only for radial powers whose exponent is an odd integer.
    """

    cpd_order: int
    singular_derivative_order: int
    is_odd_integer_rp: bool


def _check_radii(r: np.ndarray) -> None:
    if np.any(r < 0.0):
        raise ValueError("kernel radius must be nonnegative")


def _check_scale(eps: float) -> float:
    eps = float(eps)
    if not math.isfinite(eps) or eps <= 0.0:
        raise ValueError("scale parameter must be a positive finite real")
    return eps


@dataclass(frozen=True)
class ThinPlateSpline:
    """Thin-plate spline kernel r**(2*k) * log(r) of integer order k >= 1.

    The natural logarithm is used.  The value is exactly 0 at r = 0 (the
    analytic limit) and exactly 0 at r = 1, since log(1.0) == 0.0 in IEEE
    arithmetic.  Values are negative for 0 < r < 1.
    """

    k: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)):
            raise ValueError("thin-plate spline order k must be an integer")
        if self.k < 1:
            raise ValueError("thin-plate spline order k must be at least 1")
        object.__setattr__(self, "k", int(self.k))

    def value(self, r):
        """Evaluate the kernel at distance(s) r >= 0.

        Parameters
        ----------
        r : float or array_like
            Nonnegative distances.

        Returns
        -------
        float or numpy.ndarray
            r**(2*k) * log(r), with the value at r = 0 hard-coded to 0.
        """
        arr = np.asarray(r, dtype=float)
        _check_radii(arr)
        power = 2 * self.k
        # log is only evaluated at strictly positive radii
        safe = np.where(arr > 0.0, arr, 1.0)
        out = np.where(arr > 0.0, safe**power * np.log(safe), 0.0)
        if arr.ndim == 0:
            return float(out)
        return out

    def value_scaled(self, eps, r):
        """Evaluate the kernel at the scaled distance eps * r, eps > 0."""
        eps = _check_scale(eps)
        return self.value(np.asarray(r, dtype=float) * eps)

    def info(self) -> KernelInfo:
        return KernelInfo(
            cpd_order=self.k + 1,
            singular_derivative_order=2 * self.k,
            is_odd_integer_rp=False,
        )


@dataclass(frozen=True)
class RadialPower:
    """Radial power kernel r**nu with nu > 0 and nu not an even integer.

    The kernel is positively homogeneous: value(eps * r) equals
    eps**nu * value(r) up to rounding, which makes unaugmented radial-power
    interpolants independent of the scale parameter.
    """

    nu: float

    def __post_init__(self) -> None:
        nu = float(self.nu)
        if not math.isfinite(nu) or nu <= 0.0:
            raise ValueError("radial power exponent nu must be a positive finite real")
        if nu == round(nu) and int(round(nu)) % 2 == 0:
            raise ValueError(
                "radial power exponent nu must not be an even integer "
                "(r**nu would be a polynomial)"
            )
        object.__setattr__(self, "nu", nu)

    def value(self, r):
        """Evaluate r**nu at distance(s) r >= 0.  0**nu is exactly 0."""
        arr = np.asarray(r, dtype=float)
        _check_radii(arr)
        out = arr**self.nu
        if arr.ndim == 0:
            return float(out)
        return out

    def value_scaled(self, eps, r):
        """Evaluate the kernel at the scaled distance eps * r, eps > 0."""
        eps = _check_scale(eps)
        return self.value(np.asarray(r, dtype=float) * eps)

    def info(self) -> KernelInfo:
        rounded = round(self.nu)
        return KernelInfo(
            cpd_order=math.ceil(self.nu / 2.0),
            singular_derivative_order=math.ceil(self.nu),
            is_odd_integer_rp=(self.nu == rounded and int(rounded) % 2 == 1),
        )


Kernel = Union[ThinPlateSpline, RadialPower]


def parse_kernel(text: str) -> Kernel:
    """Parse a compact kernel description, case-insensitively.

    Accepted forms are ``tps:k=<int>`` and ``rp:nu=<float>``, for example
    ``tps:k=2`` or ``rp:nu=1.5``.  Raises ValueError on anything else,
    including exponents rejected by the kernel constructors.
    """
    if not isinstance(text, str):
        raise ValueError("kernel description must be a string")
    cleaned = text.strip().lower()
    family, _, params = cleaned.partition(":")
    key, _, value = params.partition("=")
    if family == "tps":
        if key != "k" or not value:
            raise ValueError(f"bad thin-plate spline description {text!r}; expected 'tps:k=<int>'")
        try:
            k = int(value)
        except ValueError:
            raise ValueError(f"bad thin-plate spline order in {text!r}") from None
        return ThinPlateSpline(k=k)
    if family == "rp":
        if key != "nu" or not value:
            raise ValueError(f"bad radial power description {text!r}; expected 'rp:nu=<float>'")
        try:
            nu = float(value)
        except ValueError:
            raise ValueError(f"bad radial power exponent in {text!r}") from None
        return RadialPower(nu=nu)
    raise ValueError(f"unknown kernel family {text!r}; expected 'tps:k=<int>' or 'rp:nu=<float>'")


def kernel_spec(kernel: Kernel) -> str:
    """Canonical compact description of a kernel; inverse of parse_kernel."""
    if isinstance(kernel, ThinPlateSpline):
        return f"tps:k={kernel.k}"
    if isinstance(kernel, RadialPower):
        nu = kernel.nu
        text = str(int(nu)) if nu == int(nu) else repr(nu)
        return f"rp:nu={text}"
    raise TypeError(f"not a kernel: {kernel!r}")
