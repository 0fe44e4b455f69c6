"""Numerical experiments on the nonsingularity of random kernel matrices.

The central objects are the matrix diagnostics (determinant sign and log
magnitude from pivoted LU, extreme singular values from SVD, and a relative
singularity verdict) and the bordered system: the kernel matrix of n nodes
extended by the kernel-value column of a free point x with a zero corner.
Its determinant, as a function of x, evaluates at a fresh point to the
determinant of the grown (n + 1)-node matrix, and vanishes at every
existing node.  Two independent evaluation routes are kept: a Schur
complement route through the factorized base matrix and a direct pivoted
factorization of the bordered matrix; they cross-check each other.

monte_carlo runs independent random trials (one derived substream per
trial) and aggregates singularity verdicts; incremental_growth grows one
random configuration a point at a time and compares the two determinant
routes along the way.  Both are deterministic given their configuration,
regardless of how many worker threads are used.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ._linalg import (
    MatrixDiagnostics,
    SingularSystemError,
    diagnostics,
    lu_factorize,
    lu_sign_logabs,
)
from .domains import Density, Domain, PointSet, cross_distance_matrix, mix_seed, sample
from .interpolation import InterpMatrix, assemble
from .kernels import Kernel, kernel_spec

__all__ = [
    "MatrixDiagnostics",
    "diagnostics",
    "det3_null_diag",
    "BorderedSystem",
    "TrialRecord",
    "SizeAggregate",
    "UnisolvenceReport",
    "monte_carlo",
    "GrowthStep",
    "GrowthReport",
    "incremental_growth",
    "CSV_HEADER",
]

CSV_HEADER = ("n", "trial", "det_sign", "log_abs_det", "sigma_min",
              "sigma_max", "condition", "min_dist")


def det3_null_diag(matrix) -> float:
    """Determinant of a 3x3 matrix whose diagonal is exactly zero.

    For such a matrix the determinant reduces to the two triple products
    a12*a23*a31 + a13*a21*a32; the diagonal is checked and a nonzero entry
    raises ValueError.  When all six off-diagonal entries are positive the
    result is positive.
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    if np.any(np.diag(arr) != 0.0):
        raise ValueError("matrix diagonal must be exactly zero")
    return float(arr[0, 1] * arr[1, 2] * arr[2, 0] + arr[0, 2] * arr[1, 0] * arr[2, 1])


class BorderedSystem:
    """Kernel matrix of n nodes bordered by a free evaluation point.

    The border of a point x is the vector of kernel values between x and
    each node; the bordered matrix appends that vector as a final row and
    column with a zero corner.  determinant(x) is its determinant:

    * route "schur": -det(base) * (border @ base^{-1} @ border), available
      when the base matrix is numerically nonsingular (the base is
      factorized once and reused);
    * route "direct": pivoted LU of the full (n + 1) x (n + 1) matrix;
    * route "auto": Schur when available, direct otherwise.

    Instances are immutable after construction and safe to share.
    """

    def __init__(self, base: InterpMatrix, tau: float = 1e-12):
        self.base = base
        self.tau = float(tau)
        self.base_diagnostics = diagnostics(base.entries, self.tau)
        self._lu_piv = None
        self._base_det = None
        if not self.base_diagnostics.singular_verdict:
            self._lu_piv = lu_factorize(base.entries)
            self._base_det = self.base_diagnostics.det_sign * math.exp(
                self.base_diagnostics.log_abs_det
            )

    def border(self, point) -> np.ndarray:
        """Kernel values between one point (d,) and every node, shape (n,)."""
        x = np.asarray(point, dtype=float)
        if x.shape != (self.base.points.dimension,):
            raise ValueError("evaluation point dimension does not match the nodes")
        dist = cross_distance_matrix(x[None, :], self.base.points.points)[0]
        return self.base.kernel.value_scaled(self.base.epsilon, dist)

    def determinant(self, point, method: str = "auto") -> float:
        """Determinant of the bordered matrix at the given point.

        At a fresh point this equals the determinant of the kernel matrix
        grown by that point; at an existing node it is zero because the
        bordered matrix repeats a row.
        """
        if method not in ("auto", "schur", "direct"):
            raise ValueError("method must be 'auto', 'schur' or 'direct'")
        border = self.border(point)
        if method == "auto":
            method = "direct" if self._lu_piv is None else "schur"
        if method == "schur":
            if self._lu_piv is None:
                raise SingularSystemError(
                    "Schur route unavailable: base matrix is numerically singular: "
                    f"{self.base_diagnostics.describe()}",
                    self.base_diagnostics,
                )
            solved = scipy.linalg.lu_solve(self._lu_piv, border, check_finite=False)
            return -self._base_det * float(border @ solved)
        n = self.base.n
        bordered = np.zeros((n + 1, n + 1))
        bordered[:n, :n] = self.base.entries
        bordered[:n, n] = border
        bordered[n, :n] = border
        sign, log_abs = lu_sign_logabs(bordered)
        if sign == 0:
            return 0.0
        return sign * math.exp(log_abs)

    def grid(self, x_coords, y_coords, method: str = "auto") -> np.ndarray:
        """determinant() over a rectangular lattice; planar nodes only.

        Returns an array of shape (len(x_coords), len(y_coords)) whose
        (i, j) entry is the determinant at (x_coords[i], y_coords[j]); each
        entry comes from the same code path as a single-point call.
        """
        if self.base.points.dimension != 2:
            raise ValueError("grid evaluation requires planar (d = 2) nodes")
        xs = np.asarray(x_coords, dtype=float)
        ys = np.asarray(y_coords, dtype=float)
        out = np.empty((xs.size, ys.size))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                out[i, j] = self.determinant(np.array([x, y]), method=method)
        return out


@dataclass(frozen=True)
class TrialRecord:
    """Diagnostics of one random trial."""

    n: int
    trial: int
    det_sign: int
    log_abs_det: float
    sigma_min: float
    sigma_max: float
    condition: float
    min_pairwise_distance: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trial": self.trial,
            "det_sign": self.det_sign,
            "log_abs_det": self.log_abs_det,
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "condition": self.condition,
            "min_pairwise_distance": self.min_pairwise_distance,
        }


def _is_failure(record: TrialRecord, tau: float) -> bool:
    # same rule as MatrixDiagnostics.singular_verdict, recomputed from the
    # stored numbers so the report is self-contained
    return (
        record.sigma_max == 0.0
        or record.sigma_min <= tau * record.sigma_max
        or record.det_sign == 0
    )


@dataclass(frozen=True)
class SizeAggregate:
    """Per-size summary of a Monte Carlo run."""

    n: int
    failures: int
    failure_rate: float
    min_sigma_ratio: float
    max_condition: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "failures": self.failures,
            "failure_rate": self.failure_rate,
            "min_sigma_ratio": self.min_sigma_ratio,
            "max_condition": self.max_condition,
        }


@dataclass(frozen=True, eq=False)
class UnisolvenceReport:
    """Full outcome of a Monte Carlo nonsingularity run."""

    config: dict
    records: tuple
    aggregates: tuple

    @property
    def total_failures(self) -> int:
        return sum(a.failures for a in self.aggregates)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "aggregates": [a.to_dict() for a in self.aggregates],
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def records_csv(self) -> str:
        """Flat per-trial records under the pinned header."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.records:
            writer.writerow([
                r.n,
                r.trial,
                r.det_sign,
                repr(r.log_abs_det),
                repr(r.sigma_min),
                repr(r.sigma_max),
                repr(r.condition),
                repr(r.min_pairwise_distance),
            ])
        return buffer.getvalue()


def _run_trial(kernel: Kernel, domain: Domain, density: Density, n: int, trial: int,
               master_seed: int, tau: float, eps: float) -> TrialRecord:
    substream = mix_seed(master_seed, n, trial)
    points = sample(domain, density, n, substream)
    diag = diagnostics(assemble(points, kernel, eps).entries, tau)
    return TrialRecord(
        n=n,
        trial=trial,
        det_sign=diag.det_sign,
        log_abs_det=diag.log_abs_det,
        sigma_min=diag.sigma_min,
        sigma_max=diag.sigma_max,
        condition=diag.condition,
        min_pairwise_distance=points.min_pairwise_distance,
    )


def monte_carlo(kernel: Kernel, domain: Domain, density: Density,
                n_list: Sequence[int], trials: int, seed: int,
                tau: float = 1e-12, eps: float = 1.0, threads: int = 1) -> UnisolvenceReport:
    """Random-node nonsingularity experiment.

    For every size n in n_list and trial index t, a point set is drawn from
    the substream mix_seed(seed, n, t), its kernel matrix is assembled and
    diagnosed, and the singularity verdicts are aggregated per size.  The
    report is a pure function of the configuration; threads only sets the
    number of concurrent workers and never changes the output.
    """
    n_values = [int(n) for n in n_list]
    if not n_values or any(n < 1 for n in n_values):
        raise ValueError("n_list must contain positive sizes")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    tau = float(tau)

    tasks = [(n, t) for n in n_values for t in range(int(trials))]

    def work(task):
        n, t = task
        return _run_trial(kernel, domain, density, n, t, seed, tau, eps)

    if threads == 1:
        records = [work(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(work, tasks))

    aggregates = []
    for n in n_values:
        subset = [r for r in records if r.n == n]
        failures = sum(_is_failure(r, tau) for r in subset)
        ratios = [
            0.0 if r.sigma_max == 0.0 else r.sigma_min / r.sigma_max for r in subset
        ]
        aggregates.append(SizeAggregate(
            n=n,
            failures=failures,
            failure_rate=failures / len(subset),
            min_sigma_ratio=float(min(ratios)),
            max_condition=float(max(r.condition for r in subset)),
        ))

    config = {
        "kernel": kernel_spec(kernel),
        "epsilon": float(eps),
        "dimension": domain.dimension,
        "domain": domain.to_dict(),
        "density": density.to_dict(),
        "n_list": n_values,
        "trials": int(trials),
        "seed": int(seed),
        "tau": tau,
    }
    return UnisolvenceReport(config=config, records=tuple(records), aggregates=tuple(aggregates))


@dataclass(frozen=True)
class GrowthStep:
    """One growth step: n nodes extended by the next random point."""

    n: int
    f_value: float
    f_abs: float
    det_next: float
    rel_disagreement: float
    cond_base: float
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "f_value": self.f_value,
            "f_abs": self.f_abs,
            "det_next": self.det_next,
            "rel_disagreement": self.rel_disagreement,
            "cond_base": self.cond_base,
            "flagged": self.flagged,
        }


@dataclass(frozen=True, eq=False)
class GrowthReport:
    """Outcome of growing one random configuration a point at a time."""

    config: dict
    steps: tuple
    det_signs: tuple

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "steps": [s.to_dict() for s in self.steps],
            "det_signs": list(self.det_signs),
        }


def incremental_growth(kernel: Kernel, domain: Domain, density: Density,
                       n_max: int, seed: int, tau: float = 1e-12,
                       eps: float = 1.0) -> GrowthReport:
    """Grow a random configuration one point at a time, cross-checking routes.

    At each step the bordered determinant at the incoming point (automatic
    route: Schur when the base is nonsingular, direct otherwise) is compared
    with an independent pivoted factorization of the grown kernel matrix.
    Relative disagreement above 1e-6 is flagged as an ill-conditioning
    event.  The determinant sign chain covers sizes 2 through n_max.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    all_points = sample(domain, density, int(n_max), seed)
    pts = all_points.points

    steps = []
    det_signs = []
    for n in range(1, int(n_max)):
        base_points = PointSet(
            points=pts[:n],
            provenance={"kind": "deterministic",
                        "label": f"growth-prefix(seed={int(seed)}, n={n})"},
        )
        system = BorderedSystem(assemble(base_points, kernel, eps), tau)
        incoming = pts[n]
        f_value = system.determinant(incoming, method="auto")

        grown = PointSet(
            points=pts[: n + 1],
            provenance={"kind": "deterministic",
                        "label": f"growth-prefix(seed={int(seed)}, n={n + 1})"},
        )
        sign, log_abs = lu_sign_logabs(assemble(grown, kernel, eps).entries)
        det_next = 0.0 if sign == 0 else sign * math.exp(log_abs)
        rel = abs(f_value - det_next) / max(abs(det_next), 1e-300)
        steps.append(GrowthStep(
            n=n,
            f_value=float(f_value),
            f_abs=abs(float(f_value)),
            det_next=float(det_next),
            rel_disagreement=float(rel),
            cond_base=system.base_diagnostics.condition,
            flagged=bool(rel > 1e-6),
        ))
        det_signs.append(sign)

    config = {
        "kernel": kernel_spec(kernel),
        "epsilon": float(eps),
        "dimension": domain.dimension,
        "domain": domain.to_dict(),
        "density": density.to_dict(),
        "n_max": int(n_max),
        "seed": int(seed),
        "tau": float(tau),
    }
    return GrowthReport(config=config, steps=tuple(steps), det_signs=tuple(det_signs))
