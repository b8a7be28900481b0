"""Zeroth-order Takagi-Sugeno-Kang fuzzy neural network.

Two crisp inputs (tracking error and its rate), Gaussian memberships on
each, product inference over the full rule grid, and a normalized
weighted sum of constant consequents:

    mu_A[i] = exp(-((x1 - c_A[i]) / sigma_A[i])^2)
    mu_B[j] = exp(-((x2 - c_B[j]) / sigma_B[j])^2)
    w[i,j]  = mu_A[i] * mu_B[j]
    wbar    = w / sum(w)
    tau_n   = sum(wbar * f)

The consequent grid f is the network output in torque units. All of
centers, widths and consequents are tunable online; this module only
evaluates, the update laws live in ``learning``.

Evaluation is pure. A parameter set is owned by one controller instance;
updates replace the whole FnnParams value, so concurrent snapshot reads
are safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FnnConfig",
    "FnnParams",
    "FnnEvaluation",
    "FnnGradients",
    "NonPositiveWidthError",
    "DegenerateFiringError",
    "membership",
    "initial_params",
    "evaluate",
    "evaluate_guarded",
    "evaluate_offsets",
    "output_gradients",
]

# Firing totals at or below this are treated as complete underflow: the
# input sits so far outside every membership that normalization is
# meaningless.
FIRING_GUARD = 1e-12


class NonPositiveWidthError(ValueError):
    """A Gaussian width is not strictly positive."""


class DegenerateFiringError(ArithmeticError):
    """Every rule's firing strength underflowed; output is undefined."""


@dataclass(frozen=True)
class FnnConfig:
    """Network size and initialization ranges.

    num_mf_input1/num_mf_input2 are the membership counts per input.
    error_range / rate_range set the initial center spread: centers are
    placed uniformly on [-range, +range] and widths equal the center
    spacing, so neighbouring memberships overlap at about e^-1.
    """

    num_mf_input1: int = 3
    num_mf_input2: int = 3
    error_range: float = 2.0
    rate_range: float = 10.0

    def validate(self) -> None:
        if self.num_mf_input1 < 1 or self.num_mf_input2 < 1:
            raise ValueError("membership counts must be >= 1")
        if self.error_range <= 0 or self.rate_range <= 0:
            raise ValueError("initialization ranges must be > 0")


@dataclass
class FnnParams:
    """Full tunable parameter set: antecedent Gaussians plus consequents."""

    centers_a: np.ndarray  # (I,) error units
    widths_a: np.ndarray   # (I,) error units, > 0
    centers_b: np.ndarray  # (J,) error-rate units
    widths_b: np.ndarray   # (J,) error-rate units, > 0
    consequents: np.ndarray  # (I, J) torque units

    def validate(self) -> None:
        if np.any(self.widths_a <= 0) or np.any(self.widths_b <= 0):
            raise NonPositiveWidthError("membership widths must be > 0")
        for arr in (self.centers_a, self.widths_a, self.centers_b, self.widths_b, self.consequents):
            if not np.all(np.isfinite(arr)):
                raise ValueError("parameters must be finite")

    def copy(self) -> "FnnParams":
        return FnnParams(
            centers_a=self.centers_a.copy(),
            widths_a=self.widths_a.copy(),
            centers_b=self.centers_b.copy(),
            widths_b=self.widths_b.copy(),
            consequents=self.consequents.copy(),
        )

    def flatten(self) -> np.ndarray:
        """Concatenate (centers_a, widths_a, centers_b, widths_b, consequents row-major)."""
        return np.concatenate(
            [self.centers_a, self.widths_a, self.centers_b, self.widths_b, self.consequents.ravel()]
        )

    def column_names(self) -> list[str]:
        i, j = len(self.centers_a), len(self.centers_b)
        names = [f"c_a{k}" for k in range(i)]
        names += [f"sigma_a{k}" for k in range(i)]
        names += [f"c_b{k}" for k in range(j)]
        names += [f"sigma_b{k}" for k in range(j)]
        names += [f"f{p}_{q}" for p in range(i) for q in range(j)]
        return names


@dataclass(frozen=True)
class FnnEvaluation:
    """All layer outputs of one forward pass."""

    mu_a: np.ndarray       # (I,) membership degrees for input 1
    mu_b: np.ndarray       # (J,) membership degrees for input 2
    firing: np.ndarray     # (I, J) rule firing strengths
    normalized: np.ndarray  # (I, J) normalized firing strengths, sums to 1
    output: float          # network torque tau_n


@dataclass(frozen=True)
class FnnGradients:
    """Partials of the network output w.r.t. every parameter and both inputs."""

    d_centers_a: np.ndarray
    d_widths_a: np.ndarray
    d_centers_b: np.ndarray
    d_widths_b: np.ndarray
    d_consequents: np.ndarray
    d_x1: float
    d_x2: float


def membership(center: float, width: float, x: float) -> float:
    """Gaussian membership degree exp(-((x - c) / sigma)^2), in (0, 1]."""
    if width <= 0:
        raise NonPositiveWidthError(f"width must be > 0, got {width}")
    z = (x - center) / width
    return float(np.exp(-z * z))


def initial_params(config: FnnConfig) -> FnnParams:
    """Neutral starting parameters: uniform center grid, zero consequents.

    Zero consequents make the network output identically zero, so a fresh
    controller behaves exactly like its conventional part until the
    learning law has something to say.
    """
    config.validate()

    def grid(n: int, reach: float) -> tuple[np.ndarray, np.ndarray]:
        if n == 1:
            return np.zeros(1), np.array([reach])
        centers = np.linspace(-reach, reach, n)
        spacing = 2.0 * reach / (n - 1)
        return centers, np.full(n, spacing)

    centers_a, widths_a = grid(config.num_mf_input1, config.error_range)
    centers_b, widths_b = grid(config.num_mf_input2, config.rate_range)
    return FnnParams(
        centers_a=centers_a,
        widths_a=widths_a,
        centers_b=centers_b,
        widths_b=widths_b,
        consequents=np.zeros((config.num_mf_input1, config.num_mf_input2)),
    )


def _forward_offsets(params: FnnParams, s_a: np.ndarray, s_b: np.ndarray):
    if np.any(params.widths_a <= 0) or np.any(params.widths_b <= 0):
        raise NonPositiveWidthError("membership widths must be > 0")
    za = s_a / params.widths_a
    zb = s_b / params.widths_b
    mu_a = np.exp(-za * za)
    mu_b = np.exp(-zb * zb)
    firing = np.outer(mu_a, mu_b)
    return mu_a, mu_b, firing, float(firing.sum())


def _forward(params: FnnParams, x1: float, x2: float):
    return _forward_offsets(params, x1 - params.centers_a, x2 - params.centers_b)


def evaluate(params: FnnParams, x1: float, x2: float) -> FnnEvaluation:
    """Forward pass through all layers with exact normalization.

    Raises:
        NonPositiveWidthError: any width <= 0.
        DegenerateFiringError: total firing underflowed (input far outside
            every membership), so normalization would divide by ~0.
    """
    mu_a, mu_b, firing, total = _forward(params, x1, x2)
    if total <= FIRING_GUARD:
        raise DegenerateFiringError(
            f"total firing strength {total:.3e} underflowed at inputs ({x1:.3g}, {x2:.3g})"
        )
    normalized = firing / total
    output = float(np.sum(normalized * params.consequents))
    return FnnEvaluation(mu_a=mu_a, mu_b=mu_b, firing=firing, normalized=normalized, output=output)


def evaluate_guarded(params: FnnParams, x1: float, x2: float) -> FnnEvaluation:
    """Forward pass that survives total firing underflow.

    Normalization stays exact for any positive total firing, however
    small, so in the thin-membership regime the network degrades to a
    nearest-rule lookup instead of silently dropping its output. Only
    when every firing underflows double precision to exactly zero is
    there nothing left to normalize; the output is then zero and the
    learning laws hold the consequents, so a controller rides out the
    blackout and resumes when the memberships re-acquire the input.
    """
    mu_a, mu_b, firing, total = _forward(params, x1, x2)
    return _finish_guarded(params, mu_a, mu_b, firing, total)


def evaluate_offsets(params: FnnParams, s_a: np.ndarray, s_b: np.ndarray) -> FnnEvaluation:
    """Guarded forward pass from input-center offsets s = x - c.

    The memberships depend on the inputs only through these offsets, so a
    caller that tracks the offsets directly (the closed-loop runner does,
    because the center law makes them contract exactly) can evaluate
    without knowing the centers' absolute positions.
    """
    mu_a, mu_b, firing, total = _forward_offsets(params, np.asarray(s_a), np.asarray(s_b))
    return _finish_guarded(params, mu_a, mu_b, firing, total)


def _finish_guarded(params, mu_a, mu_b, firing, total) -> FnnEvaluation:
    if total > 0.0:
        normalized = firing / total
        output = float(np.sum(normalized * params.consequents))
    else:
        normalized = np.zeros_like(firing)
        output = 0.0
    return FnnEvaluation(mu_a=mu_a, mu_b=mu_b, firing=firing, normalized=normalized, output=output)


def output_gradients(params: FnnParams, x1: float, x2: float) -> FnnGradients:
    """Analytic partials of the output.

    Differentiating tau_n = sum(w f) / sum(w) w.r.t. any quantity p that
    enters through the firings gives

        d tau_n / dp = sum_ij (f_ij - tau_n) dw_ij/dp / sum(w)

    and the Gaussian factors contribute dw/dc = w 2N/sigma and
    dw/dsigma = w 2N^2/sigma with N = (x - c)/sigma. The consequent
    partials are just the normalized firings.
    """
    ev = evaluate(params, x1, x2)
    n_a = (x1 - params.centers_a) / params.widths_a
    n_b = (x2 - params.centers_b) / params.widths_b
    weighted_resid = ev.normalized * (params.consequents - ev.output)
    row = weighted_resid.sum(axis=1)  # (I,)
    col = weighted_resid.sum(axis=0)  # (J,)
    d_centers_a = 2.0 * n_a / params.widths_a * row
    d_widths_a = 2.0 * n_a * n_a / params.widths_a * row
    d_centers_b = 2.0 * n_b / params.widths_b * col
    d_widths_b = 2.0 * n_b * n_b / params.widths_b * col
    return FnnGradients(
        d_centers_a=d_centers_a,
        d_widths_a=d_widths_a,
        d_centers_b=d_centers_b,
        d_widths_b=d_widths_b,
        d_consequents=ev.normalized.copy(),
        d_x1=float(-d_centers_a.sum()),
        d_x2=float(-d_centers_b.sum()),
    )
