"""
Measure Service - coherent information, the channel constant c(S) and the
spectral bounds used by the strengthened inequalities.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.optimize import minimize_scalar

from app.errors import DimensionError, InvalidInputError
from app.schemas.quantum import DensityMatrix, Ensemble, KrausChannel, is_infinite
from app.schemas.reports import (
    ChannelConstant,
    CoherentInfoResult,
    OptimizerMethod,
    OptimizerSettings,
    RelativeEntropyIdentity,
    SpectrumInterval,
    WeylBound,
)
from app.services import channel_service, state_service
from app.utils import linalg, sampling

logger = structlog.get_logger()

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
WEYL_TOL = 1e-9


def fibonacci_sphere(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Polar and azimuthal angles of an n-point Fibonacci lattice on the unit sphere."""
    index = np.arange(n, dtype=np.float64)
    z = 1.0 - (2.0 * index + 1.0) / n
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.mod(index * GOLDEN_ANGLE, 2.0 * np.pi)
    return theta, phi


def qubit_states(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Rows cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>."""
    theta = np.atleast_1d(theta)
    phi = np.atleast_1d(phi)
    return np.stack([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)], axis=1)


def output_minima(s: KrausChannel, vectors: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of S(|psi><psi|) for each row psi of ``vectors``."""
    ops = np.stack(s.ops)
    images = np.einsum("koi,ni->nko", ops, vectors)
    outputs = np.einsum("nka,nkb->nab", images, np.conj(images))
    outputs = (outputs + np.conj(np.swapaxes(outputs, 1, 2))) / 2.0
    return np.linalg.eigvalsh(outputs)[:, 0]


def _vector_from_angles(params: np.ndarray, d: int) -> np.ndarray:
    """Unit vector from d-1 hyperspherical magnitude angles and d-1 relative phases."""
    alphas, betas = params[: d - 1], params[d - 1:]
    magnitudes = np.empty(d)
    tail = 1.0
    for k in range(d - 1):
        magnitudes[k] = tail * np.cos(alphas[k])
        tail *= np.sin(alphas[k])
    magnitudes[d - 1] = tail
    phases = np.concatenate([[0.0], betas])
    return magnitudes * np.exp(1j * phases)


def _angles_from_vector(v: np.ndarray) -> np.ndarray:
    d = v.shape[0]
    magnitudes = np.abs(v)
    alphas = np.empty(d - 1)
    for k in range(d - 1):
        tail = np.linalg.norm(magnitudes[k:])
        alphas[k] = np.arccos(np.clip(magnitudes[k] / tail, -1.0, 1.0)) if tail > 0 else 0.0
    betas = np.angle(v[1:]) - np.angle(v[0])
    return np.concatenate([alphas, betas])


class MeasureService:
    """Information measures of states sent through channels."""

    @classmethod
    def coherent_information(cls, e: Ensemble, s: KrausChannel) -> CoherentInfoResult:
        """
        I(rho; S) = S(S rho) - S((1_R ⊗ S)(|psi^R><psi^R|)).

        Args:
            e: input ensemble, realising rho and its purification
            s: channel acting on the ensemble's space

        Returns:
            CoherentInfoResult with output entropy and entropy exchange
        """
        if e.dim != s.dim_in:
            raise DimensionError(f"ensemble lives in dimension {e.dim}, channel expects {s.dim_in}")
        rho = state_service.ensemble_to_density(e)
        output_entropy = state_service.von_neumann_entropy(channel_service.apply(s, rho))
        entropy_exchange = state_service.von_neumann_entropy(cls.evolved_purification(e, s))
        return CoherentInfoResult(
            mutual_info=output_entropy - entropy_exchange,
            output_entropy=output_entropy,
            entropy_exchange=entropy_exchange,
        )

    @classmethod
    def evolved_purification(cls, e: Ensemble, s: KrausChannel) -> DensityMatrix:
        """(1_R ⊗ S)(|psi^R><psi^R|) on the full n*d-dimensional space."""
        purified = state_service.purify(e)
        extended = channel_service.extend_with_identity(s, purified.ref_dim)
        return channel_service.apply(extended, DensityMatrix(mat=purified.projector()))

    @classmethod
    def relative_entropy_identity(cls, e: Ensemble, s: KrausChannel) -> RelativeEntropyIdentity:
        """
        Both sides of
        S((1⊗S)(psi^R) || rho^R ⊗ S rho) = -S((1⊗S)(psi^R)) + S(rho^R) + S(S rho).
        """
        if e.dim != s.dim_in:
            raise DimensionError(f"ensemble lives in dimension {e.dim}, channel expects {s.dim_in}")
        evolved = cls.evolved_purification(e, s)
        rho_ref = state_service.reference_state(e)
        output = channel_service.apply(s, state_service.ensemble_to_density(e))
        product = DensityMatrix(mat=linalg.kron(rho_ref.mat, output.mat))

        lhs = state_service.relative_entropy(evolved, product)
        rhs = (
            -state_service.von_neumann_entropy(evolved)
            + state_service.von_neumann_entropy(rho_ref)
            + state_service.von_neumann_entropy(output)
        )
        difference = None if is_infinite(lhs) else abs(lhs - rhs)
        return RelativeEntropyIdentity(lhs=lhs, rhs=rhs, difference=difference)

    @classmethod
    def c_at_state(cls, s: KrausChannel, rho: DensityMatrix) -> float:
        """c(S, rho): smallest eigenvalue of S rho."""
        return linalg.lambda_min(channel_service.apply(s, rho).mat)

    @classmethod
    def c_of_channel(cls, s: KrausChannel, budget: Optional[OptimizerSettings] = None) -> ChannelConstant:
        """
        c(S) = min over inputs of the smallest eigenvalue of S rho.

        Only pure inputs are searched: lambda_min is concave on Hermitian
        matrices and rho -> S rho is linear, so the minimum over the convex set
        of density matrices is attained at an extreme point.

        Qubit inputs use a Fibonacci grid on the Bloch sphere refined by
        golden-section search on the two sphere angles; larger inputs use
        seeded random starts refined by coordinate-wise angle descent. A
        one-dimensional input space has a single state and is reported as
        the "trivial" strategy.
        """
        budget = budget or OptimizerSettings()
        if s.dim_in == 1:
            witness = np.ones(1, dtype=np.complex128)
            strategy, evaluations = "trivial", 1
        elif s.dim_in == 2:
            witness, evaluations = cls._search_bloch_sphere(s, budget)
            strategy = "fibonacci-golden"
        else:
            witness, evaluations = cls._search_random_starts(s, budget)
            strategy = "random-coordinate"

        value = cls.c_at_state(s, state_service.pure_state(witness))
        result = ChannelConstant(
            value=max(value, 0.0),
            witness=linalg.frozen(np.asarray(witness, dtype=np.complex128)),
            method=OptimizerMethod(strategy=strategy, budget=budget, evaluations=evaluations),
        )
        logger.debug("Channel constant computed", value=result.value, strategy=strategy, evaluations=evaluations)
        return result

    @classmethod
    def _search_bloch_sphere(cls, s: KrausChannel, budget: OptimizerSettings) -> Tuple[np.ndarray, int]:
        theta, phi = fibonacci_sphere(budget.grid_points)
        values = output_minima(s, qubit_states(theta, phi))
        evaluations = budget.grid_points
        starts = np.argsort(values, kind="stable")[: budget.refine_starts]
        spacing = np.sqrt(4.0 * np.pi / budget.grid_points)

        def at(t: float, p: float) -> float:
            return float(output_minima(s, qubit_states(t, p))[0])

        best: List[Tuple[float, float, float]] = []
        for start in starts:
            t, p = float(theta[start]), float(phi[start])
            width = 2.0 * spacing
            for _ in range(budget.refinement_rounds):
                lo, hi = max(0.0, t - width), min(np.pi, t + width)
                res = minimize_scalar(lambda u: at(u, p), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
                t, evaluations = float(res.x), evaluations + int(res.nfev)
                phi_width = min(np.pi, width / max(np.sin(t), 1e-3))
                res = minimize_scalar(
                    lambda u: at(t, u), bounds=(p - phi_width, p + phi_width), method="bounded", options={"xatol": 1e-12}
                )
                p, evaluations = float(res.x), evaluations + int(res.nfev)
                width /= 2.0
            best.append((at(t, p), t, p))
        # the poles are not on the lattice
        for pole in (0.0, np.pi):
            best.append((at(pole, 0.0), pole, 0.0))
            evaluations += 1

        index = int(np.argmin([b[0] for b in best]))
        _, t, p = best[index]
        return qubit_states(t, p)[0], evaluations

    @classmethod
    def _search_random_starts(cls, s: KrausChannel, budget: OptimizerSettings) -> Tuple[np.ndarray, int]:
        d = s.dim_in
        rng = sampling.rng_for(budget.seed)
        starts = np.stack([sampling.haar_vector(rng, d) for _ in range(budget.random_starts)])
        values = output_minima(s, starts)
        evaluations = budget.random_starts
        chosen = np.argsort(values, kind="stable")[: budget.refine_starts]

        refined: List[Tuple[float, np.ndarray]] = []
        n_params = 2 * (d - 1)
        moves = np.concatenate([np.eye(n_params), -np.eye(n_params)])
        for start in chosen:
            params = _angles_from_vector(starts[start])
            current = float(values[start])
            step = np.pi / 8.0
            for _ in range(budget.coordinate_iterations):
                candidates = params[None, :] + step * moves
                vectors = np.stack([_vector_from_angles(c, d) for c in candidates])
                trial = output_minima(s, vectors)
                evaluations += len(candidates)
                k = int(np.argmin(trial))
                if trial[k] < current:
                    params, current = candidates[k], float(trial[k])
                else:
                    step /= 2.0
                    if step < 1e-14:
                        break
            refined.append((current, _vector_from_angles(params, d)))

        index = int(np.argmin([r[0] for r in refined]))
        return refined[index][1], evaluations

    @classmethod
    def weyl_bounds(cls, a: np.ndarray, b: np.ndarray) -> List[WeylBound]:
        """
        Weyl bounds for C = A + B with ascending spectra:
        max(a_1 + b_k, b_1 + a_k) <= c_k <= min(b_k + a_n, a_k + b_n).
        """
        if a.shape != b.shape:
            raise DimensionError(f"Weyl bounds need equal shapes, got {a.shape} and {b.shape}")
        spec_a = linalg.eigvalsh(a)
        spec_b = linalg.eigvalsh(b)
        spec_c = linalg.eigvalsh(np.asarray(a) + np.asarray(b))
        n = len(spec_a)
        bounds = []
        for k in range(n):
            lower = max(spec_a[0] + spec_b[k], spec_b[0] + spec_a[k])
            upper = min(spec_b[k] + spec_a[n - 1], spec_a[k] + spec_b[n - 1])
            value = spec_c[k]
            violated = bool(value < lower - WEYL_TOL or value > upper + WEYL_TOL)
            bounds.append(WeylBound(k=k + 1, lower=float(lower), upper=float(upper), value=float(value), violated=violated))
        return bounds

    @classmethod
    def mixture_spectrum_bounds(cls, rho_prime: DensityMatrix, c: float) -> List[SpectrumInterval]:
        """
        Intervals for sigma_k (1 - c) when rho' = c|0><0| + (1 - c) sigma:
        k = 1: rho'_1 - c <= . <= min(rho'_1, rho'_n - c);
        k >= 2: max(rho'_1, rho'_k - c) <= . <= rho'_k.
        """
        if not 0.0 <= c < 1.0:
            raise InvalidInputError(f"mixture weight c must lie in [0, 1), got {c}")
        spectrum = linalg.eigvalsh(rho_prime.mat)
        n = len(spectrum)
        intervals = [SpectrumInterval(k=1, lower=float(spectrum[0] - c), upper=float(min(spectrum[0], spectrum[n - 1] - c)))]
        for k in range(1, n):
            intervals.append(
                SpectrumInterval(k=k + 1, lower=float(max(spectrum[0], spectrum[k] - c)), upper=float(spectrum[k]))
            )
        return intervals


def two_pauli_bloch_action(x: float, a: Sequence[float]) -> Tuple[float, float, float]:
    """Bloch vector of the two-Pauli channel output: (a1 x, a2 x, a3 (2x - 1))."""
    return (a[0] * x, a[1] * x, a[2] * (2.0 * x - 1.0))


def c_two_pauli_closed_form(x: float) -> float:
    """Closed form (1 - |2x - 1|)/2 stated for the two-Pauli channel."""
    return (1.0 - abs(2.0 * x - 1.0)) / 2.0


def c_two_pauli_bloch(x: float) -> float:
    """Minimum of (1 - |b|)/2 over the Bloch sphere: (1 - max(x, |2x - 1|))/2."""
    return (1.0 - max(x, abs(2.0 * x - 1.0))) / 2.0


# Convenience functions
coherent_information = MeasureService.coherent_information
relative_entropy_identity = MeasureService.relative_entropy_identity
c_at_state = MeasureService.c_at_state
c_of_channel = MeasureService.c_of_channel
weyl_bounds = MeasureService.weyl_bounds
mixture_spectrum_bounds = MeasureService.mixture_spectrum_bounds
