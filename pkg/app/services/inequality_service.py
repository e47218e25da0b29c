"""
Inequality Service - instance checkers and a seeded fuzzing harness for the
relative-entropy and coherent-information inequalities.

Every report is oriented so that ``slack = greater side - lesser side`` and
``satisfied`` means ``slack >= -tolerance``.
"""

from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from pydantic import ValidationError

from app.config import settings
from app.errors import DimensionError, InvalidInputError, UnknownInequalityError
from app.schemas.quantum import (
    INFINITE,
    NEG_INFINITE,
    DensityMatrix,
    Ensemble,
    ExtendedReal,
    KrausChannel,
    is_infinite,
)
from app.schemas.reports import FuzzSettings, FuzzSummary, InequalityReport, OptimizerSettings, StratumCounts
from app.services import channel_service, measure_service, state_service
from app.utils import linalg, sampling

logger = structlog.get_logger()


class Inequality(str, Enum):
    LINDBLAD = "lindblad"
    JOINT_CONVEXITY = "jointconv"
    DPI = "dpi"
    CHANNEL_CONVEXITY = "chanconv"
    STRENGTHENED_LINDBLAD = "slindblad"
    STRENGTHENED_DPI = "sdpi"
    RELATIVE_ENTROPY_IDENTITY = "identity"
    WEYL = "weyl"
    MIXTURE_SPECTRUM = "mixspec"


ALIASES = {
    "joint_convexity": Inequality.JOINT_CONVEXITY,
    "channel_convexity": Inequality.CHANNEL_CONVEXITY,
    "strengthened_lindblad": Inequality.STRENGTHENED_LINDBLAD,
    "strengthened_dpi": Inequality.STRENGTHENED_DPI,
    "relative_entropy_identity": Inequality.RELATIVE_ENTROPY_IDENTITY,
    "mixture_spectrum": Inequality.MIXTURE_SPECTRUM,
}

# Inequalities with a known general proof; strict mode fails only on these.
THEOREM_BACKED = frozenset(
    {Inequality.LINDBLAD, Inequality.JOINT_CONVEXITY, Inequality.DPI, Inequality.CHANNEL_CONVEXITY}
)


def resolve_inequality(name: Union[str, Inequality]) -> Inequality:
    """Map a canonical name or alias to its Inequality."""
    if isinstance(name, Inequality):
        return name
    key = name.strip().lower().replace("-", "_")
    if key in ALIASES:
        return ALIASES[key]
    try:
        return Inequality(key)
    except ValueError:
        known = sorted([i.value for i in Inequality] + list(ALIASES))
        raise UnknownInequalityError(f"unknown inequality '{name}'; known: {', '.join(known)}")


def default_tolerance(inequality: Inequality) -> float:
    if inequality in THEOREM_BACKED or inequality in (Inequality.WEYL, Inequality.MIXTURE_SPECTRUM):
        return settings.theorem_tol
    return settings.optimizer_tol


def scale(k: float, value: ExtendedReal) -> ExtendedReal:
    """k * value with 0 * inf = 0."""
    if is_infinite(value):
        if k == 0:
            return 0.0
        return value if k > 0 else -value
    return k * value


def add(a: ExtendedReal, b: ExtendedReal) -> ExtendedReal:
    if is_infinite(a):
        return a
    if is_infinite(b):
        return b
    return a + b


def build_report(
    name: Inequality,
    greater: ExtendedReal,
    lesser: ExtendedReal,
    tol: Optional[float] = None,
    instance: Optional[Dict[str, Any]] = None,
    auxiliary: Optional[Dict[str, Any]] = None,
) -> InequalityReport:
    """Report for ``greater >= lesser``; both sides infinite is indeterminate."""
    tol = default_tolerance(name) if tol is None else tol
    indeterminate = False
    if is_infinite(greater) and is_infinite(lesser):
        slack: Optional[ExtendedReal] = None
        satisfied = True
        indeterminate = True
    elif is_infinite(greater):
        slack, satisfied = greater, greater.sign > 0
    elif is_infinite(lesser):
        slack, satisfied = -lesser, lesser.sign < 0
    else:
        slack = float(greater - lesser)
        satisfied = slack >= -tol
    return InequalityReport(
        name=name.value,
        lhs=greater,
        rhs=lesser,
        slack=slack,
        satisfied=satisfied,
        indeterminate=indeterminate,
        tolerance=tol,
        instance=instance or {},
        auxiliary=auxiliary or {},
    )


def _mixture(c: float, a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(mat=c * a.mat + (1.0 - c) * b.mat)


def _sign(value: float) -> str:
    if abs(value) <= 1e-12:
        return "zero"
    return "positive" if value > 0 else "negative"


def _cp_verdict(s: KrausChannel, c: float) -> Tuple[Optional[bool], Optional[float]]:
    """cp verdict of the erasure decomposition at weight c (None when undefined)."""
    if s.dim_in != s.dim_out or c >= 1.0:
        return None, None
    decomposition = channel_service.decompose_erasure(s, c)
    return decomposition.cp_verdict, decomposition.min_eigenvalue


class InequalityService:
    """Single-instance inequality checks."""

    @classmethod
    def check_lindblad(
        cls, s: KrausChannel, r1: DensityMatrix, r2: DensityMatrix, tol: Optional[float] = None, instance=None
    ) -> InequalityReport:
        """S(r1 || r2) >= S(S r1 || S r2)"""
        greater = state_service.relative_entropy(r1, r2)
        lesser = state_service.relative_entropy(channel_service.apply(s, r1), channel_service.apply(s, r2))
        return build_report(Inequality.LINDBLAD, greater, lesser, tol, instance)

    @classmethod
    def check_joint_convexity(
        cls,
        c: float,
        r1: DensityMatrix,
        s1: DensityMatrix,
        r2: DensityMatrix,
        s2: DensityMatrix,
        tol: Optional[float] = None,
        instance=None,
    ) -> InequalityReport:
        """S(c r1 + (1-c) s1 || c r2 + (1-c) s2) <= c S(r1 || r2) + (1-c) S(s1 || s2)"""
        channel_service._check_unit_interval("mixing weight c", c)
        if len({r1.dim, s1.dim, r2.dim, s2.dim}) != 1:
            raise DimensionError("joint convexity needs four states of one dimension")
        greater = add(
            scale(c, state_service.relative_entropy(r1, r2)),
            scale(1.0 - c, state_service.relative_entropy(s1, s2)),
        )
        lesser = state_service.relative_entropy(_mixture(c, r1, s1), _mixture(c, r2, s2))
        return build_report(
            Inequality.JOINT_CONVEXITY, greater, lesser, tol, instance, {"c": c}
        )

    @classmethod
    def check_dpi(
        cls, e: Ensemble, s1: KrausChannel, s2: KrausChannel, tol: Optional[float] = None, instance=None
    ) -> InequalityReport:
        """I(rho; S1) >= I(rho; S2 S1)"""
        first = measure_service.coherent_information(e, s1).mutual_info
        composed = measure_service.coherent_information(e, channel_service.compose(s2, s1)).mutual_info
        return build_report(Inequality.DPI, first, composed, tol, instance)

    @classmethod
    def check_channel_convexity(
        cls,
        e: Ensemble,
        c: float,
        s1: KrausChannel,
        s2: KrausChannel,
        tol: Optional[float] = None,
        instance=None,
    ) -> InequalityReport:
        """I(rho; c S1 + (1-c) S2) <= c I(rho; S1) + (1-c) I(rho; S2)"""
        mixed = measure_service.coherent_information(e, channel_service.mix(c, s1, s2)).mutual_info
        greater = (
            c * measure_service.coherent_information(e, s1).mutual_info
            + (1.0 - c) * measure_service.coherent_information(e, s2).mutual_info
        )
        return build_report(
            Inequality.CHANNEL_CONVEXITY, greater, mixed, tol, instance, {"c": c}
        )

    @classmethod
    def check_strengthened_lindblad(
        cls,
        s: KrausChannel,
        r1: DensityMatrix,
        r2: DensityMatrix,
        budget: Optional[OptimizerSettings] = None,
        tol: Optional[float] = None,
        instance=None,
    ) -> InequalityReport:
        """(1 - c(S)) S(r1 || r2) >= S(S r1 || S r2)"""
        c = measure_service.c_of_channel(s, budget).value
        cp_verdict, min_eigenvalue = _cp_verdict(s, c)
        greater = scale(1.0 - c, state_service.relative_entropy(r1, r2))
        lesser = state_service.relative_entropy(channel_service.apply(s, r1), channel_service.apply(s, r2))
        auxiliary = {"c": c, "cp_verdict": cp_verdict, "choi_min_eigenvalue": min_eigenvalue}
        return build_report(
            Inequality.STRENGTHENED_LINDBLAD, greater, lesser, tol, instance, auxiliary
        )

    @classmethod
    def check_strengthened_dpi(
        cls,
        e: Ensemble,
        s1: KrausChannel,
        s2: KrausChannel,
        budget: Optional[OptimizerSettings] = None,
        tol: Optional[float] = None,
        instance=None,
    ) -> InequalityReport:
        """(1 - c(S2)) I(rho; S1) >= I(rho; S2 S1)"""
        c = measure_service.c_of_channel(s2, budget).value
        cp_verdict, min_eigenvalue = _cp_verdict(s2, c)
        first = measure_service.coherent_information(e, s1).mutual_info
        composed = measure_service.coherent_information(e, channel_service.compose(s2, s1)).mutual_info
        auxiliary = {
            "c": c,
            "sign": _sign(first),
            "coherent_info_s1": first,
            "cp_verdict": cp_verdict,
            "choi_min_eigenvalue": min_eigenvalue,
        }
        return build_report(
            Inequality.STRENGTHENED_DPI,
            (1.0 - c) * first,
            composed,
            tol,
            instance,
            auxiliary,
        )

    @classmethod
    def check_relative_entropy_identity(
        cls, e: Ensemble, s: KrausChannel, tol: Optional[float] = None, instance=None
    ) -> InequalityReport:
        """Equality check: slack is -|lhs - rhs|; an infinite lhs is a mismatch."""
        tol = default_tolerance(Inequality.RELATIVE_ENTROPY_IDENTITY) if tol is None else tol
        identity = measure_service.relative_entropy_identity(e, s)
        if is_infinite(identity.lhs):
            return InequalityReport(
                name=Inequality.RELATIVE_ENTROPY_IDENTITY.value,
                lhs=identity.lhs,
                rhs=identity.rhs,
                slack=NEG_INFINITE,
                satisfied=False,
                tolerance=tol,
                instance=instance or {},
                auxiliary={"mismatch": True},
            )
        return build_report(
            Inequality.RELATIVE_ENTROPY_IDENTITY,
            -identity.difference,
            0.0,
            tol,
            instance,
            {"lhs": identity.lhs, "rhs": identity.rhs},
        ).model_copy(update={"lhs": identity.lhs, "rhs": identity.rhs})

    @classmethod
    def check_weyl(cls, a: np.ndarray, b: np.ndarray, tol: Optional[float] = None, instance=None) -> InequalityReport:
        """Weyl interval containment; slack is the smallest margin over k."""
        bounds = measure_service.weyl_bounds(a, b)
        margin = min(min(bound.value - bound.lower, bound.upper - bound.value) for bound in bounds)
        auxiliary = {"violations": sum(bound.violated for bound in bounds), "dim": len(bounds)}
        return build_report(Inequality.WEYL, margin, 0.0, tol, instance, auxiliary)

    @classmethod
    def check_mixture_spectrum(
        cls, sigma: DensityMatrix, c: float, tol: Optional[float] = None, instance=None
    ) -> InequalityReport:
        """Spectrum of sigma (1 - c) inside the intervals derived from rho' = c|0><0| + (1 - c) sigma."""
        erased = np.zeros((sigma.dim, sigma.dim), dtype=np.complex128)
        erased[0, 0] = 1.0
        rho_prime = DensityMatrix(mat=c * erased + (1.0 - c) * sigma.mat)
        intervals = measure_service.mixture_spectrum_bounds(rho_prime, c)
        scaled = (1.0 - c) * linalg.eigvalsh(sigma.mat)
        margin = min(min(value - iv.lower, iv.upper - value) for value, iv in zip(scaled, intervals))
        return build_report(Inequality.MIXTURE_SPECTRUM, margin, 0.0, tol, instance, {"c": c})


def _random_ensemble(rng: np.random.Generator, d: int) -> Ensemble:
    n = int(rng.integers(2, 4))
    probs = sampling.random_simplex(rng, n)
    states = np.stack([sampling.haar_vector(rng, d) for _ in range(n)])
    return Ensemble(probs=tuple(float(p) for p in probs), states=states)


def _random_channel(rng: np.random.Generator, d: int) -> Tuple[KrausChannel, Dict[str, int]]:
    kraus_count = int(rng.integers(1, 4))
    channel_seed = int(rng.integers(0, 2**31 - 1))
    channel = channel_service.random_channel(d, d, kraus_count, channel_seed)
    return channel, {"kraus_count": kraus_count, "seed": channel_seed}


def _random_state(rng: np.random.Generator, d: int) -> DensityMatrix:
    return DensityMatrix(mat=sampling.random_density(rng, d))


def run_trial(
    inequality: Inequality,
    seed: int,
    trial: int,
    dims: Sequence[int],
    tol: Optional[float] = None,
    budget: Optional[OptimizerSettings] = None,
) -> InequalityReport:
    """
    Generate and check instance ``trial`` of a campaign.

    The instance is a pure function of (inequality, seed, trial, dims); the
    strengthened checks also record the optimizer budget, so the
    report's descriptor replays it exactly.
    """
    rng = sampling.rng_for(seed, trial)
    d = int(dims[int(rng.integers(len(dims)))])
    instance: Dict[str, Any] = {"seed": seed, "trial": trial, "instance_seed": seed + trial, "dims": list(dims), "dim": d}
    tol = default_tolerance(inequality) if tol is None else tol
    budget = budget or OptimizerSettings()

    if inequality is Inequality.LINDBLAD:
        s, meta = _random_channel(rng, d)
        instance["channel"] = meta
        return InequalityService.check_lindblad(s, _random_state(rng, d), _random_state(rng, d), tol, instance)

    if inequality is Inequality.JOINT_CONVEXITY:
        c = float(rng.uniform())
        instance["c"] = c
        states = [_random_state(rng, d) for _ in range(4)]
        return InequalityService.check_joint_convexity(c, *states, tol=tol, instance=instance)

    if inequality is Inequality.DPI:
        e = _random_ensemble(rng, d)
        s1, meta1 = _random_channel(rng, d)
        s2, meta2 = _random_channel(rng, d)
        instance.update({"ensemble_size": e.size, "channel1": meta1, "channel2": meta2})
        return InequalityService.check_dpi(e, s1, s2, tol, instance)

    if inequality is Inequality.CHANNEL_CONVEXITY:
        e = _random_ensemble(rng, d)
        c = float(rng.uniform())
        s1, meta1 = _random_channel(rng, d)
        s2, meta2 = _random_channel(rng, d)
        instance.update({"ensemble_size": e.size, "c": c, "channel1": meta1, "channel2": meta2})
        return InequalityService.check_channel_convexity(e, c, s1, s2, tol, instance)

    if inequality is Inequality.STRENGTHENED_LINDBLAD:
        s, meta = _random_channel(rng, d)
        instance.update({"channel": meta, "budget": budget.model_dump()})
        return InequalityService.check_strengthened_lindblad(
            s, _random_state(rng, d), _random_state(rng, d), budget, tol, instance
        )

    if inequality is Inequality.STRENGTHENED_DPI:
        e = _random_ensemble(rng, d)
        s1, meta1 = _random_channel(rng, d)
        s2, meta2 = _random_channel(rng, d)
        instance.update(
            {"ensemble_size": e.size, "channel1": meta1, "channel2": meta2, "budget": budget.model_dump()}
        )
        return InequalityService.check_strengthened_dpi(e, s1, s2, budget, tol, instance)

    if inequality is Inequality.RELATIVE_ENTROPY_IDENTITY:
        e = _random_ensemble(rng, d)
        s, meta = _random_channel(rng, d)
        instance.update({"ensemble_size": e.size, "channel": meta})
        return InequalityService.check_relative_entropy_identity(e, s, tol, instance)

    if inequality is Inequality.WEYL:
        a = sampling.random_hermitian(rng, d)
        b = sampling.random_hermitian(rng, d)
        return InequalityService.check_weyl(a, b, tol, instance)

    if inequality is Inequality.MIXTURE_SPECTRUM:
        c = float(rng.uniform(0.0, 0.999))
        instance["c"] = c
        return InequalityService.check_mixture_spectrum(_random_state(rng, d), c, tol, instance)

    raise UnknownInequalityError(f"no instance generator for '{inequality.value}'")


def _stratum_key(report: InequalityReport) -> Optional[str]:
    parts = []
    if "sign" in report.auxiliary:
        parts.append(f"sign={report.auxiliary['sign']}")
    if "cp_verdict" in report.auxiliary:
        verdict = report.auxiliary["cp_verdict"]
        parts.append(f"cp={'na' if verdict is None else str(verdict).lower()}")
    return "|".join(parts) or None


def summarize(inequality: Inequality, reports: Sequence[InequalityReport]) -> FuzzSummary:
    """Aggregate reports; indeterminate instances are left out of the slack statistics."""
    slacks = [r.slack for r in reports if not r.indeterminate and r.slack is not None]
    finite = np.array([s for s in slacks if not is_infinite(s)], dtype=np.float64)

    worst: Optional[ExtendedReal] = None
    if any(is_infinite(s) and s.sign < 0 for s in slacks):
        worst = NEG_INFINITE
    elif finite.size:
        worst = float(finite.min())
    elif slacks:
        worst = INFINITE

    quantiles: Dict[str, float] = {}
    if finite.size:
        for label, q in (("min", 0.0), ("p05", 0.05), ("p25", 0.25), ("p50", 0.5), ("p75", 0.75), ("p95", 0.95), ("max", 1.0)):
            quantiles[label] = float(np.quantile(finite, q))

    strata: Dict[str, StratumCounts] = {}
    for report in reports:
        key = _stratum_key(report)
        if key is None:
            continue
        counts = strata.setdefault(key, StratumCounts())
        counts.trials += 1
        counts.violations += int(not report.satisfied)

    return FuzzSummary(
        inequality=inequality.value,
        trials=len(reports),
        violations=sum(not r.satisfied for r in reports),
        indeterminate=sum(r.indeterminate for r in reports),
        worst_slack=worst,
        slack_quantiles=quantiles,
        violating_seeds=[r.instance.get("instance_seed") for r in reports if not r.satisfied],
        strata=dict(sorted(strata.items())),
    )


def fuzz(
    campaign: FuzzSettings,
    budget: Optional[OptimizerSettings] = None,
    on_report: Optional[Callable[[InequalityReport], None]] = None,
) -> Tuple[FuzzSummary, List[InequalityReport]]:
    """
    Run a seeded fuzz campaign; reports come back in trial order.

    Args:
        campaign: inequality, trial count, dimensions, seed and tolerance
        budget: c(S) optimizer budget for the strengthened checks
        on_report: optional callback receiving each report as it is produced

    Returns:
        (FuzzSummary, reports)
    """
    inequality = resolve_inequality(campaign.inequality)
    logger.info(
        "Starting fuzz campaign", inequality=inequality.value, trials=campaign.trials, dims=list(campaign.dims), seed=campaign.seed
    )
    reports: List[InequalityReport] = []
    for trial in range(campaign.trials):
        report = run_trial(inequality, campaign.seed, trial, campaign.dims, campaign.tol, budget)
        if not report.satisfied:
            logger.info("Inequality violated", inequality=inequality.value, trial=trial, slack=str(report.slack))
        reports.append(report)
        if on_report is not None:
            on_report(report)

    summary = summarize(inequality, reports)
    logger.info(
        "Fuzz campaign completed", inequality=inequality.value, trials=summary.trials, violations=summary.violations
    )
    return summary, reports


def replay(
    name: Union[str, Inequality],
    seed: int,
    trial: int,
    dims: Sequence[int],
    tol: Optional[float] = None,
    budget: Optional[OptimizerSettings] = None,
) -> InequalityReport:
    """Re-run one fuzz trial from its instance descriptor."""
    return run_trial(resolve_inequality(name), seed, trial, dims, tol, budget)


def replay_instance(
    name: Union[str, Inequality], instance: Dict[str, Any], tol: Optional[float] = None
) -> InequalityReport:
    """
    Re-run the trial a report's ``instance`` descriptor came from.

    The optimizer budget recorded by the strengthened checks is restored, so
    lhs and rhs come back bit-identical.
    """
    try:
        seed, trial, dims = int(instance["seed"]), int(instance["trial"]), tuple(int(d) for d in instance["dims"])
        budget = OptimizerSettings(**instance["budget"]) if "budget" in instance else None
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise InvalidInputError(f"instance descriptor cannot be replayed: {e}") from None
    return run_trial(resolve_inequality(name), seed, trial, dims, tol, budget)


# Convenience functions
check_lindblad = InequalityService.check_lindblad
check_joint_convexity = InequalityService.check_joint_convexity
check_dpi = InequalityService.check_dpi
check_channel_convexity = InequalityService.check_channel_convexity
check_strengthened_lindblad = InequalityService.check_strengthened_lindblad
check_strengthened_dpi = InequalityService.check_strengthened_dpi
check_relative_entropy_identity = InequalityService.check_relative_entropy_identity
check_weyl = InequalityService.check_weyl
check_mixture_spectrum = InequalityService.check_mixture_spectrum


def _require(inequality: Inequality, **inputs: Any) -> None:
    missing = [name for name, value in inputs.items() if value is None]
    if missing:
        raise InvalidInputError(f"check {inequality.value} needs: {', '.join(missing)}")


def run_check(
    name: Union[str, Inequality],
    *,
    channel: Optional[KrausChannel] = None,
    channel1: Optional[KrausChannel] = None,
    channel2: Optional[KrausChannel] = None,
    state1: Optional[DensityMatrix] = None,
    state2: Optional[DensityMatrix] = None,
    sigma1: Optional[DensityMatrix] = None,
    sigma2: Optional[DensityMatrix] = None,
    ensemble: Optional[Ensemble] = None,
    c: Optional[float] = None,
    tol: Optional[float] = None,
    budget: Optional[OptimizerSettings] = None,
) -> InequalityReport:
    """Dispatch one named check to its checker with the inputs it needs."""
    inequality = resolve_inequality(name)
    weight = 0.5 if c is None else c

    if inequality is Inequality.LINDBLAD:
        _require(inequality, channel=channel, state1=state1, state2=state2)
        return check_lindblad(channel, state1, state2, tol)
    if inequality is Inequality.JOINT_CONVEXITY:
        _require(inequality, state1=state1, sigma1=sigma1, state2=state2, sigma2=sigma2)
        return check_joint_convexity(weight, state1, sigma1, state2, sigma2, tol)
    if inequality is Inequality.DPI:
        _require(inequality, ensemble=ensemble, channel1=channel1, channel2=channel2)
        return check_dpi(ensemble, channel1, channel2, tol)
    if inequality is Inequality.CHANNEL_CONVEXITY:
        _require(inequality, ensemble=ensemble, channel1=channel1, channel2=channel2)
        return check_channel_convexity(ensemble, weight, channel1, channel2, tol)
    if inequality is Inequality.STRENGTHENED_LINDBLAD:
        _require(inequality, channel=channel, state1=state1, state2=state2)
        return check_strengthened_lindblad(channel, state1, state2, budget, tol)
    if inequality is Inequality.STRENGTHENED_DPI:
        _require(inequality, ensemble=ensemble, channel1=channel1, channel2=channel2)
        return check_strengthened_dpi(ensemble, channel1, channel2, budget, tol)
    if inequality is Inequality.RELATIVE_ENTROPY_IDENTITY:
        _require(inequality, ensemble=ensemble, channel=channel)
        return check_relative_entropy_identity(ensemble, channel, tol)
    if inequality is Inequality.WEYL:
        _require(inequality, state1=state1, state2=state2)
        return check_weyl(state1.mat, state2.mat, tol)
    _require(inequality, sigma1=sigma1)
    return check_mixture_spectrum(sigma1, 0.0 if c is None else c, tol)
