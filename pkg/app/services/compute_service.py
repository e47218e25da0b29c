"""
Compute Service - single-quantity computations and the two-Pauli c(S) sweep,
shared by the CLI and the HTTP routers.
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import structlog

from app.config import settings
from app.errors import InvalidInputError, QDPIError
from app.schemas.quantum import DensityMatrix, Ensemble, ExtendedReal, KrausChannel
from app.schemas.reports import OptimizerSettings, SweepRow
from app.services import channel_service, measure_service, state_service

logger = structlog.get_logger()


class Quantity(str, Enum):
    ENTROPY = "entropy"
    RELENT = "relent"
    COHERENT = "coherent"
    CCONST = "cconst"


def resolve_quantity(name: Union[str, Quantity]) -> Quantity:
    try:
        return Quantity(name)
    except ValueError:
        raise InvalidInputError(
            f"unknown quantity '{name}'; expected one of: {', '.join(q.value for q in Quantity)}"
        )


def _missing(quantity: Quantity, **inputs: Any) -> None:
    absent = [name for name, value in inputs.items() if value is None]
    if absent:
        raise InvalidInputError(f"compute {quantity.value} needs: {', '.join(absent)}")


def _complex_pairs(vector: np.ndarray) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in vector]


class ComputeService:
    """Entropies, relative entropies, coherent information and c(S)."""

    @classmethod
    def compute(
        cls,
        quantity: Union[str, Quantity],
        state: Optional[DensityMatrix] = None,
        state2: Optional[DensityMatrix] = None,
        ensemble: Optional[Ensemble] = None,
        channel: Optional[KrausChannel] = None,
        budget: Optional[OptimizerSettings] = None,
    ) -> Tuple[ExtendedReal, Dict[str, Any]]:
        """
        Compute one quantity in bits.

        Returns:
            (value, details); relent may be INFINITE
        """
        quantity = resolve_quantity(quantity)

        if quantity is Quantity.ENTROPY:
            _missing(quantity, state=state)
            return state_service.von_neumann_entropy(state), {"dim": state.dim}

        if quantity is Quantity.RELENT:
            _missing(quantity, state=state, state2=state2)
            return state_service.relative_entropy(state, state2), {"dim": state.dim}

        if quantity is Quantity.COHERENT:
            _missing(quantity, ensemble=ensemble, channel=channel)
            result = measure_service.coherent_information(ensemble, channel)
            return result.mutual_info, {
                "output_entropy": result.output_entropy,
                "entropy_exchange": result.entropy_exchange,
                "ensemble_size": ensemble.size,
            }

        _missing(quantity, channel=channel)
        constant = measure_service.c_of_channel(channel, budget)
        return constant.value, {
            "witness": _complex_pairs(constant.witness),
            "strategy": constant.method.strategy,
            "evaluations": constant.method.evaluations,
            "budget": constant.method.budget.model_dump(),
        }

    @classmethod
    def sweep_two_pauli(
        cls,
        start: float = 0.0,
        end: float = 1.0,
        steps: int = 11,
        budget: Optional[OptimizerSettings] = None,
    ) -> List[SweepRow]:
        """
        c(S) of the two-Pauli channel on an even x-grid, next to both closed forms.

        Args:
            start, end: grid endpoints, 0 <= start <= end <= 1
            steps: number of grid points (>= 2)
            budget: optimizer budget for c_numeric

        Returns:
            One SweepRow per grid point; agrees compares c_numeric with the
            (1 - |2x - 1|)/2 closed form at the agreement tolerance
        """
        if not 0.0 <= start <= end <= 1.0:
            raise InvalidInputError(f"sweep needs 0 <= start <= end <= 1, got start={start}, end={end}")
        if steps < 2:
            raise InvalidInputError(f"sweep needs at least 2 steps, got {steps}")

        logger.info("Starting two-Pauli sweep", start=start, end=end, steps=steps)
        rows: List[SweepRow] = []
        try:
            for x in np.linspace(start, end, steps):
                x = float(min(max(x, 0.0), 1.0))
                numeric = measure_service.c_of_channel(channel_service.two_pauli(x), budget).value
                closed_form = measure_service.c_two_pauli_closed_form(x)
                diff = abs(numeric - closed_form)
                rows.append(
                    SweepRow(
                        x=x,
                        c_numeric=numeric,
                        c_eq27=closed_form,
                        c_bloch=measure_service.c_two_pauli_bloch(x),
                        abs_diff=diff,
                        agrees=diff <= settings.agreement_tol,
                    )
                )
        except QDPIError:
            raise
        except Exception as e:
            logger.error("Two-Pauli sweep failed", error=str(e))
            raise

        logger.info("Two-Pauli sweep completed", rows=len(rows), agreeing=sum(row.agrees for row in rows))
        return rows


# Convenience functions
compute = ComputeService.compute
sweep_two_pauli = ComputeService.sweep_two_pauli
