"""Sample-complexity and solvability calculators.

The trajectory bound mixes logarithm bases: the leading factor uses the
natural log of the largest domain size while the confidence term is a
base-2 log. Swapping either one is an easy mistake that changes results by
a constant factor.

Everything is evaluated in binary multi-precision arithmetic so that the
ceiling taken to obtain an integer trajectory count is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .errors import ValidationError

_PREC_BITS = 256


@dataclass(frozen=True)
class PacParams:
    d: int
    num_actions: int
    num_vars: int
    epsilon: float
    delta: float

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("d must be at least 2")
        if self.num_actions < 1 or self.num_vars < 1:
            raise ValidationError("num_actions and num_vars must be positive")
        if not 0 < self.epsilon <= 1:
            raise ValidationError("epsilon must lie in (0, 1]")
        if not 0 < self.delta < 1:
            raise ValidationError("delta must lie in (0, 1)")


def sample_complexity_real(p: PacParams) -> mpmath.mpf:
    """(2 ln d) |A| / eps * (|X| + log2(2|A| / delta)), unrounded."""
    with mpmath.workprec(_PREC_BITS):
        a = mpmath.mpf(p.num_actions)
        numerator = 2 * mpmath.log(p.d) * a * (p.num_vars + mpmath.log(2 * a / mpmath.mpf(p.delta), 2))
        # dividing last keeps eps a pure divisor, so halving eps exactly doubles the result
        return numerator / mpmath.mpf(p.epsilon)


def sample_complexity(p: PacParams) -> int:
    """Least integer number of trajectories meeting the bound."""
    with mpmath.workprec(_PREC_BITS):
        return int(mpmath.ceil(sample_complexity_real(p)))


@dataclass(frozen=True)
class SolvabilityTable:
    """Joint behaviour of solvability S and planner success P.

    ``p_plan_given_solvable`` etc. are the conditional cells; the marginals
    follow from the prior ``mu``.
    """

    mu: float
    epsilon: float
    p_plan_given_solvable: float
    p_noplan_given_solvable: float
    p_plan_given_unsolvable: float
    p_noplan_given_unsolvable: float
    p_plan: float
    p_noplan: float

    def rows(self) -> list[tuple[str, float, float, float]]:
        return [
            ("solvable", self.p_plan_given_solvable, self.p_noplan_given_solvable, self.mu),
            ("unsolvable", self.p_plan_given_unsolvable, self.p_noplan_given_unsolvable, 1 - self.mu),
            ("marginal", self.p_plan, self.p_noplan, 1.0),
        ]


def _unit(name: str, x: float) -> None:
    if not 0 <= x <= 1:
        raise ValidationError(f"{name} must lie in [0, 1], got {x}")


def solvability_table(mu: float, epsilon: float) -> SolvabilityTable:
    _unit("mu", mu)
    _unit("epsilon", epsilon)
    p_plan = mu * (1 - epsilon)
    return SolvabilityTable(
        mu=mu,
        epsilon=epsilon,
        p_plan_given_solvable=1 - epsilon,
        p_noplan_given_solvable=epsilon,
        p_plan_given_unsolvable=0.0,
        p_noplan_given_unsolvable=1.0,
        p_plan=p_plan,
        p_noplan=1 - p_plan,
    )


def false_no_plan_rate(epsilon: float, mu: float) -> float:
    """P(solvable | no plan returned) = eps*mu / (1 - (1-eps)*mu)."""
    with mpmath.workprec(_PREC_BITS):
        e, m = mpmath.mpf(epsilon), mpmath.mpf(mu)
        denom = 1 - (1 - e) * m
        if denom == 0:
            raise ValidationError("no-plan answers have probability zero when mu = 1 and epsilon = 0")
        return float(e * m / denom)


def epsilon_for_gamma(gamma: float, mu: float, tight: bool = True) -> float:
    """Largest epsilon keeping P(solvable | no plan) at or below ``gamma``.

    Solving eps*mu / (1 - (1-eps)*mu) <= gamma for eps gives
    gamma*(1-mu) / (mu*(1-gamma)). With ``tight=False`` the smaller value
    gamma*(1-mu) / (mu*(1+gamma)) is returned instead; it also satisfies the
    constraint, with slack. Results above 1 mean any epsilon works.
    """
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    if not 0 <= mu <= 1:
        raise ValidationError("mu must lie in [0, 1]")
    if mu == 0:
        raise ValidationError("epsilon is unconstrained when mu = 0 (division by zero)")
    if tight and gamma >= 1:
        return float("inf")
    with mpmath.workprec(_PREC_BITS):
        g, m = mpmath.mpf(gamma), mpmath.mpf(mu)
        scale = (1 - g) if tight else (1 + g)
        return float(g * (1 - m) / (m * scale))


def sample_complexity_for_gamma(
    gamma: float, mu: float, d: int, num_actions: int, num_vars: int, delta: float
) -> int:
    """Trajectories needed to bound wrong "no plan" answers by ``gamma``."""
    eps = min(1.0, epsilon_for_gamma(gamma, mu))
    if eps <= 0:
        raise ValidationError("mu = 1 forces epsilon = 0; no finite trajectory count suffices")
    return sample_complexity(PacParams(d, num_actions, num_vars, eps, delta))
