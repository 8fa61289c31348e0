"""Model parameters and the built-in ``para1`` preset."""

from __future__ import annotations

from dataclasses import dataclass, replace

from evasion.kinetics import (
    FunctionalResponseSpec,
    GrowthSpec,
    KineticsSpec,
    ModelVariant,
    ResponseFamily,
    SignalLaw,
    SignalProductionSpec,
)

# r, alpha, beta, c, a, delta, mu, gamma, d_p, d_w of the nondimensional
# Rosenzweig-MacArthur extension
PARA1 = {
    "r": 0.25,
    "alpha": 0.5,
    "beta": 2.0,
    "c": 0.85,
    "a": 0.95,
    "delta": 0.17,
    "mu": 0.5,
    "gamma": 10.0,
    "d_p": 0.01,
    "d_w": 0.01,
}


@dataclass(frozen=True)
class ModelParams:
    """Kinetics plus transport coefficients.

    Diffusivities are ``(D1, D2, D3)`` for prey, predator and signal; the
    nondimensional models use ``D1 = 1``, ``D2 = d_p``, ``D3 = d_w``.
    """

    kinetics: KineticsSpec
    variant: ModelVariant = ModelVariant.B
    chi: float = 0.0
    xi: float = 0.0
    D: tuple[float, float, float] = (1.0, 0.01, 0.01)
    L: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variant", ModelVariant(self.variant))
        object.__setattr__(self, "D", tuple(float(x) for x in self.D))
        if len(self.D) != 3 or min(self.D) <= 0:
            raise ValueError("three positive diffusivities are required")
        if self.chi < 0 or self.xi < 0:
            raise ValueError("taxis coefficients must be nonnegative")
        if self.L <= 0:
            raise ValueError("domain length must be positive")
        if self.variant is not ModelVariant.A and self.xi != 0:
            raise ValueError(f"model {self.variant.value} has no prey-taxis; xi must be 0")
        if self.variant is ModelVariant.B2 and self.kinetics.eta <= 0:
            raise ValueError("model B2 requires eta > 0")

    @property
    def eta(self) -> float:
        """Predator competition actually active in this variant."""
        return self.kinetics.eta if self.variant is ModelVariant.B2 else 0.0

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def rm_kinetics(
    r: float,
    a: float,
    beta: float,
    c: float,
    delta: float,
    mu: float,
    gamma: float,
    alpha: float = 0.0,
    eta: float = 0.0,
    family: ResponseFamily | str | None = None,
    K: float = 1.0,
) -> KineticsSpec:
    """Kinetics of the nondimensional model written with ``a`` and ``c``.

    The predator gain ``c N P / (1 + beta N + alpha P)`` is expressed as
    ``conversion * P * F`` with ``conversion = c / a``.
    """
    if family is None:
        family = ResponseFamily.HOLLING_II if alpha == 0 else ResponseFamily.BEDDINGTON_DEANGELIS
    return KineticsSpec(
        growth=GrowthSpec(r=r, K=K),
        response=FunctionalResponseSpec(family=family, a=a, beta=beta, alpha=alpha),
        signal=SignalProductionSpec(law=SignalLaw.ODOR, gamma=gamma),
        conversion=c / a,
        delta=delta,
        mu=mu,
        eta=eta,
    )


def para1(
    variant: ModelVariant | str = ModelVariant.B,
    chi: float = 0.0,
    xi: float = 0.0,
    L: float = 1.0,
    family: ResponseFamily | str = ResponseFamily.HOLLING_II,
    eta: float = 0.0,
) -> ModelParams:
    """The reference parameter set.

    With the default Holling II response the interference ``alpha = 0.5``
    is carried but inactive; pass ``family="BeddingtonDeAngelis"`` to use it.
    """
    p = PARA1
    kin = rm_kinetics(
        r=p["r"],
        a=p["a"],
        beta=p["beta"],
        c=p["c"],
        delta=p["delta"],
        mu=p["mu"],
        gamma=p["gamma"],
        alpha=p["alpha"],
        eta=eta,
        family=family,
    )
    return ModelParams(
        kinetics=kin,
        variant=variant,
        chi=chi,
        xi=xi,
        D=(1.0, p["d_p"], p["d_w"]),
        L=L,
    )
