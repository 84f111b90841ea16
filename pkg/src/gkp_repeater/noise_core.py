"""Finite-squeezing GKP noise model and the loss/amplification variance algebra.

Conventions: hbar = 1, vacuum variance 1/2 per quadrature, GKP lattice spacing
sqrt(pi). A finitely squeezed GKP state is summarized by the Gaussian variance
sigma^2 of each grid tooth; the squeezing level in dB is -10*log10(2*sigma^2),
so 0 dB corresponds to vacuum-width teeth (sigma^2 = 1/2).

All channel maps below act on per-quadrature displacement variances only.
There is no wavefunction or Fock-space object anywhere in this package: loss,
amplification and error correction are bookkept as affine maps on variances
plus mod-sqrt(pi) binning of Gaussian displacements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy import special

SQRT_PI = math.sqrt(math.pi)

#: Fiber attenuation length in km (transmittance eta = exp(-L/L_att)).
DEFAULT_ATTENUATION_KM = 22.0


class AmplifierMode(str, Enum):
    """How channel loss is converted into additive Gaussian displacement noise.

    The combined loss + amplification channel adds, per quadrature:

    ==========  =====================  ==========================================
    mode        added variance         amplifier placement
    ==========  =====================  ==========================================
    POST        (1-eta)/eta            phase-insensitive amplifier after loss
    PRE         1-eta                  phase-insensitive amplifier before loss
    CC_PAIR     (1-eta)/(2*eta)        homodyne-outcome rescaling by 1/eta,
                                       noise split over both modes of an EPR
                                       measurement
    CC_SINGLE   (1-eta)/eta            same rescaling with both modes' noise
                                       pushed onto a single input
    ==========  =====================  ==========================================
    """

    POST = "post"
    PRE = "pre"
    CC_PAIR = "cc_pair"
    CC_SINGLE = "cc_single"


@dataclass(frozen=True)
class QuadVariance:
    """Per-quadrature displacement variances of a GKP tooth.

    Attributes:
        sq: variance of the position-quadrature displacement (dimensionless).
        sp: variance of the momentum-quadrature displacement (dimensionless).
    """

    sq: float
    sp: float

    def __post_init__(self) -> None:
        for name, value in (("sq", self.sq), ("sp", self.sp)):
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")

    @classmethod
    def symmetric(cls, variance: float) -> "QuadVariance":
        """Equal variance in both quadratures."""
        return cls(variance, variance)

    def add(self, extra: float) -> "QuadVariance":
        """Add the same variance to both quadratures."""
        return QuadVariance(self.sq + extra, self.sp + extra)


@dataclass(frozen=True)
class ChannelParam:
    """Loss-channel parameters.

    eta is the transmittance efficiency (the beamsplitter coupling to the
    vacuum environment transmits amplitude sqrt(eta)); latt_km is the fiber
    attenuation length relating eta to distance.
    """

    eta: float
    latt_km: float = DEFAULT_ATTENUATION_KM

    def __post_init__(self) -> None:
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if self.latt_km <= 0:
            raise ValueError(f"latt_km must be positive, got {self.latt_km}")

    @classmethod
    def from_distance(cls, l_km: float, latt_km: float = DEFAULT_ATTENUATION_KM) -> "ChannelParam":
        return cls(eta_from_distance(l_km, latt_km), latt_km)


@dataclass(frozen=True)
class SqueezingSpec:
    """Squeezing level of the GKP teeth, kept in both dB and variance form.

    The two fields are redundant on purpose (sweep configs are written in dB,
    the math runs on sigma2) and must satisfy db = -10*log10(2*sigma2).
    sigma2 = 0 (db = inf) is the ideal infinite-squeezing limit.
    """

    db: float
    sigma2: float

    def __post_init__(self) -> None:
        if self.sigma2 < 0:
            raise ValueError(f"sigma2 must be nonnegative, got {self.sigma2}")
        expected = squeezing_db_to_sigma2(self.db)
        if abs(expected - self.sigma2) > 1e-12 * max(expected, self.sigma2):
            raise ValueError(
                f"inconsistent squeezing: {self.db} dB implies sigma2={expected!r}, "
                f"got {self.sigma2!r}"
            )

    @classmethod
    def from_db(cls, db: float) -> "SqueezingSpec":
        return cls(db, squeezing_db_to_sigma2(db))

    @classmethod
    def from_sigma2(cls, sigma2: float) -> "SqueezingSpec":
        return cls(sigma2_to_db(sigma2), sigma2)


def pfail(sigma2: float) -> float:
    """Probability of misidentifying the bit value of a GKP qubit.

    This is the mass of a centered Gaussian of variance sigma2 lying outside
    the central bin [-sqrt(pi)/2, +sqrt(pi)/2]:

        pfail = 1 - integral_{-sqrt(pi)/2}^{+sqrt(pi)/2} N(0, sigma2)
              = erfc( sqrt(pi) / (2 * sqrt(2 * sigma2)) )

    Evaluated through erfc, which is accurate to well below 1e-14 absolutely,
    so error rates down to the 1e-12 scale relevant at 15 dB squeezing are not
    dominated by integration error. Note this single-interval form counts any
    excursion past the first bin boundary as an error; the mod-sqrt(pi)
    lattice-sum variant (which credits displacements landing in a farther
    even bin) lives in :mod:`gkp_repeater.hrm`. The two agree to double
    precision for small variance and diverge for sigma2 approaching 1/2.
    """
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")
    if sigma2 == 0:
        return 0.0
    p = float(special.erfc(SQRT_PI / (2.0 * math.sqrt(2.0 * sigma2))))
    return min(1.0, max(0.0, p))


def eta_from_distance(l_km: float, latt_km: float = DEFAULT_ATTENUATION_KM) -> float:
    """Transmittance of a fiber of length l_km: eta = exp(-l_km / latt_km)."""
    if l_km < 0:
        raise ValueError(f"l_km must be nonnegative, got {l_km}")
    if latt_km <= 0:
        raise ValueError(f"latt_km must be positive, got {latt_km}")
    return math.exp(-l_km / latt_km)


def apply_loss(v: QuadVariance, eta: float) -> QuadVariance:
    """Variance map of the pure-loss channel.

    A beamsplitter of transmittance eta mixes in vacuum (variance 1/2), so
    each quadrature variance transforms as x -> eta*x + (1-eta)/2. Vacuum
    itself is the fixed point.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    return QuadVariance(eta * v.sq + (1 - eta) / 2, eta * v.sp + (1 - eta) / 2)


def apply_amplifier(v: QuadVariance, eta: float) -> QuadVariance:
    """Variance map of the phase-insensitive amplification channel.

    The conjugate of loss at the same eta: x -> x/eta + (1-eta)/(2*eta).
    Composing apply_loss and then apply_amplifier yields a pure additive
    Gaussian noise channel of variance (1-eta)/eta per quadrature.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    extra = (1 - eta) / (2 * eta)
    return QuadVariance(v.sq / eta + extra, v.sp / eta + extra)


def amplifier_added_variance(eta: float, mode: AmplifierMode) -> float:
    """Additive noise of the combined loss + amplification channel.

    See :class:`AmplifierMode` for the per-mode expressions. All three
    strategies remove the amplitude rescaling of the loss channel and leave
    behind only this additive Gaussian displacement noise.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    mode = AmplifierMode(mode)
    if mode is AmplifierMode.POST:
        return (1 - eta) / eta
    if mode is AmplifierMode.PRE:
        return 1 - eta
    if mode is AmplifierMode.CC_PAIR:
        return (1 - eta) / (2 * eta)
    return (1 - eta) / eta  # CC_SINGLE: both modes' rescaling noise on one input


def apply_amplifier_variance(v: QuadVariance, eta: float, mode: AmplifierMode) -> QuadVariance:
    """Apply the combined loss + amplification budget to an input variance.

    Returns v plus the mode's additive noise term in both quadratures; the
    input variance itself passes through unscaled because amplification undoes
    the eta attenuation of the loss channel.
    """
    return v.add(amplifier_added_variance(eta, mode))


def squeezing_db_to_sigma2(db: float) -> float:
    """Tooth variance for a squeezing level in dB: sigma2 = 10**(-db/10) / 2."""
    return 10.0 ** (-db / 10.0) / 2.0


def sigma2_to_db(sigma2: float) -> float:
    """Squeezing level in dB for a tooth variance: -10*log10(2*sigma2).

    sigma2 = 0 maps to +inf (ideal code states).
    """
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")
    if sigma2 == 0:
        return math.inf
    return -10.0 * math.log10(2.0 * sigma2)
