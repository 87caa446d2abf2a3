"""
Prior Specifications
====================
Uniform shrinkage priors (USP) on the second-level covariance A, with the
shape parameter V0 built from the group covariances, and the improper flat
prior on A.

    USP:  pi(A) ∝ |V0 + A|^-(p+1)
    Flat: pi(A) ∝ 1{|A| > 0}
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from numpy.typing import ArrayLike

from model.errors import ConfigError, DimensionMismatchError
from model.linalg import SpdMatrix, as_matrix, as_spd, spd_inverse
from model.types import as_groups

FLAT = "flat"
USP = "usp"

# V0 construction rules
HARMONIC = "harmonic"      # DuMouchel
ARITHMETIC = "arithmetic"  # Everson & Morris
EXPLICIT = "explicit"

RULE_TAGS = {HARMONIC: "DM", ARITHMETIC: "E&M", EXPLICIT: "V0"}
TOKEN_RULES = {"dm": HARMONIC, "em": ARITHMETIC}


@dataclass(frozen=True, eq=False)
class PriorSpec:
    """
    A prior on A.

    For USP priors, V0 is the shape parameter actually used in the density
    and base is the unscaled rule output it was built from (the sampler
    starts A there). Both are None for the flat prior.
    """

    kind: str
    V0: Optional[SpdMatrix] = field(default=None, repr=False)
    description: str = ""
    rule: Optional[str] = None
    delta: float = 1.0
    diagonal: bool = False
    base: Optional[SpdMatrix] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in (USP, FLAT):
            raise ConfigError(f"unknown prior kind '{self.kind}'")
        if self.kind == USP:
            if self.V0 is None:
                raise ConfigError("USP prior needs V0")
            object.__setattr__(self, "V0", as_spd(self.V0, label="V0"))
            base = self.V0 if self.base is None else as_spd(self.base, label="V0 base")
            object.__setattr__(self, "base", base)
        if not self.description:
            object.__setattr__(self, "description", "Flat" if self.kind == FLAT else "USP")

    @property
    def is_flat(self) -> bool:
        return self.kind == FLAT

    @property
    def p(self) -> Optional[int]:
        return None if self.V0 is None else self.V0.shape[0]

    def to_dict(self) -> Dict[str, Any]:
        """Run-config form; explicit priors carry their matrix."""
        if self.is_flat:
            return {"kind": FLAT}
        entry = {
            "kind": USP,
            "rule": self.rule or EXPLICIT,
            "delta": self.delta,
            "diagonal": self.diagonal,
        }
        if entry["rule"] == EXPLICIT:
            entry["V0"] = self.base.tolist()
        return entry


# ==================== SHAPE PARAMETER RULES ====================

def v0_harmonic_mean(dataset) -> SpdMatrix:
    """
    k (sum_j V_j^-1)^-1, the harmonic mean of the group covariances.

    Args:
        dataset: Dataset or sequence of GroupObservation

    Returns:
        p x p SPD matrix
    """
    groups = as_groups(dataset)
    precision = sum(spd_inverse(g.V, f"V_{j}") for j, g in enumerate(groups, start=1))
    return len(groups) * spd_inverse(precision, "sum of V_j^-1")


def v0_arithmetic_mean(dataset) -> SpdMatrix:
    """(sum_j V_j) / k."""
    groups = as_groups(dataset)
    return np.mean([g.V for g in groups], axis=0)


def v0_scaled_diag(base: ArrayLike, delta: float) -> SpdMatrix:
    """
    delta * diag(base), dropping the off-diagonal entries.

    Args:
        base: p x p SPD matrix (scalar allowed for p = 1)
        delta: Positive multiplier

    Returns:
        Diagonal p x p matrix
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    base = as_matrix(base, "base")
    return delta * np.diag(np.diag(base))


# ==================== CONSTRUCTORS ====================

def format_delta(delta: float) -> str:
    """10000 -> '10^4'; other values in plain form."""
    if delta > 0:
        exponent = math.log10(delta)
        if exponent >= 1 and abs(exponent - round(exponent)) < 1e-12:
            return f"10^{int(round(exponent))}"
    return f"{delta:g}"


def prior_label(rule: str, delta: float, diagonal: bool) -> str:
    tag = RULE_TAGS[rule]
    if diagonal:
        target = f"diag({tag})"
    else:
        target = tag
    if delta == 1.0:
        return f"USP V0={target}"
    return f"USP V0={format_delta(delta)} x {target}"


def flat_prior() -> PriorSpec:
    return PriorSpec(kind=FLAT, description="Flat")


def usp_prior(
    base: ArrayLike,
    delta: float = 1.0,
    diagonal: bool = False,
    rule: str = EXPLICIT,
    description: str = "",
) -> PriorSpec:
    """
    USP with V0 = delta * base, or delta * diag(base) when diagonal is set.

    Args:
        base: Unscaled shape matrix
        delta: Positive multiplier
        diagonal: Keep only the diagonal of base
        rule: Which rule produced base (for labels and serialization)
        description: Label override

    Returns:
        PriorSpec of kind 'usp'
    """
    if not delta > 0.0:
        raise ConfigError(f"delta must be positive, got {delta}")
    base = as_spd(base, label="V0 base")
    V0 = v0_scaled_diag(base, delta) if diagonal else delta * base
    return PriorSpec(
        kind=USP,
        V0=V0,
        description=description or prior_label(rule, delta, diagonal),
        rule=rule,
        delta=float(delta),
        diagonal=bool(diagonal),
        base=base,
    )


def build_prior(entry: Dict[str, Any], dataset) -> PriorSpec:
    """
    Build a PriorSpec from its run-config form against a dataset.

    Args:
        entry: {"kind": "flat"} or {"kind": "usp", "rule": ..., "delta": ..., "diagonal": ..., "V0": ...}
        dataset: Dataset whose V_j feed the harmonic or arithmetic rule

    Returns:
        PriorSpec with V0 of the dataset's dimension
    """
    kind = entry.get("kind")
    if kind == FLAT:
        return flat_prior()
    if kind != USP:
        raise ConfigError(f"unknown prior kind '{kind}'")

    rule = entry.get("rule", HARMONIC)
    if rule == HARMONIC:
        base = v0_harmonic_mean(dataset)
    elif rule == ARITHMETIC:
        base = v0_arithmetic_mean(dataset)
    elif rule == EXPLICIT:
        if "V0" not in entry:
            raise ConfigError("explicit USP prior needs a V0 matrix")
        base = as_matrix(entry["V0"], "V0")
    else:
        raise ConfigError(f"unknown V0 rule '{rule}'")

    if base.shape[0] != dataset.p:
        raise DimensionMismatchError(f"V0 is {base.shape[0]}x{base.shape[0]} but p = {dataset.p}")
    return usp_prior(
        base,
        delta=float(entry.get("delta", 1.0)),
        diagonal=bool(entry.get("diagonal", False)),
        rule=rule,
        description=entry.get("description", ""),
    )


def parse_prior_token(token: str) -> Dict[str, Any]:
    """
    CLI shorthand to run-config form.

        flat              {"kind": "flat"}
        usp-dm            harmonic-mean V0
        usp-em:100        100 x arithmetic-mean V0
        usp-em-diag:10    10 x diag(arithmetic-mean V0)
    """
    token = token.strip().lower()
    if token == FLAT:
        return {"kind": FLAT}

    name, _, delta_text = token.partition(":")
    parts = name.split("-")
    if len(parts) not in (2, 3) or parts[0] != USP or parts[1] not in TOKEN_RULES:
        raise ConfigError(
            f"unknown prior '{token}' (expected flat, usp-dm, usp-em, usp-dm:<delta>, "
            f"usp-em-diag:<delta>, ...)"
        )
    if len(parts) == 3 and parts[2] != "diag":
        raise ConfigError(f"unknown prior modifier '{parts[2]}' in '{token}'")

    delta = 1.0
    if delta_text:
        try:
            delta = float(delta_text)
        except ValueError as e:
            raise ConfigError(f"delta '{delta_text}' in '{token}' is not a number") from e
        if not delta > 0.0:
            raise ConfigError(f"delta must be positive in '{token}'")

    return {
        "kind": USP,
        "rule": TOKEN_RULES[parts[1]],
        "delta": delta,
        "diagonal": len(parts) == 3,
    }

