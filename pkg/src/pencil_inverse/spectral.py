"""Spectral data sets: screening, shift estimation and augmentation by (0, alpha0)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, ValidationError

SHIFT_DISAGREEMENT = 0.1


@dataclass(frozen=True)
class SpectralPair:
    n: int
    lam: float
    alpha: float


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenpairs indexed by n != 0, optionally with a committed shift ``h``.

    ``zero_alpha`` carries the Dirac zero-mode norming constant when the data
    were produced by the forward solver; the pencil itself has no n = 0 pair.
    """

    pairs: tuple
    h: Optional[float] = None
    zero_alpha: Optional[float] = None

    def __post_init__(self):
        pairs = tuple(sorted((SpectralPair(int(p.n), float(p.lam), float(p.alpha)) for p in self.pairs),
                             key=lambda p: p.n))
        ns = [p.n for p in pairs]
        if len(set(ns)) != len(ns):
            raise DomainError("duplicate indices in spectral data")
        if 0 in ns:
            raise DomainError("pencil spectral data are indexed by n != 0")
        if not all(math.isfinite(p.lam) and math.isfinite(p.alpha) for p in pairs):
            raise DomainError("spectral data must be finite")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_arrays(cls, ns, lams, alphas, h=None, zero_alpha=None) -> "SpectralData":
        return cls(tuple(SpectralPair(n, l, a) for n, l, a in zip(ns, lams, alphas)), h, zero_alpha)

    @classmethod
    def from_eigenpairs(cls, eigs, h=None) -> "SpectralData":
        """Drop the n = 0 Dirac pair (kept as ``zero_alpha``)."""
        zero = [e.alpha for e in eigs if e.n == 0]
        return cls.from_arrays([e.n for e in eigs if e.n != 0],
                               [e.lam for e in eigs if e.n != 0],
                               [e.alpha for e in eigs if e.n != 0],
                               h=h, zero_alpha=zero[0] if zero else None)

    @property
    def ns(self) -> np.ndarray:
        return np.array([p.n for p in self.pairs], dtype=int)

    @property
    def lams(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.pairs])

    @property
    def N(self) -> int:
        return int(np.max(np.abs(self.ns))) if self.pairs else 0

    def with_h(self, h) -> "SpectralData":
        return SpectralData(self.pairs, h, self.zero_alpha)

    def to_dict(self) -> dict:
        out = {
            "h": self.h,
            "pairs": [{"n": p.n, "lambda": p.lam, "alpha": p.alpha} for p in self.pairs],
        }
        if self.zero_alpha is not None:
            out["zero_mode"] = {"n": 0, "lambda": 0.0, "alpha": self.zero_alpha}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralData":
        pairs, zero = [], None
        for item in data["pairs"]:
            if int(item["n"]) == 0:
                zero = float(item["alpha"])
            else:
                pairs.append(SpectralPair(int(item["n"]), float(item["lambda"]), float(item["alpha"])))
        if "zero_mode" in data and data["zero_mode"] is not None:
            zero = float(data["zero_mode"]["alpha"])
        h = data.get("h")
        return cls(tuple(pairs), None if h is None else float(h), zero)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SpectralData":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class AugmentedSpectralData:
    base: SpectralData
    alpha0: float
    h: float

    def __post_init__(self):
        if not self.alpha0 > 0.0:
            raise DomainError(f"alpha0 must be positive, got {self.alpha0}")

    @property
    def pairs(self) -> tuple:
        return tuple(sorted(self.base.pairs + (SpectralPair(0, 0.0, float(self.alpha0)),),
                            key=lambda p: p.n))

    @property
    def ns(self) -> np.ndarray:
        return np.array([p.n for p in self.pairs], dtype=int)

    @property
    def lams(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.pairs])

    @property
    def N(self) -> int:
        return self.base.N

    def shifted(self, delta: float) -> "AugmentedSpectralData":
        """Same data with every nonzero eigenvalue and h moved by ``delta``."""
        base = SpectralData(tuple(SpectralPair(p.n, p.lam + delta, p.alpha) for p in self.base.pairs),
                            None if self.base.h is None else self.base.h + delta, self.base.zero_alpha)
        return AugmentedSpectralData(base, self.alpha0, self.h + delta)


@dataclass(frozen=True)
class ValidationTolerances:
    # last-quartile mean may exceed the first-quartile mean by this ratio ...
    decay_ratio: float = 1.0
    # ... or by this absolute amount (exact free data have all terms zero)
    decay_slack: float = 1e-12
    shift_disagreement: float = SHIFT_DISAGREEMENT


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list:
        return [k for k, v in self.checks.items() if not v]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks), "stats": dict(self.stats)}


def estimate_shift(sd: SpectralData) -> float:
    """Weighted mean of lam_n - pi n over the upper half of |n|, weights n^2."""
    ns = sd.ns
    N = sd.N
    if N < 4:
        raise DomainError(f"shift estimate needs N >= 4, got N={N}")
    sel = np.abs(ns) > N / 2
    w = ns[sel].astype(float) ** 2
    return float(np.sum(w * (sd.lams[sel] - math.pi * ns[sel])) / np.sum(w))


def relabel(sd: SpectralData) -> SpectralData:
    """Enumerate by sign: negative eigenvalues get -1, -2, ..., positive 1, 2, ..."""
    order = np.argsort(sd.lams)
    lams, alphas = sd.lams[order], sd.alphas[order]
    neg = int(np.sum(lams < 0))
    ns = [k - neg for k in range(neg)] + [k + 1 for k in range(len(lams) - neg)]
    return SpectralData.from_arrays(ns, lams, alphas, sd.h, sd.zero_alpha)


def _quartile_decay(ns, terms, tol: ValidationTolerances):
    order = np.argsort(np.abs(ns), kind="stable")
    t = terms[order]
    q = max(1, len(t) // 4)
    first, last = float(np.mean(t[:q])), float(np.mean(t[-q:]))
    return last <= tol.decay_ratio * first + tol.decay_slack, first, last


def validate(sd: SpectralData, tolerances: ValidationTolerances = ValidationTolerances()) -> ValidationReport:
    """Screen ``sd`` against the finite-sample proxies of the admissible data class."""
    if not sd.pairs:
        raise DomainError("empty spectral data")
    ns, lams, alphas = sd.ns, sd.lams, sd.alphas
    N = sd.N
    report = ValidationReport()
    c = report.checks
    c["contiguous"] = set(ns.tolist()) == set(range(-N, 0)) | set(range(1, N + 1))
    c["increasing"] = bool(np.all(np.diff(lams) > 0))
    by_n = dict(zip(ns.tolist(), lams.tolist()))
    c["sign_split"] = by_n.get(-1, 0.0) < 0.0 < by_n.get(1, 0.0)
    c["alpha_positive"] = bool(np.all(alphas > 0))

    if N >= 4:
        h = estimate_shift(sd) if sd.h is None else sd.h
        h_enum = estimate_shift(relabel(sd)) if c["alpha_positive"] else h
    else:
        h = float(np.mean(lams - math.pi * ns)) if sd.h is None else sd.h
        h_enum = h
    lam_terms = (lams - math.pi * ns - h) ** 2
    alpha_terms = (alphas - 1.0) ** 2
    lam_ok, lam_first, lam_last = _quartile_decay(ns, lam_terms, tolerances)
    al_ok, al_first, al_last = _quartile_decay(ns, alpha_terms, tolerances)
    finite = bool(np.isfinite(lam_terms.sum()) and np.isfinite(alpha_terms.sum()))
    c["lambda_l2_proxy"] = finite and lam_ok
    c["alpha_l2_proxy"] = finite and al_ok
    c["shift_agreement"] = abs(h - h_enum) <= tolerances.shift_disagreement
    report.stats.update(
        N=N,
        h=h,
        h_enumeration=h_enum,
        lambda_remainder_sum=float(lam_terms.sum()),
        alpha_remainder_sum=float(alpha_terms.sum()),
        lambda_quartiles=[lam_first, lam_last],
        alpha_quartiles=[al_first, al_last],
    )
    return report


def augment(sd: SpectralData, alpha0: float = 1.0, h: Optional[float] = None,
            tolerances: ValidationTolerances = ValidationTolerances()) -> AugmentedSpectralData:
    """Add the pair (0, alpha0) and commit the shift used downstream."""
    if not alpha0 > 0.0:
        raise DomainError(f"alpha0 must be positive, got {alpha0}")
    report = validate(sd if h is None else sd.with_h(h), tolerances)
    if not report.ok:
        raise ValidationError(f"spectral data rejected: failed {report.failed()}", report)
    if h is None:
        h = sd.h if sd.h is not None else estimate_shift(sd)
    return AugmentedSpectralData(sd.with_h(float(h)), float(alpha0), float(h))


def report_json(report: ValidationReport) -> str:
    return json.dumps(report.to_dict(), indent=1)

