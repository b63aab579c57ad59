"""Closed-form and spectral bounds on block coverage, incidence-free pairs
and the edge domination number.

Values are exact ``Fraction`` objects when no irrational square root is
involved and floats otherwise.  Integer conclusions go through
``ceil_safe``/``floor_safe``, which allow a 1e-6 slack for floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .constructions import check_affine_set
from .core import IncidenceStructure, StructureParams, classify
from .errors import DegenerateStructure, InvalidInput, NotADesign, NotSIS, TooLarge

Number = Union[Fraction, float]
EPS = 1e-6
SPECTRUM_LIMIT = 4096


def sqrt(x) -> Number:
    """Exact square root when ``x`` is a rational square, float otherwise."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative square root")
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return math.sqrt(n / d)


def ceil_safe(x: Number) -> int:
    if isinstance(x, (Fraction, int)):
        return math.ceil(x)
    return math.ceil(x - EPS)


def floor_safe(x: Number) -> int:
    if isinstance(x, (Fraction, int)):
        return math.floor(x)
    return math.floor(x + EPS)


def _params(obj) -> StructureParams:
    return classify(obj) if isinstance(obj, IncidenceStructure) else obj


def _need_r(p: StructureParams):
    if p.r is None:
        raise InvalidInput("replication number is not constant")


def _need_design(p: StructureParams):
    if not p.is_design:
        raise NotADesign("structure is not a design")
    if p.lam < 1:
        raise DegenerateStructure("lambda must be at least 1")


# ----------------------------------------------------------------------
# counting bounds


def blocks_meeting_quadratic(params, s: int) -> Fraction:
    """Lower bound r^2 s / (r + (s-1) lambda) on the blocks meeting an s-set."""
    p = _params(params)
    _need_r(p)
    if not 1 <= s <= p.v:
        raise InvalidInput("need 1 <= s <= v")
    return Fraction(p.r * p.r * s, p.r + (s - 1) * p.lam)


def quadratic_equality_order(params, s: int) -> Fraction:
    """Arc order 1 + (s-1) lambda / r at which the quadratic bound is tight."""
    p = _params(params)
    _need_r(p)
    return 1 + Fraction((s - 1) * p.lam, p.r)


def blocks_meeting_linear(params, s: int) -> int:
    """Lower bound r s - lambda C(s, 2) on the blocks meeting an s-set."""
    p = _params(params)
    _need_r(p)
    if not 1 <= s <= p.v:
        raise InvalidInput("need 1 <= s <= v")
    return p.r * s - p.lam * s * (s - 1) // 2


def linear_beats_quadratic(params, s: int) -> bool:
    p = _params(params)
    return p.lam == 0 or Fraction(s) < 1 + Fraction(p.r, p.lam)


def _disc(p: StructureParams) -> Number:
    return sqrt((p.r - p.k) ** 2 + 4 * (p.r - p.lam))


def ifpair_upper_bound(params, form: str = "auto") -> Number:
    """Largest |X| for an incidence-free pair with v - |X| = b - |Y| in a design.

    On symmetric designs this bounds every equinumerous pair.
    """
    p = _params(params)
    _need_design(p)
    if form == "auto":
        form = "symmetric" if p.is_symmetric_design else "general"
    r, k, lam = p.r, p.k, p.lam
    if form == "symmetric":
        if not p.is_symmetric_design:
            raise NotADesign("symmetric form needs a symmetric design")
        return k * (sqrt(k - lam) - 1) / lam + 1
    return r * (k - r - 2 + _disc(p)) / (2 * lam) + 1


def equality_arc_order(params) -> Number:
    """Order (k - r + sqrt((r-k)^2 + 4(r-lambda))) / 2 of an extremal arc."""
    p = _params(params)
    _need_design(p)
    return (p.k - p.r + _disc(p)) / 2


def gamma_lower_counting(params, form: str = "auto") -> Number:
    p = _params(params)
    _need_design(p)
    if form == "auto":
        form = "symmetric" if p.is_symmetric_design else "general"
    r, k, lam = p.r, p.k, p.lam
    if form == "symmetric":
        if not p.is_symmetric_design:
            raise NotADesign("symmetric form needs a symmetric design")
        return k * (k - sqrt(k - lam)) / lam
    if form == "restated":
        if not p.is_symmetric_design:
            raise NotADesign("restated form needs a symmetric design")
        return p.v - (k * sqrt(k - lam) - k) / lam - 1
    return r * (r + k - _disc(p)) / (2 * lam)


def projective_plane_lower(n: int) -> Number:
    """Counting bound for PG(2, n) written as n^2 - n sqrt(n) + 2n - sqrt(n) + 1."""
    s = sqrt(n)
    return n * n - n * s + 2 * n - s + 1


def even_square_plane_forms(q: int) -> dict:
    """The two closed forms offered for gamma_e of PG(2, q), q an even square.

    ``printed`` is q^2 - q sqrt(q) + sqrt(q) + 1; ``equality`` is the value
    forced by a maximal arc of order sqrt(q), q^2 - q sqrt(q) + 2q - sqrt(q) + 1.
    """
    s = sqrt(q)
    printed = q * q - q * s + s + 1
    equality = q * q - q * s + 2 * q - s + 1
    return {"printed": printed, "equality": equality, "agree": printed == equality}


# ----------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class Spectrum:
    """Adjacency spectrum of the incidence graph.

    ``eigenvalues`` lists (value, multiplicity) in decreasing order; ``gram``
    lists the eigenvalues of N N^T (or N^T N, the smaller side).
    """

    eigenvalues: tuple
    gram: tuple
    lambda2: float
    exact: bool = False

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.eigenvalues)

    def as_list(self) -> list[float]:
        return [float(x) for x, m in self.eigenvalues for _ in range(m)]

    def to_json(self) -> dict:
        return {"eigenvalues": [[float(x), m] for x, m in self.eigenvalues],
                "gram": [[float(x), m] for x, m in self.gram],
                "lambda2": float(self.lambda2)}


def _group(values, tol=1e-7) -> tuple:
    out: list[list] = []
    for x in sorted(values, reverse=True):
        if out and abs(out[-1][0] - x) <= tol * max(1.0, abs(x)):
            out[-1][1] += 1
        else:
            out.append([x, 1])
    return tuple((x, m) for x, m in out)


def _spectrum_from_gram(gram_vals, v: int, b: int, exact=False) -> Spectrum:
    gram_vals = sorted(gram_vals, reverse=True)
    sv = [math.sqrt(max(g, 0.0)) for g in gram_vals]
    adj = sv + [-s for s in sv] + [0.0] * abs(v - b)
    lam2 = sv[1] if len(sv) > 1 else 0.0
    return Spectrum(_group(adj), _group(gram_vals), lam2, exact)


def spectrum_exact(D: IncidenceStructure) -> Spectrum:
    """Eigenvalues of the incidence graph via the Gram matrix of the incidence matrix."""
    n = min(D.v, D.b)
    if n > SPECTRUM_LIMIT:
        raise TooLarge(f"dense eigensolve limited to {SPECTRUM_LIMIT} on the smaller side")
    N = D.incidence_matrix().astype(np.float64)
    G = N @ N.T if D.v <= D.b else N.T @ N
    vals = np.linalg.eigvalsh(G)
    snapped = []
    for g in vals:
        r = round(g)
        snapped.append(float(r) if abs(g - r) < 1e-8 * max(1.0, abs(g)) else float(g))
    return _spectrum_from_gram(snapped, D.v, D.b)


def symmetric_design_lambda2(params) -> Number:
    p = _params(params)
    if not p.is_symmetric_design:
        raise NotADesign("needs a symmetric design")
    return sqrt(p.k - p.lam)


def divisible_sbp_spectrum(v: int, k: int, d: int) -> Spectrum:
    """Closed-form spectrum {+-k, +-sqrt(k)^(v(d-1)/d), +-sqrt(k-2d)^(v/d-1)}."""
    if v % d or k < 2 * d:
        raise InvalidInput("inconsistent divisible semi-biplane parameters")
    gram = [k * k] + [k] * (v // d * (d - 1)) + [k - 2 * d] * (v // d - 1)
    return _spectrum_from_gram([float(g) for g in gram], v, v, exact=True)


def gamma_lower_spectral(params, spectrum: Spectrum | Number) -> Number:
    """k v / (lambda2 + k) for an SIS."""
    p = _params(params)
    if not p.is_sis:
        raise NotSIS("needs a symmetric incidence structure")
    lam2 = spectrum.lambda2 if isinstance(spectrum, Spectrum) else spectrum
    if isinstance(lam2, float) and abs(lam2 - round(lam2)) < 1e-9:
        lam2 = Fraction(round(lam2))
    return p.k * p.v / (lam2 + p.k) if isinstance(lam2, float) else Fraction(p.k * p.v) / (lam2 + p.k)


def divisible_sbp_lower(params) -> Number:
    """v - v / (sqrt(k) + 1)."""
    p = _params(params)
    if not p.is_divisible_sbp:
        raise InvalidInput("needs a divisible semi-biplane")
    return p.v - p.v / (sqrt(p.k) + 1)


def affine_hyperplane_sections(n: int, S) -> list[int]:
    """|H cap S| for every affine hyperplane H of the odd-weight class."""
    S = check_affine_set(n, S)
    ones = (1 << n) - 1
    out = []
    for a in range(1, ones):
        if a > a ^ ones:
            continue
        par = [bin(s & a).count("1") & 1 for s in S]
        m1 = sum(par)
        out.extend((len(S) - m1, m1))
    return out


def affine_sbp_spectrum(n: int, S) -> Spectrum:
    """Spectrum {+-k} together with k - 2|H cap S| over hyperplanes H."""
    sections = affine_hyperplane_sections(n, S)
    k = len(check_affine_set(n, S))
    vals = [float(k), float(-k)] + [float(k - 2 * m) for m in sections]
    v = 1 << (n - 1)
    # parallel hyperplanes give +x and -x together; zeros come in pairs
    pos = sorted((x for x in vals if x > 0), reverse=True)
    zeros = sum(1 for x in vals if x == 0) // 2
    gram = [x * x for x in pos] + [0.0] * zeros
    assert len(gram) == v
    lam2 = pos[1] if len(pos) > 1 else 0.0
    return Spectrum(_group(vals), _group(gram), lam2, exact=True)


def affine_sbp_gamma_lower(n: int, S) -> Fraction:
    """(k / m) 2^(n-2) with m the largest hyperplane section of S."""
    k = len(check_affine_set(n, S))
    m = max(affine_hyperplane_sections(n, S))
    return Fraction(k * 2 ** (n - 2), m)


# ----------------------------------------------------------------------
# report


@dataclass
class BoundEntry:
    name: str
    kind: str  # "lower" / "upper" on gamma_e, "alpha_upper" on alpha, "closed_form"
    raw: Number
    hypothesis_ok: bool
    provenance: str

    @property
    def integer(self) -> int:
        if self.kind in ("lower",):
            return ceil_safe(self.raw)
        if self.kind in ("upper", "alpha_upper"):
            return floor_safe(self.raw)
        return round(float(self.raw))

    def to_json(self) -> dict:
        raw = self.raw
        raw_out = (str(raw) if isinstance(raw, Fraction) and raw.denominator != 1
                   else int(raw) if isinstance(raw, Fraction) else float(raw))
        return {"name": self.name, "kind": self.kind, "raw": raw_out,
                "integer": self.integer, "hypothesis_ok": self.hypothesis_ok,
                "provenance": self.provenance}


@dataclass
class BoundsReport:
    instance: str
    params: StructureParams
    entries: list[BoundEntry] = field(default_factory=list)

    def add(self, *args):
        self.entries.append(BoundEntry(*args))

    def get(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def best_lower(self) -> int:
        vals = [e.integer for e in self.entries if e.kind == "lower" and e.hypothesis_ok]
        return max(vals) if vals else 0

    def best_upper(self) -> int:
        vals = [e.integer for e in self.entries if e.kind == "upper" and e.hypothesis_ok]
        return min(vals) if vals else self.params.v

    def consistent(self) -> bool:
        return self.best_lower() <= self.best_upper()

    def to_json(self) -> dict:
        return {"instance": self.instance, "params": self.params.as_dict(),
                "bounds": [e.to_json() for e in self.entries]}


def _family_entries(rep: BoundsReport, family: dict):
    p = rep.params
    fam = family.get("family")
    if fam == "pg":
        n, q, k = family["n"], family["q"], family["k"]
        th = (q ** (n + 1) - 1) // (q - 1)
        if n >= 3 and k == 1:
            rep.add("pg_lines_exact", "lower", Fraction(th - q), True,
                    "points/lines of PG(n,q), n >= 3: gamma_e = theta_n - q")
            rep.add("pg_lines_construction", "upper", Fraction(th - q), True,
                    "incident point-line pair plus a q-regular perfect matching")
        elif n >= 3 and 1 < k < n - 1:
            rep.add("pg_kspaces_exact", "lower", Fraction(th), True,
                    "points/k-spaces of PG(n,q), 1 < k < n-1: r > v forces gamma_e = v")
        if n == 2:
            rep.add("pg_plane_counting_form", "lower", projective_plane_lower(q), True,
                    "counting bound for PG(2,q) written in q")
            h = q.bit_length() - 1
            if q == 1 << h and h % 2 == 0:
                forms = even_square_plane_forms(q)
                rep.add("even_square_printed_form", "closed_form", forms["printed"], False,
                        "published closed form for q an even power of 2 (disagrees with the arc value)")
                rep.add("even_square_equality_form", "closed_form", forms["equality"], True,
                        "value forced by a maximal arc of order sqrt(q) and its dual arc")
                rep.add("even_square_arc_upper", "upper", forms["equality"], True,
                        "Denniston maximal arc of order sqrt(q) with biregular complement matching")
    elif fam == "hd-paley":
        q = family["q"]
        s = sqrt(q)
        if isinstance(s, Fraction):
            rep.add("paley_clique_upper", "upper", 2 * q + 1 - s, q >= 101,
                    "subfield clique of the Paley graph via the natural polarity (needs q >= 101)")
    elif fam == "menon-bush":
        h = family["h"]
        rep.add("bush_menon_exact", "upper", Fraction(4 * h * h - 2 * h), True,
                "2h-point class arc of a symmetric Bush-type Menon design")
    elif fam == "sbp-elation":
        q = family["q"]
        h = q.bit_length() - 1
        size = (2 ** (h // 2)) * q // 4
        rep.add("elation_pair_upper", "upper", Fraction(p.v - size), q >= 128,
                "subspace pair in the elation semi-biplane (needs q >= 128)")
    elif fam == "sbp-homology":
        q = family["q"]
        rep.add("homology_pair_upper", "upper", Fraction(p.v - q * (q * q - 1) // 4), q >= 11,
                "root-of-unity window pair in the homology semi-biplane (needs q >= 11)")
    elif fam == "sbp-baer":
        q = family["q"]
        if q % 4 == 3:
            size = (q - 1) * (q * q + 2 * q - 1) // 4
        else:
            size = (q * q - 1) * (q // 4)
        rep.add("baer_pair_upper", "upper", Fraction(p.v - size), q >= 11,
                "root-of-unity window pair in the Baer semi-biplane (needs q >= 11)")
    elif fam == "sbp-affine":
        n, S = family["n"], family["S"]
        rep.add("affine_hyperplane_lower", "lower", affine_sbp_gamma_lower(n, S), True,
                "spectral bound from hyperplane sections of S")


def bounds_report(D: IncidenceStructure, family: dict | None = None,
                  spectral: bool = True, name: str | None = None) -> BoundsReport:
    from .matching import max_matching

    p = classify(D)
    rep = BoundsReport(name or D.name or "instance", p)
    isolated = bool(np.any(D.degrees == 0))
    rep.add("trivial_upper", "upper", Fraction(p.v), not isolated,
            "one incident block per point")
    nu = max_matching(D.graph()).size
    rep.add("matching_half_lower", "lower", Fraction(nu, 2), True,
            "every maximal matching has at least half the maximum matching size")
    if p.is_design and p.lam >= 1:
        if p.r >= p.v:
            rep.add("r_ge_v_exact", "lower", Fraction(p.v), True,
                    "design with r >= v: every edge dominating set has size v")
        else:
            rep.add("v_minus_1_upper", "upper", Fraction(p.v - 1), True,
                    "design with r < v: matching on the blocks through one point")
        rep.add("counting_lower", "lower", gamma_lower_counting(p, "general"), True,
                "quadratic block-count bound applied to the uncovered points")
        rep.add("alpha_upper", "alpha_upper", ifpair_upper_bound(p, "general"), True,
                "largest pair with v-|X| = b-|Y| from the quadratic block count")
        rep.add("extremal_arc_order", "closed_form", equality_arc_order(p), True,
                "order of a maximal arc attaining the counting bound")
        if p.is_symmetric_design:
            rep.add("counting_lower_symmetric", "lower", gamma_lower_counting(p, "symmetric"), True,
                    "symmetric-design form k(k - sqrt(k-lambda))/lambda")
            rep.add("counting_lower_restated", "lower", gamma_lower_counting(p, "restated"), True,
                    "symmetric-design form v - (k sqrt(k-lambda) - k)/lambda - 1")
            u = Fraction(p.v + 1, 4)
            if u.denominator == 1 and p.k == 2 * u - 1 and p.lam == u - 1:
                rep.add("hadamard_design_lower", "lower",
                        4 * u - 2 * sqrt(u) - 1 / (sqrt(u) + 1), True,
                        "Hadamard design (4u-1, 2u-1, u-1)")
            h2 = Fraction(p.v, 4)
            h = sqrt(h2) if h2.denominator == 1 else None
            if isinstance(h, Fraction) and h.denominator == 1 and h > 0:
                h = int(h)
                if (p.k, p.lam) == (2 * h * h - h, h * h - h):
                    rep.add("menon_lower", "lower", Fraction(4 * h * h - 2 * h), True,
                            "Menon design with eps = -1")
                elif (p.k, p.lam) == (2 * h * h + h, h * h + h):
                    rep.add("menon_lower", "lower",
                            4 * h * h - 2 * h + 2 - Fraction(2, h + 1), True,
                            "Menon design with eps = +1")
    if p.is_sis and p.lam >= 1 and spectral and min(p.v, p.b) <= SPECTRUM_LIMIT:
        spec = spectrum_exact(D)
        rep.add("spectral_lower", "lower", gamma_lower_spectral(p, spec), True,
                "expander mixing bound k v / (lambda2 + k)")
    if p.is_divisible_sbp:
        rep.add("divisible_sbp_lower", "lower", divisible_sbp_lower(p), True,
                "divisible semi-biplane spectrum in the expander mixing bound")
    if family:
        _family_entries(rep, family)
    return rep
