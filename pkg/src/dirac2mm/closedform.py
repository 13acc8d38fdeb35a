"""Exact evaluators for the model's closed-form quantities.

The moment table below is the unique solution of the loop-equation
hierarchy inside the quadratic-surd ansatz, under the closure constraint
m_{1,1,1,1} = 0: we call it the *algebraic branch*.  Its entries satisfy
every generated loop equation with exactly zero residual (the degree-10
values needed by the degree-7-word equations are completed at runtime by
exact linear solving).  Note that the algebraic branch is a different
object from the Gaussian-based perturbative expansion computed by
``solver`` / ``mapenum``: the closure constraint is incompatible with the
Gaussian initial data, so the two agree only through low orders; the
degree-8 entries of the branch even carry a simple pole at t4 = 0.
``solver.verify_closed_forms`` quantifies the divergence order by order.

Everything here is exact field arithmetic in Q(s), s = sqrt(t2^2 + 8 t4),
except the free energies, which are plain floating point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    CouplingPoint,
    MomentSeries,
    SurdScalar,
    rat,
    rational_sqrt,
    surd_expansion,
)
from .words import CanonicalMoment, Word, canonicalize, vanishes_by_parity
from .sde import M2, CoefTag, generate_system


class Signature(enum.Enum):
    """Clifford-module type; fixes the two signs in the full action."""

    S20 = (2, 0)
    S11 = (1, 1)
    S02 = (0, 2)

    @property
    def eps1(self) -> int:
        return {Signature.S20: 1, Signature.S11: 1, Signature.S02: -1}[self]

    @property
    def eps2(self) -> int:
        return {Signature.S20: 1, Signature.S11: -1, Signature.S02: -1}[self]

    @classmethod
    def parse(cls, text) -> "Signature":
        if isinstance(text, Signature):
            return text
        key = str(text).strip().replace(" ", "").strip("()").replace(",", "")
        try:
            return {"20": cls.S20, "11": cls.S11, "02": cls.S02}[key]
        except KeyError:
            raise ValueError(f"unknown signature {text!r}; use 2,0 / 1,1 / 0,2") from None

    def __str__(self):
        return f"({self.value[0]},{self.value[1]})"


DIRAC_INDICES = (2, 4, 6)

# Numerator of each branch moment over DEN * t4^q, as monomials
# (coefficient, t2 power, t4 power, s power in {0, 1}).
_PLAIN = lambda c, i, j: (Fraction(c), i, j, 0)
_SURD = lambda c, i, j: (Fraction(c), i, j, 1)


def _family(c1, c2, c3, cs1, cs2, q, den):
    """Degree-8-style numerator c1 t2^4 + c2 t2^2 t4 + c3 t4^2 - (cs1 t2^3 + cs2 t2 t4) s."""
    return (
        q,
        den,
        (
            _PLAIN(c1, 4, 0),
            _PLAIN(c2, 2, 1),
            _PLAIN(c3, 0, 2),
            _SURD(-cs1, 3, 0),
            _SURD(-cs2, 1, 1),
        ),
    )


def _deg6(c):
    """c * (t2^2 s + 2 t4 s - t2^3 - 6 t2 t4) / (32768 t4^3)."""
    return (
        3,
        32768,
        (
            _PLAIN(-c, 3, 0),
            _PLAIN(-6 * c, 1, 1),
            _SURD(c, 2, 0),
            _SURD(2 * c, 0, 1),
        ),
    )


# moment label -> (q, den, monomials): value = sum(monomials)/(den * t4^q).
# Keys are re-indexed below by the canonical class of each label, so aliases
# such as m_{3,3,1,1} (canonically m_{3,1,1,3}) resolve to the same entry.
_NAMED_FORMS = {
    "m_{2}": (1, 32, (_PLAIN(-1, 1, 0), _SURD(1, 0, 0))),
    "m_{4}": (2, 256, (_PLAIN(1, 2, 0), _PLAIN(4, 0, 1), _SURD(-1, 1, 0))),
    "m_{2,2}": (2, 512, (_PLAIN(1, 2, 0), _PLAIN(4, 0, 1), _SURD(-1, 1, 0))),
    "m_{1,1,1,1}": (0, 1, ()),
    "m_{6}": _deg6(19),
    "m_{4,2}": _deg6(7),
    "m_{2,1,2,1}": _deg6(3),
    "m_{3,1,1,1}": _deg6(1),
    "m_{8}": _family(49, 396, 408, 49, 200, 4, 524288),
    "m_{6,2}": _family(15, 124, 136, 15, 64, 4, 524288),
    "m_{4,4}": _family(11, 92, 104, 11, 48, 4, 524288),
    "m_{2,2,2,2}": _family(9, 76, 88, 9, 40, 4, 524288),
    "m_{4,1,2,1}": _family(5, 44, 56, 5, 24, 4, 524288),
    "m_{3,2,1,2}": _family(5, 44, 56, 5, 24, 4, 524288),
    "m_{2,1,1,2,1,1}": _family(3, 28, 40, 3, 16, 4, 524288),
    "m_{3,1,3,1}": _family(3, 20, 8, 3, 8, 4, 524288),
    "m_{3,3,1,1}": _family(3, 20, 8, 3, 8, 4, 524288),
    "m_{5,1,1,1}": _family(3, 20, 8, 3, 8, 4, 524288),
    "m_{1,1,1,1,1,1,1,1}": _family(3, 20, 8, 3, 8, 4, 524288),
    "m_{2,2,1,1,1,1}": _family(1, 4, -8, 1, 0, 4, 524288),
}


def _build_table() -> dict:
    from .words import parse_moment_label

    table = {}
    for label, form in _NAMED_FORMS.items():
        runs = parse_moment_label(label).runs
        if runs in table and table[runs] != form:
            raise AssertionError(f"conflicting closed forms for class of {label}")
        table[runs] = form
    return table


_MOMENT_TABLE = _build_table()

MAX_TABLE_DEGREE = 8


class UnknownMoment(KeyError):
    """Requested a moment outside the tabulated closed forms."""


class PoleAtGaussianPoint(ArithmeticError):
    """The branch value is not a power series at t4 = 0."""


def _as_surd(runs, point: CouplingPoint) -> SurdScalar:
    q, den, monomials = _MOMENT_TABLE[runs]
    t2, t4, ssq = point.t2, point.t4, point.ssq
    acc = SurdScalar(0, 0, ssq)
    for coef, i, j, sp in monomials:
        term = SurdScalar(coef * t2**i * t4**j, 0, ssq)
        if sp:
            term = term * SurdScalar.s(ssq)
        acc = acc + term
    return acc / SurdScalar.rational(den * t4**q, ssq)


def moment(c: CanonicalMoment | Word | str, point: CouplingPoint, signature: Signature | None = None) -> SurdScalar:
    """Exact branch value of a moment of degree <= 8.

    The signature argument is accepted for interface symmetry and ignored:
    all three signatures share the same leading-order moments.
    """
    del signature
    if not isinstance(c, CanonicalMoment):
        c = canonicalize(c)
    if point.t4 <= 0:
        raise ValueError("moment closed forms need t4 > 0")
    if c.is_empty():
        return SurdScalar(1, 0, point.ssq)
    if vanishes_by_parity(c):
        return SurdScalar(0, 0, point.ssq)
    if c.runs not in _MOMENT_TABLE:
        raise UnknownMoment(
            f"no tabulated closed form for {c.label()} (degree {c.degree} > {MAX_TABLE_DEGREE})"
        )
    return _as_surd(c.runs, point)


def moment_series(c: CanonicalMoment | str, t2, order: int) -> MomentSeries:
    """Exact Taylor expansion of a branch moment in t4, at fixed t2 > 0.

    Raises PoleAtGaussianPoint for entries whose numerator does not vanish
    to order t4^q (all degree-8 branch values have a simple pole).
    """
    if not isinstance(c, CanonicalMoment):
        c = canonicalize(c)
    t2 = rat(t2)
    if c.is_empty():
        return MomentSeries.constant(1, t2, order)
    if vanishes_by_parity(c) or c.runs == (1, 1, 1, 1):
        return MomentSeries.zero(t2, order)
    if c.runs not in _MOMENT_TABLE:
        raise UnknownMoment(f"no tabulated closed form for {c.label()}")
    q, den, monomials = _MOMENT_TABLE[c.runs]
    work = order + q
    s = surd_expansion(t2, work)
    num = MomentSeries.zero(t2, work)
    for coef, i, j, sp in monomials:
        piece = MomentSeries.constant(coef * t2**i, t2, work).shift_mul_t4(j)
        if sp:
            piece = piece * s
        num = num + piece
    try:
        shifted = num.divide_t4(q)
    except Exception as exc:
        raise PoleAtGaussianPoint(
            f"{c.label()} branch value has a pole at t4 = 0: {exc}"
        ) from None
    coeffs = list(shifted.coeffs[: order + 1])
    coeffs += [Fraction(0)] * (order + 1 - len(coeffs))
    return MomentSeries(t2, [x / den for x in coeffs])


# -- degree-10 completion ----------------------------------------------------


def _solve_surd_linear(rows, rhs, ncols, ssq):
    """Pivot solution of a rectangular exact linear system over Q(s)."""
    zero = SurdScalar(0, 0, ssq)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    n = len(aug)
    pivots = []
    prow = 0
    for c in range(ncols):
        sel = next((r for r in range(prow, n) if not aug[r][c].is_zero()), None)
        if sel is None:
            continue
        aug[prow], aug[sel] = aug[sel], aug[prow]
        inv = aug[prow][c].inverse()
        aug[prow] = [v * inv for v in aug[prow]]
        for r in range(n):
            if r != prow and not aug[r][c].is_zero():
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[prow])]
        pivots.append(c)
        prow += 1
        if prow == n:
            break
    for r in range(prow, n):
        if all(aug[r][c].is_zero() for c in range(ncols)) and not aug[r][ncols].is_zero():
            raise ArithmeticError("inconsistent completion system")
    x = [zero] * ncols
    for i in reversed(range(len(pivots))):
        c = pivots[i]
        acc = aug[i][ncols]
        for cc in range(c + 1, ncols):
            if not aug[i][cc].is_zero():
                acc = acc - aug[i][cc] * x[cc]
        x[c] = acc
    return x


def branch_assignment(point: CouplingPoint, max_word_degree: int = 7) -> dict:
    """Moment values satisfying every loop equation up to the given word degree.

    Degrees <= 8 come from the closed-form table; the degree-10 moments
    referenced by the degree-7-word equations are completed by solving those
    equations exactly (the system is consistent with a small kernel; free
    coordinates are set to zero, which any residual check is insensitive to).
    """
    ssq = point.ssq
    vals = {CanonicalMoment(runs): _as_surd(runs, point) for runs in _MOMENT_TABLE}
    if max_word_degree < 7:
        return vals
    t2s = SurdScalar.rational(point.t2, ssq)
    t4s = SurdScalar.rational(point.t4, ssq)
    zero = SurdScalar(0, 0, ssq)
    m2v = vals[M2]
    eqs = [eq for eq in generate_system(max_word_degree) if eq.source_word.degree == 7]
    unknowns = sorted({m for eq in eqs for m, _t in eq.rhs if m.degree == 10}, key=lambda m: m.runs)
    col = {m: i for i, m in enumerate(unknowns)}
    rows, rhs = [], []
    for eq in eqs:
        row = [zero] * len(unknowns)
        const = zero
        for m, tag in eq.rhs:
            if m in col:
                coef = t4s * (16 if tag is CoefTag.Q else -16)
                row[col[m]] = row[col[m]] + coef
            elif tag is CoefTag.C2:
                const = const + t2s * 8 * vals[m]
            elif tag is CoefTag.BT:
                const = const + t4s * 64 * m2v * vals[m]
            else:
                raise AssertionError("unexpected low-degree quartic term")
        lhs = zero
        for x, y in eq.lhs:
            vx = SurdScalar(1, 0, ssq) if x.is_empty() else vals[x]
            vy = SurdScalar(1, 0, ssq) if y.is_empty() else vals[y]
            lhs = lhs + vx * vy
        rows.append(row)
        rhs.append(lhs - const)
    solution = _solve_surd_linear(rows, rhs, len(unknowns), ssq)
    for m, i in col.items():
        vals[m] = solution[i]
    return vals


# -- Dirac moments ------------------------------------------------------------


def _check_ell(ell: int) -> int:
    ell = int(ell)
    if ell not in DIRAC_INDICES:
        raise ValueError(f"Dirac moment closed forms exist for ell in {DIRAC_INDICES}, got {ell}")
    return ell


def dirac_moment(ell: int, point: CouplingPoint, signature: Signature | None = None) -> SurdScalar:
    """Exact closed form of the normalized Dirac trace power d_ell."""
    del signature
    ell = _check_ell(ell)
    if point.t4 <= 0:
        raise ValueError("dirac_moment needs t4 > 0")
    t2, t4, ssq = point.t2, point.t4, point.ssq
    s = SurdScalar.s(ssq)
    r = lambda x: SurdScalar.rational(x, ssq)
    if ell == 2:
        return (s - r(t2)) / r(4 * t4)
    if ell == 4:
        return (r(t2 * t2 + 4 * t4) - r(t2) * s) / r(8 * t4 * t4)
    num = r(-(t2**3) - 6 * t2 * t4) + (r(t2 * t2) + r(2 * t4)) * s
    return r(19) * num / r(256 * t4**3)


def dirac_from_words(ell: int, point: CouplingPoint) -> SurdScalar:
    """Dirac moments re-derived from word moments via the trace expansion.

    d_2 = 8 m_2 and d_4 = 8 m_4 + 16 m_{2,2} - 8 m_{1,1,1,1} + 32 m_2^2 are
    the leading-order trace expansions of the squared and fourth-power Dirac
    operator; no analogous expansion is implemented for ell = 6.
    """
    ell = int(ell)
    if ell == 2:
        return moment("AA", point) * 8
    if ell == 4:
        m2 = moment("AA", point)
        return (
            moment("AAAA", point) * 8
            + moment("AABB", point) * 16
            - moment("ABAB", point) * 8
            + m2 * m2 * 32
        )
    raise ValueError(f"word expansion implemented for ell in (2, 4), got {ell}")


def rescale_dirac(ell: int, point: CouplingPoint):
    """Evaluate d_ell through the quartic-coupling rescaling identity.

    Returns t4^(-ell/4) * d_ell(t2 / sqrt(t4), 1): exactly (a SurdScalar on
    the same radicand as ``point``) when sqrt(t4) is rational, else as a
    float.  Contract: equals dirac_moment(ell, point).
    """
    ell = _check_ell(ell)
    if point.t4 <= 0:
        raise ValueError("rescale_dirac needs t4 > 0")
    root = rational_sqrt(point.t4)
    if root is not None:
        inner = CouplingPoint(point.t2 / root, 1)
        val = dirac_moment(ell, inner)
        scale = Fraction(1) / root ** (ell // 2)
        # rebase a + b*sqrt(ssq/t4) onto sqrt(ssq)
        return SurdScalar(val.a * scale, val.b * scale / root, point.ssq)
    inner = CouplingPoint(Fraction(point.t2) / Fraction(math.sqrt(float(point.t4))).limit_denominator(10**12), 1)
    approx = dirac_moment(ell, inner).to_float()
    return float(point.t4) ** (-ell / 4) * approx


# -- free energy ---------------------------------------------------------------


def gaussian_free_energy(t2) -> float:
    """Quadratic-ensemble free energy: -5 ln 2 + 2 ln pi - 2 ln t2."""
    t2 = rat(t2)
    if t2 <= 0:
        raise ValueError("gaussian_free_energy needs t2 > 0")
    return -5 * math.log(2) + 2 * math.log(math.pi) - 2 * math.log(float(t2))


def _surd_float(point: CouplingPoint) -> float:
    point.require_real_surd()
    return math.sqrt(float(point.ssq))


def free_energy(point: CouplingPoint) -> float:
    """The published planar free-energy formula, evaluated as printed.

    F = -1/2 + t2/(t2 + s) + ln(pi^2 (t2 + s) / (64 t2^2)).

    Caution: this expression does not satisfy dF/dt4 = -d_4 (its t4
    derivative is +d_4) and its t4 -> 0 limit reproduces the Gaussian free
    energy only at t2 = 1.  ``free_energy_consistent`` is the evaluator that
    satisfies both identities; the two coincide nowhere except by accident.
    """
    t2 = float(point.t2)
    if t2 <= 0:
        raise ValueError("free_energy needs t2 > 0")
    s = _surd_float(point)
    arg = math.pi**2 * (t2 + s) / (64 * t2 * t2)
    if arg <= 0:
        raise ValueError("log argument must be positive")
    return -0.5 + t2 / (t2 + s) + math.log(arg)


def free_energy_consistent(point: CouplingPoint) -> float:
    """Planar free energy integrated from the Gaussian base.

    Defined by F(t2, 0) = gaussian_free_energy(t2) and dF/dt4 = -d_4, which
    integrates in closed form to

        F = -1/2 + s/(t2 + s) + ln(pi^2 / (16 t2 (t2 + s))).
    """
    t2 = float(point.t2)
    if t2 <= 0:
        raise ValueError("free_energy_consistent needs t2 > 0")
    s = _surd_float(point)
    arg = math.pi**2 / (16 * t2 * (t2 + s))
    if arg <= 0:
        raise ValueError("log argument must be positive")
    return -0.5 + s / (t2 + s) + math.log(arg)


def critical_point(t2) -> Fraction:
    """Quartic coupling where the expected cell count diverges: -t2^2 / 8."""
    t2 = rat(t2)
    if t2 <= 0:
        raise ValueError("critical_point needs t2 > 0")
    return -t2 * t2 / 8


# -- criticality ---------------------------------------------------------------


@dataclass(frozen=True)
class SusceptibilityExpansion:
    """Expansion of d_4(t4) / d_4(critical) in powers of (t4 - critical)^(1/2).

    ``terms`` pairs each half-integer exponent with an exact coefficient in
    Q(sqrt(2)); ``gamma`` is the string susceptibility exponent read off the
    leading half-integer power p as gamma = 1 - p.
    """

    t2: Fraction
    terms: tuple       # ((Fraction exponent, SurdScalar coeff in Q(sqrt 2)), ...)
    gamma: Fraction

    def coefficient(self, exponent) -> SurdScalar:
        e = rat(exponent)
        for exp, coeff in self.terms:
            if exp == e:
                return coeff
        raise KeyError(f"no term with exponent {e}")

    def as_json(self) -> dict:
        return {
            "t2": str(self.t2),
            "gamma": str(self.gamma),
            "terms": [
                {"exponent": str(e), **c.as_json()} for e, c in self.terms
            ],
        }


def susceptibility_expansion(t2, num_terms: int = 4) -> SusceptibilityExpansion:
    """Exact expansion of d_4 / d_4(critical) about the critical coupling.

    Writing u = t4 - critical and v = sqrt(u), the surd collapses to
    sqrt(8) v, so the ratio is a rational function of v with coefficients in
    Q(sqrt 2); dividing the two polynomials exactly yields the series.  The
    leading terms at t2 = 1 are 1, -4 sqrt(2) v, 24 v^2, -64 sqrt(2) v^3.
    """
    t2 = rat(t2)
    if t2 <= 0:
        raise ValueError("susceptibility_expansion needs t2 > 0")
    if num_terms < 2:
        raise ValueError("num_terms must be >= 2")
    tc = critical_point(t2)
    two = Fraction(2)
    r = lambda x: SurdScalar.rational(x, two)
    s2 = SurdScalar.s(two)
    zero = r(0)
    # numerator t2^2/2 - 2 sqrt(2) t2 v + 4 v^2, denominator 8 (v^2 + tc)^2 / d4(tc)
    num = [r(t2 * t2 / 2), s2 * (-2 * t2), r(4)] + [zero] * max(0, num_terms - 3)
    den = [r(8 * tc * tc * 4 / (t2 * t2)), zero, r(16 * tc * 4 / (t2 * t2)), zero, r(8 * 4 / (t2 * t2))]
    den += [zero] * max(0, num_terms - len(den))
    inv0 = den[0].inverse()
    series = []
    for k in range(num_terms):
        acc = num[k] if k < len(num) else zero
        for j in range(k):
            acc = acc - series[j] * (den[k - j] if k - j < len(den) else zero)
        series.append(acc * inv0)
    terms = tuple((Fraction(k, 2), series[k]) for k in range(num_terms))
    leading_half = next(
        (e for e, c in terms if e.denominator == 2 and not c.is_zero()), Fraction(1, 2)
    )
    return SusceptibilityExpansion(t2=t2, terms=terms, gamma=1 - leading_half)


# -- exports -------------------------------------------------------------------


def moment_table_rows(point: CouplingPoint):
    """CSV-ready rows (index, degree, a, b, ssq, decimal) of the tabulated moments."""
    yield ("index", "degree", "a", "b", "ssq", "decimal")
    for runs in sorted(_MOMENT_TABLE, key=lambda r: (sum(r), r)):
        c = CanonicalMoment(runs)
        v = moment(c, point)
        yield (c.label(), c.degree, str(v.a), str(v.b), str(v.ssq), v.to_float())


def moment_table_json(point: CouplingPoint) -> list:
    rows = list(moment_table_rows(point))
    header = rows[0]
    return [dict(zip(header, row)) for row in rows[1:]]
