"""Modelled distributions, paracontrolled systems, model validation, and the
auxiliary negative-homogeneity cross-check structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    BaseSymbol,
    ConcreteRegularityStructure,
    FreeVector,
    PlusMonomial,
    mi_abs,
    mi_factorial,
    mi_range,
    mi_zero,
    term_key,
)
from .blocks import derivative, j_operator, lp_block, make_partition, fourier_multiplier
from .characters import (
    f_character_values,
)
from .grid import Field, Grid
from .norms import (
    NormReport,
    SeparableFamily,
    d_family_report,
    dyadic_separations,
    holder_norm,
    interior_mask,
    two_point_slope,
)
from .models import (
    BracketExtractor,
    Model,
    diag_derivative,
    reconstruct,
    reconstruction_family,
)
from .paraproducts import paraproduct
from .parallel import parallel_map

SLOPE_TOL = 0.2
REL_TOL = 1e-8


# -- check bookkeeping ---------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    value: float | None
    target: float | None
    tol: float | None

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        bits = [f"{self.name} {status}"]
        if self.value is not None:
            bits.append(f"value={self.value:.6g}")
        if self.target is not None:
            bits.append(f"target={self.target:.6g}")
        if self.tol is not None:
            bits.append(f"tol={self.tol:.3g}")
        return " ".join(bits)


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name, passed, value=None, target=None, tol=None):
        self.checks.append(Check(name, bool(passed), value, target, tol))

    def add_slope(self, name, slope, target, tol=SLOPE_TOL, one_sided=True):
        """Norm-membership checks are one-sided: decaying faster than the
        target exponent never violates a C^alpha / D^alpha bound."""
        if slope is None:
            ok = True
        elif one_sided:
            ok = slope >= target - tol
        else:
            ok = abs(slope - target) <= tol
        self.checks.append(Check(name, ok, slope, target, tol))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = [f"# {self.title}"]
        out.extend(c.line() for c in self.checks)
        out.append(f"overall {'pass' if self.ok else 'FAIL'}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


# -- two-point slope estimation -------------------------------------------------

def pair_mask(grid: Grid, steps: int, base: np.ndarray) -> np.ndarray:
    """Pairs (x, x + h) lying entirely in the interior mask."""
    return base & np.roll(base, -steps, axis=0)


def two_point_g_report(model: Model, v, alpha: float,
                       quantile: float = 0.5) -> tuple[float | None, list]:
    """Fitted slope of |g_{yx}(v)| against dyadic separations y - x = h."""
    S, grid = model.structure, model.grid
    base = interior_mask(grid)
    pts = []
    terms = [
        (float(c), model.g_field(left), model.g_inv_field(right))
        for (left, right), c in S.delta_plus(v).sorted_items()
    ]
    for steps in dyadic_separations(grid):
        acc = np.zeros(grid.shape)
        for c, gy, gxi in terms:
            acc += c * np.roll(gy, -steps, axis=0) * gxi
        sel = pair_mask(grid, steps, base)
        vals = np.abs(acc[sel])
        pts.append((steps * grid.step, float(np.quantile(vals, quantile))))
    slope, _ = two_point_slope(pts)
    return slope, pts


def chen_residual(model: Model, rng: np.random.Generator, samples: int = 100) -> float:
    """Relative residual of g_{zy} * g_{yx} = g_{zx} over random triples."""
    S, grid = model.structure, model.grid
    gens = sorted(model.g.values)
    if not gens:
        return 0.0
    idxs = rng.integers(0, grid.n, size=(samples, 3, grid.dim))
    worst = 0.0
    for name in gens:
        mono = PlusMonomial.of_gen(name, S.dim)
        dp = S.delta_plus(mono).sorted_items()
        gv = {m: None for pair, _ in dp for m in pair}
        fields = {}
        for m in gv:
            fields[m] = (model.g_field(m), model.g_inv_field(m))
        scale = max(np.max(np.abs(model.g_field(mono))), 1.0)
        for row in idxs:
            ix, iy, iz = (tuple(r) for r in row)
            def gpair(ia, ib):
                acc = 0.0
                for (left, right), c in dp:
                    acc += float(c) * fields[left][0][ia] * fields[right][1][ib]
                return acc
            # chen: g_{zx} = sum over Delta+ of g_{zy}(left) g_{yx}(right)
            acc = 0.0
            for (left, right), c in dp:
                gzy = _two_point_value(model, left, iz, iy)
                gyx = _two_point_value(model, right, iy, ix)
                acc += float(c) * gzy * gyx
            direct = gpair(iz, ix)
            worst = max(worst, abs(acc - direct) / scale)
    return worst


def _two_point_value(model: Model, v, ia, ib) -> float:
    """g_{yx}(v) at grid indices (ia, ib); v a monomial or FreeVector."""
    if isinstance(v, PlusMonomial):
        v = FreeVector.single(v)
    acc = 0.0
    for mono, c0 in v.sorted_items():
        for (left, right), c in model.structure.delta_plus(mono).sorted_items():
            acc += float(c0 * c) * model.g_field(left)[ia] * model.g_inv_field(right)[ib]
    return acc


# -- model validation ------------------------------------------------------------

def validate_model(model: Model, tol_slope: float = SLOPE_TOL,
                   seed: int = 0, samples: int = 50) -> Report:
    """Conditions (a)-(d) of the model definition plus the character-identity
    cross-checks; (a) and (c) are exact, (b) and (d) are empirical slopes."""
    S, grid = model.structure, model.grid
    rep = Report(f"model check: {S.name}")
    rng = np.random.default_rng(seed)

    # (a) g(X^k) = x^k, g(1+) = 1 (exact)
    ok = True
    for k in mi_range(S.dim, 2):
        want = grid.poly(k)
        got = np.broadcast_to(np.asarray(model.g(PlusMonomial.of_poly(k)), dtype=float), grid.shape)
        ok &= np.array_equal(want, got)
    rep.add("a:polynomial-character", ok)

    # (c) Pi(X_^k sigma) = x^k Pi(sigma), Pi(1) = 1 (exact)
    ok = bool(np.array_equal(model.pi["1"], np.ones(grid.shape)))
    for name in sorted(model.pi):
        for k in mi_range(S.dim, 1):
            sym = BaseSymbol(name, k)
            ok &= np.array_equal(model.pi_symbol(sym), grid.poly(k) * model.pi[name])
    rep.add("c:polynomial-action", ok)

    # (b) two-point slopes on the plus-generators (parallel over generators)
    gen_names = sorted(model.g.values, key=lambda n: (S.plus_gens[n], n))

    def _b_check(name):
        h = float(S.plus_gens[name])
        vals = model.g_field(PlusMonomial.of_gen(name, S.dim))
        slope, _ = two_point_g_report(model, PlusMonomial.of_gen(name, S.dim), h)
        return name, bool(np.all(np.isfinite(vals))), slope, h

    for name, finite, slope, h in parallel_map(_b_check, gen_names):
        rep.add("b:finite:" + name, finite)
        rep.add_slope("b:two-point:" + name, slope, h, tol_slope)

    # (d) D-family slopes on the base generators (parallel over generators)
    mask = interior_mask(grid)
    base_names = sorted((n for n in model.pi if n != "1"),
                        key=lambda n: (S.base_gens[n], n))

    def _d_check(name):
        h = float(S.base_gens[name])
        fam = model.pi_recentered_family(BaseSymbol(name, mi_zero(S.dim)))
        return name, d_family_report(fam, h, mask=mask).slope, h

    for name, slope, h in parallel_map(_d_check, base_names):
        rep.add_slope("d:family:" + name, slope, h, tol_slope)

    # Chen relation on random triples
    res = chen_residual(model, rng, samples=min(samples, 100))
    rep.add("chen-relation", res <= REL_TOL, res, 0.0, REL_TOL)

    # Lemma identities (exact rearrangements -> tight tolerance)
    res1 = lemma_gx_fx_residual(model)
    rep.add("identity:g_x-and-f_x", res1 <= 1e-6, res1, 0.0, 1e-6)
    res2 = lemma_gyx_f_residual(model, rng, samples=samples)
    rep.add("identity:g_yx-and-f", res2 <= 1e-6, res2, 0.0, 1e-6)
    res3 = third_formula_residual(model)
    rep.add("identity:diagonal-derivative", res3 <= 1e-5, res3, 0.0, 1e-5)
    return rep


def _d_symbol_vectors(S: ConcreteRegularityStructure, mono: PlusMonomial):
    """Nonzero D^k mono for all admissible k, as (k, FreeVector) pairs."""
    h = S.homog_plus(mono)
    max_k = int(h) if h != int(h) else int(h) - 1
    out = []
    for k in mi_range(S.dim, max(max_k, 0)):
        dk = S.d_op(k, mono)
        if dk:
            out.append((k, dk))
    return out


def lemma_gx_fx_residual(model: Model) -> float:
    """max relative residual of g_x(D^k tau) = sum_{sigma <= tau, sigma not
    poly} g_x(tau/sigma) f_x(D^k sigma) over built generators."""
    S = model.structure
    g, g_inv = model.g, model.g_inv
    worst = 0.0
    for name in sorted(model.g.values):
        mono = PlusMonomial.of_gen(name, S.dim)
        for k, dk in _d_symbol_vectors(S, mono):
            lhs = np.asarray(g(dk), dtype=float)
            rhs = np.zeros(model.grid.shape)
            for (left, right), c in S.delta_plus(mono).sorted_items():
                if left.is_poly:
                    continue
                dk_left = S.d_op(k, left)
                if not dk_left:
                    continue
                f_val = np.asarray(
                    f_character_values(g, g_inv, dk_left), dtype=float
                )
                rhs += float(c) * model.g_field(right) * f_val
            scale = max(float(np.max(np.abs(lhs))), 1.0)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))) / scale)
    return worst


def lemma_gyx_f_residual(model: Model, rng: np.random.Generator, samples: int = 50) -> float:
    """Residual of the two-point identity g_{yx}(D^k tau) =
    sum g_{yx}(tau/sigma) f_y(D^k sigma) - sum_l (y-x)^l / l! f_x(D^{k+l} tau)."""
    S, grid = model.structure, model.grid
    g, g_inv = model.g, model.g_inv
    worst = 0.0
    pairs = rng.integers(0, grid.n, size=(samples, 2, grid.dim))
    for name in sorted(model.g.values):
        mono = PlusMonomial.of_gen(name, S.dim)
        h = S.plus_gens[name]
        for k, dk in _d_symbol_vectors(S, mono):
            f_fields = {}
            max_l = int(h) - mi_abs(k) if h == int(h) else int(math.floor(h - mi_abs(k)))
            for l in mi_range(S.dim, max(max_l, 0)):
                dkl = S.d_op(tuple(a + b for a, b in zip(k, l)), mono)
                f_fields[l] = np.asarray(
                    f_character_values(g, g_inv, dkl), dtype=float
                ) if dkl else np.zeros(grid.shape)
            sigma_data = []
            for (left, right), c in S.delta_plus(mono).sorted_items():
                if left.is_poly:
                    continue
                dk_left = S.d_op(k, left)
                if not dk_left:
                    continue
                sigma_data.append(
                    (float(c), left, right,
                     np.asarray(f_character_values(g, g_inv, dk_left), dtype=float))
                )
            scale = max(float(np.max(np.abs(np.asarray(g(dk), dtype=float)))), 1.0)
            for row in pairs:
                iy, ix = tuple(row[0]), tuple(row[1])
                lhs = _two_point_value(model, dk, iy, ix)
                rhs = 0.0
                for c, left, right, f_y in sigma_data:
                    gyx = _two_point_value(model, right, iy, ix)
                    rhs += c * gyx * f_y[iy]
                diff = np.array([
                    model.g.point[i][iy] - model.g.point[i][ix] for i in range(S.dim)
                ])
                for l, f_x in f_fields.items():
                    coef = 1.0
                    for d_, li in zip(diff, l):
                        coef *= d_**li
                    rhs -= coef / mi_factorial(l) * f_x[ix]
                worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def third_formula_residual(model: Model) -> float:
    """Residual of f_x(D^k tau) = d_y^k { sum_{sigma<=tau, sigma not poly}
    g_x^{-1}(tau/sigma) g_y(sigma) } |_{y=x} over the interior."""
    S, grid = model.structure, model.grid
    g, g_inv = model.g, model.g_inv
    mask = interior_mask(grid)
    worst = 0.0
    for name in sorted(model.g.values):
        mono = PlusMonomial.of_gen(name, S.dim)
        for k, dk in _d_symbol_vectors(S, mono):
            lhs = np.asarray(f_character_values(g, g_inv, dk), dtype=float)
            lhs = np.broadcast_to(lhs, grid.shape)
            rhs = np.zeros(grid.shape)
            for (left, right), c in S.delta_plus(mono).sorted_items():
                if left.is_poly:
                    continue
                rhs += float(c) * model.g_inv_field(right) * diag_derivative(model, left, k)
            scale = max(float(np.max(np.abs(lhs[mask]))), 1.0)
            worst = max(worst, float(np.max(np.abs((lhs - rhs)[mask]))) / scale)
    return worst


# -- modelled distributions --------------------------------------------------------

@dataclass
class ModelledDistribution:
    """T-valued function: coefficients on basis symbols of homogeneity < gamma."""

    structure: ConcreteRegularityStructure
    grid: Grid
    gamma: Fraction
    coeffs: dict[BaseSymbol, np.ndarray]

    def coeff(self, sym: BaseSymbol) -> np.ndarray:
        return self.coeffs.get(sym, np.zeros(self.grid.shape))


@dataclass
class ParacontrolledSystem:
    """Bracket coordinates of a modelled distribution: <f_sigma>^g per symbol,
    plus the reconstruction bracket <f>^M."""

    structure: ConcreteRegularityStructure
    grid: Grid
    gamma: Fraction
    brackets: dict[BaseSymbol, np.ndarray]
    reconstruction_bracket: np.ndarray | None = None
    reports: dict[str, NormReport] = field(default_factory=dict)


def _quotient_in_plus_span(S: ConcreteRegularityStructure, quot: FreeVector) -> bool:
    """True if the quotient lies in span(B+ \\ B_X^+); False if in T_X^+.
    Mixed quotients violate assumption (B)."""
    kinds = {mono.is_poly for mono, _ in quot.items()}
    if len(kinds) > 1:
        raise ValueError(f"quotient {quot} mixes T_X^+ and span(B+ - B_X^+): assumption (B) fails")
    return kinds == {False}


def md_to_paracontrolled(model: Model, md: ModelledDistribution,
                         m: int = 0, with_reports: bool = True) -> ParacontrolledSystem:
    """Paracontrolled representation of a modelled distribution:
    <f_sigma>^g = f_sigma - sum_{sigma < mu} P_{f_mu} <mu/sigma>^g
    (descending homogeneity), and <f>^M = Rf - sum_sigma P_{f_sigma} <sigma>^M."""
    S, grid = model.structure, model.grid
    gamma = md.gamma
    decomp = make_partition(grid)
    ex = BracketExtractor(model, m)
    symbols = [s for s in S.base_symbols(gamma)]
    order = sorted(symbols, key=lambda s: (S.homog_base(s), term_key(s)), reverse=True)
    out: dict[BaseSymbol, np.ndarray] = {}
    for sigma in order:
        acc = md.coeff(sigma).copy()
        for mu in symbols:
            if mu == sigma:
                continue
            quot = S.quotient_base(mu, sigma)
            if not quot or not _quotient_in_plus_span(S, quot):
                continue
            inner = Field(grid, ex.g_bracket_vector(quot))
            acc -= paraproduct(decomp, Field(grid, md.coeff(mu)), inner).values
        out[sigma] = acc
    rf = reconstruct(model, md.coeffs, gamma)
    rec = rf.values.copy()
    for sigma in symbols:
        if sigma.is_poly:
            continue
        inner = Field(grid, ex.pi_bracket(sigma))
        rec -= paraproduct(decomp, Field(grid, md.coeff(sigma)), inner).values
    system = ParacontrolledSystem(S, grid, gamma, out, rec)
    if with_reports:
        mask = interior_mask(grid)
        for sigma, vals in out.items():
            target = float(gamma - S.homog_base(sigma))
            system.reports[f"f:{sigma}"] = holder_norm(Field(grid, vals), target, mask=mask)
        system.reports["reconstruction"] = holder_norm(Field(grid, rec), float(gamma), mask=mask)
    return system


class StructureConditionError(ValueError):
    def __init__(self, sym, k, residual, tol):
        self.sym, self.k, self.residual = sym, k, residual
        super().__init__(
            f"structure condition fails at tau={sym}, k={k}: residual {residual:.3e} > {tol:.3e}"
        )


def md_from_paracontrolled(model: Model, brackets: dict[BaseSymbol, np.ndarray],
                           gamma, mode: str = "auto",
                           tol: float = 1e-6) -> ModelledDistribution:
    """Modelled distribution from bracket data.

    general mode: brackets indexed by all of B below gamma; coefficients by
    the descending bracket recursion; the structure condition is verified and
    violations raise StructureConditionError carrying the worst (tau, k).

    (D) mode: brackets indexed by B. only; polynomial-decorated coefficients
    are defined directly by the diagonal-derivative formula (with the 1/k!
    normalisation forced by D^k F_tau = k! F_{X^k tau}).
    """
    S, grid = model.structure, model.grid
    gamma = Fraction(gamma)
    symbols = S.base_symbols(gamma)
    if mode == "auto":
        core_only = all(not any(s.poly) for s in brackets)
        mode = "d" if core_only and S.check_assumptions().d_ok else "general"
    ex = BracketExtractor(model, 0)
    decomp = make_partition(grid)
    coeffs: dict[BaseSymbol, np.ndarray] = {}

    def bracket_recursion(sigma: BaseSymbol) -> np.ndarray:
        acc = np.asarray(
            brackets[sigma].values if isinstance(brackets[sigma], Field) else brackets[sigma],
            dtype=float,
        ).copy()
        for mu in symbols:
            if mu == sigma:
                continue
            quot = S.quotient_base(mu, sigma)
            if not quot or not _quotient_in_plus_span(S, quot):
                continue
            inner = Field(grid, ex.g_bracket_vector(quot))
            acc += paraproduct(decomp, Field(grid, compute(mu)), inner).values
        return acc

    def derivative_formula(sigma: BaseSymbol) -> np.ndarray:
        # EqSimpleStructureCondition with the 1/k! normalisation
        core = BaseSymbol(sigma.core, mi_zero(S.dim))
        k = sigma.poly
        vals = _md_diagonal_derivative(model, S, symbols, compute, core, k, gamma)
        return vals / mi_factorial(k)

    computing: set[BaseSymbol] = set()

    def compute(sigma: BaseSymbol) -> np.ndarray:
        if sigma in coeffs:
            return coeffs[sigma]
        if sigma in computing:
            raise RuntimeError(f"cyclic dependency at {sigma}")
        computing.add(sigma)
        if mode == "general" or not any(sigma.poly):
            vals = bracket_recursion(sigma)
        else:
            vals = derivative_formula(sigma)
        computing.discard(sigma)
        coeffs[sigma] = vals
        return vals

    if mode == "general":
        missing = [s for s in symbols if s not in brackets]
    else:
        missing = [s for s in symbols if not any(s.poly) and s not in brackets]
    if missing:
        raise ValueError(f"missing md brackets for: {[str(s) for s in missing]}")
    for s in symbols:
        compute(s)
    md = ModelledDistribution(S, grid, gamma, coeffs)
    if mode == "general":
        _check_structure_condition(model, md, tol)
    return md


def _md_diagonal_derivative(model, S, symbols, coeff_of, tau: BaseSymbol, k, gamma) -> np.ndarray:
    """d_y^k { f_tau(y) - sum_{tau<mu, mu/tau not in T_X, |mu/tau|<=|k|}
    g_{yx}(mu/tau) f_mu(x) } |_{y=x}, all derivatives spectral."""
    grid = model.grid
    f_tau = Field(grid, coeff_of(tau))
    vals = derivative(f_tau, k).values.copy()
    for mu in symbols:
        if mu == tau:
            continue
        quot = S.quotient_base(mu, tau)
        if not quot or not _quotient_in_plus_span(S, quot):
            continue
        if S.homog_base(mu) - S.homog_base(tau) > mi_abs(k):
            continue
        # d^k_y g_{yx}(quot) |_{y=x} expanded over Delta+ of each monomial
        dk_two_point = np.zeros(grid.shape)
        for mono, c in quot.sorted_items():
            for (a, b), c2 in S.delta_plus(mono).sorted_items():
                dk_two_point += float(c * c2) * diag_derivative(model, a, k) * \
                    model.g_inv_field(b)
        vals -= dk_two_point * coeff_of(mu)
    return vals


def _check_structure_condition(model: Model, md: ModelledDistribution, tol: float) -> None:
    S, grid = model.structure, md.grid
    gamma = md.gamma
    symbols = S.base_symbols(gamma)
    worst = None
    for tau in symbols:
        h = S.homog_base(tau)
        max_k = gamma - h
        kmax = int(max_k) if max_k != int(max_k) else int(max_k) - 1
        for k in mi_range(S.dim, max(kmax, 0)):
            if not any(k) or h + mi_abs(k) >= gamma:
                continue
            lhs = _md_diagonal_derivative(model, S, symbols, md.coeff, tau, k, gamma)
            rhs = np.zeros(grid.shape)
            for mu in symbols:
                quot = S.quotient_base(mu, tau)
                if not quot or _quotient_in_plus_span(S, quot):
                    continue
                c = quot.coeff(PlusMonomial.of_poly(k)) * mi_factorial(k)
                if c:
                    rhs += float(c) * md.coeff(mu)
            mask = interior_mask(grid)
            scale = max(float(np.max(np.abs(md.coeff(tau)))), 1.0)
            res = float(np.max(np.abs((lhs - rhs)[mask]))) / scale
            if worst is None or res > worst[2]:
                worst = (tau, k, res)
    if worst is not None and worst[2] > tol:
        raise StructureConditionError(worst[0], worst[1], worst[2], tol)


def validate_md(model: Model, md: ModelledDistribution,
                tol_slope: float = SLOPE_TOL, quantile: float = 0.5) -> Report:
    """Two-point checks <tau', f(y) - g_hat_{yx} f(x)> ~ |y-x|^{gamma-|tau|}."""
    S, grid = model.structure, model.grid
    rep = Report(f"modelled distribution gamma={md.gamma}")
    base = interior_mask(grid)
    symbols = S.base_symbols(md.gamma)
    for tau in symbols:
        target = float(md.gamma - S.homog_base(tau))
        terms = []
        for mu in symbols:
            quot = S.quotient_base(mu, tau)
            if not quot:
                continue
            for mono, c in quot.sorted_items():
                for (a, b), c2 in S.delta_plus(mono).sorted_items():
                    terms.append(
                        (float(c * c2), model.g_field(a), model.g_inv_field(b), md.coeff(mu))
                    )
        pts = []
        for steps in dyadic_separations(grid):
            acc = np.roll(md.coeff(tau), -steps, axis=0).copy()
            for c, ga, gb, fmu in terms:
                acc -= c * np.roll(ga, -steps, axis=0) * gb * fmu
            sel = pair_mask(grid, steps, base)
            pts.append((steps * grid.step, float(np.quantile(np.abs(acc[sel]), quantile))))
        slope, _ = two_point_slope(pts)
        rep.add_slope(f"md:two-point:{tau}", slope, target, tol_slope)
    return rep


def reconstruction_report(model: Model, md: ModelledDistribution) -> NormReport:
    """D^gamma check of the family x -> Rf - Pi^g_x f(x)."""
    rf = reconstruct(model, md.coeffs, md.gamma)
    fam = reconstruction_family(model, md.coeffs)
    ones = np.ones(model.grid.shape)
    resid = SeparableFamily(
        model.grid, [(ones, rf.values)] + [(-c, u) for c, u in fam.terms]
    )
    return d_family_report(resid, float(md.gamma), mask=interior_mask(model.grid))


# -- the T^m(tau) auxiliary structure and J-operator cross-checks ---------------------

def lambda_cross_check(model: Model, root: str, m: int | None = None,
                       tol_agree: float = 1e-5, tol_slope: float = 0.3) -> Report:
    """Builds the negative-homogeneity structure on symbols sigma^{(m)},
    the model (g, Lambda) with Lambda(sigma^{(m)}) = |grad|^m g(sigma), and
    cross-checks the two computations of f_x(D^k sigma) plus the decay bounds."""
    S, grid = model.structure, model.grid
    if root not in S.plus_gens:
        raise KeyError(f"unknown generator {root}")
    h_root = S.plus_gens[root]
    if m is None:
        m = int(math.ceil(h_root)) + 1
    if m <= h_root:
        raise ValueError(f"need m > |tau| = {h_root}, got {m}")
    rep = Report(f"lambda/J cross-check at {root}, m={m}")
    decomp = make_partition(grid)
    mask = interior_mask(grid)

    # symbols sigma^(m): monomials below |root| together with root itself
    monos = [
        mo for mo in S.plus_monomials(h_root)
        if not mo.is_poly and all(n in model.g.values for n, _ in mo.gens)
    ]
    monos.append(PlusMonomial.of_gen(root, S.dim))

    # delta coassociativity of the auxiliary coproduct (exact)
    defect = _delta_aux_coassoc_defect(S, monos)
    rep.add("delta-coassociativity", not defect, float(len(defect)), 0.0, None)

    lam_fields = {mo: fourier_multiplier(m, Field(grid, model.g_field(mo))) for mo in monos}

    for mo in monos:
        h_sigma = S.homog_plus(mo)
        max_k = int(h_sigma) if h_sigma != int(h_sigma) else int(h_sigma) - 1
        for k in mi_range(S.dim, max(max_k, 0)):
            dk = S.d_op(k, mo)
            if not dk and any(k):
                continue
            # (i) direct projection formula
            direct = np.broadcast_to(np.asarray(
                f_character_values(model.g, model.g_inv, dk), dtype=float
            ), grid.shape)
            # (ii) sum of J-operators on the recentered family
            terms = []
            for (left, right), c in S.delta_plus(mo).sorted_items():
                if left.is_poly or left not in lam_fields:
                    continue
                terms.append((float(c), left, right))
            acc = np.zeros(grid.shape)
            per_j = []
            for j in decomp.js:
                vals = np.zeros(grid.shape)
                for c, left, right in terms:
                    jop = j_operator(decomp, j, k, m, lam_fields[left])
                    vals += c * model.g_inv_field(right) * jop.values
                acc += vals
                per_j.append(vals)
            scale = max(float(np.max(np.abs(direct[mask]))), 1e-8)
            res = float(np.max(np.abs((acc - direct)[mask]))) / scale
            rep.add(f"agreement:{mo}:k={k}", res <= tol_agree, res, 0.0, tol_agree)
            # first decay bound: |J_j(Lambda_x sigma^{(m)})(x)| <~ 2^{-j(|sigma|-|k|)}
            target = float(h_sigma - mi_abs(k))
            qs = np.zeros(decomp.j_max + 2)
            for j in range(1, decomp.j_max + 1):
                qs[j + 1] = np.quantile(np.abs(per_j[j + 1][mask]), 0.5)
            from .norms import report_from_block_norms

            drep = report_from_block_norms(
                qs, target, 0.0, (2, decomp.j_max - 2), decomp, fit_series=qs
            )
            rep.add_slope(f"decay:{mo}:k={k}", drep.slope, target, tol_slope)
    return rep


def _delta_aux_coassoc_defect(S: ConcreteRegularityStructure, monos) -> FreeVector:
    """(delta (x) Id) delta - (Id (x) Delta+) delta on the auxiliary symbols:
    delta(sigma^{(m)}) = sum_{mu <= sigma, mu not poly} mu^{(m)} (x) sigma/mu."""
    lhs: list = []
    rhs: list = []
    allowed = set(monos)
    for mo in monos:
        for (mu, quot1), c in S.delta_plus(mo).items():
            if mu.is_poly or mu not in allowed:
                continue
            for (nu, quot2), c2 in S.delta_plus(mu).items():
                if nu.is_poly or nu not in allowed:
                    continue
                lhs.append(((mo, nu, quot2, quot1), c * c2))
            for (a, b), c2 in S.delta_plus(quot1).items():
                rhs.append(((mo, mu, a, b), c * c2))
    return FreeVector(lhs) - FreeVector(rhs)
