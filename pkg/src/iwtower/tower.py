"""Branched Z_p-cover towers: reduced Alexander element, per-level homology, growth law.

Conventions fixed by comparison with the brute-force oracle:

* Δ_{L,τ} is the order of the one-variable Alexander module of the
  infinite cyclic cover with character τ.  For a knot this is Δ_K(t^v);
  for d >= 2 components it is T·Δ_L(t^{v_1}, ..., t^{v_d}).
* The fast path computes the p-exponent of |H_1(M_n)/image of H_1(M_{n0})|
  as v_p Res(ν_{p^n}/ν_{p^{n0}}, Δ_{L,τ}): the product of Δ_{L,τ}(ζ) over the
  p^n-th roots of unity ζ that are not p^{n0}-th roots (ζ = 1 excluded).
  Here n0 = max v_p(v_i) over branched components; for totally branched
  towers n0 = 0 and the base is S^3 itself.
* Components with v_i = 0 are unbranched; they are dropped from the link
  before Δ is formed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

from .errors import (FitError, HypothesisError, InvalidTauError, OracleBoundError,
                     PrecisionError, SpecError)
from .iwasawa import (INFINITE, LambdaElement, LambdaModuleNF, binom_series,
                      cyclotomic_factor_profile, level_exponent, nf_quotient_order,
                      poly_mul, weierstrass_prepare)
from .links import (LinkPresentation, TauMap, BranchProfile, hosokawa_at_1, linking_matrix,
                    load_link, multivariable_alexander, one_variable_order, parse_pd,
                    sublink_pd, validate_tau)
from .oracle import cyclic_cover_homology
from .padic import is_prime, vp
from .smith import AbelianGroup, p_exponent

DEFAULT_PRECISION_CAP = 1024


def precision_cap() -> int:
    """Upper bound for automatic precision doubling (env IWTOWER_PRECISION_CAP)."""
    raw = os.environ.get("IWTOWER_PRECISION_CAP")
    if raw is None:
        return DEFAULT_PRECISION_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise SpecError(f"IWTOWER_PRECISION_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise SpecError("IWTOWER_PRECISION_CAP must be positive")
    return cap


@dataclass(frozen=True)
class QHSData:
    """A rational homology sphere base given by H_1 invariant factors and a Λ-element (in T)."""

    h1: tuple[int, ...]
    lambda_coeffs: tuple[int, ...]

    def __post_init__(self):
        if any(int(x) == 0 for x in self.h1):
            raise SpecError("base H_1 must be finite for a QHS^3 base")
        if not any(self.lambda_coeffs):
            raise SpecError("base Λ-element must be nonzero")


@dataclass(frozen=True)
class TowerSpec:
    link: LinkPresentation | None
    tau: TauMap
    p: int
    precision: int = 64
    truncation: int | None = None
    n_max: int = 4
    base: str | QHSData = "S3"
    oracle_max: int = 9
    name: str = ""
    raw_tau: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise SpecError(f"p = {self.p} is not prime")
        if self.tau.prime != self.p:
            raise SpecError("tau is over a different prime")
        if self.n_max < 2:
            raise SpecError("n_max must be >= 2")
        if self.precision < 1:
            raise SpecError("precision must be >= 1")
        if self.truncation is not None and self.truncation < 2:
            raise SpecError("truncation must be >= 2")
        if self.base != "S3" and not isinstance(self.base, QHSData):
            raise SpecError("base must be 'S3' or QHS^3 data")
        if self.base == "S3" and self.link is None:
            raise SpecError("a tower over S^3 needs a link")
        if self.link is not None:
            validate_tau(self.link, self.tau)

    @property
    def over_s3(self) -> bool:
        return self.base == "S3"

    @property
    def profile(self) -> BranchProfile:
        if self.link is None:
            return BranchProfile((0,), (), True, 0)
        return validate_tau(self.link, self.tau)

    @property
    def base_level(self) -> int:
        """Level n0 = max v_p(v_i) over branched components; the fast path is relative to M_{n0}."""
        return self.profile.n0

    def default_truncation(self) -> int:
        return self.truncation if self.truncation is not None else self.p**self.n_max + 8

    def at_precision(self, k: int, D: int) -> "TowerSpec":
        """Same tower at precision k and truncation D (τ re-read at the new precision)."""
        if self.raw_tau:
            tau = TauMap.parse(self.raw_tau, self.p, k)
        elif self.tau.is_integral():
            tau = TauMap.parse(self.tau.integers, self.p, k)
        else:
            tau = self.tau
        return replace(self, precision=k, truncation=D, tau=tau)


# --- Δ_{L,τ} ---------------------------------------------------------------------

def branched_sublink(spec: TowerSpec) -> tuple[LinkPresentation, list[int]]:
    prof = spec.profile
    L = spec.link
    if not prof.unbranched:
        return L, list(range(L.d))
    if L.pd_code is None:
        raise SpecError("unbranched components can only be dropped from a PD-coded link")
    keep = list(prof.branched)
    pd, free = sublink_pd(L.pd_code, keep)
    return parse_pd(pd, L.name, free), keep


@lru_cache(maxsize=256)
def _integral_order(pres: LinkPresentation, values: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(one_variable_order(pres, list(values)))


def _series_order(pres: LinkPresentation, values, p: int, k: int, D: int) -> LambdaElement:
    """Δ_L(t^{v_1}, ...) · T^{[d >= 2]} via binomial series for p-adic exponents."""
    poly = multivariable_alexander(pres)
    if not poly:
        return LambdaElement.from_T([0], p, k, D)
    subs = [binom_series(v, D) for v in values]
    kk = min(s.precision for s in subs)
    mod = p**kk
    total = [0] * D
    powers: dict[tuple[int, int], list[int]] = {}

    def power(i, e):
        if (i, e) not in powers:
            powers[i, e] = [1] if e == 0 else poly_mul(power(i, e - 1), subs[i].coeffs, mod, D)
        return powers[i, e]

    for exps, c in sorted(poly.items()):
        term = [int(c) % mod]
        for i, e in enumerate(exps):
            if e:
                term = poly_mul(term, power(i, e), mod, D)
        for i, x in enumerate(term[:D]):
            total[i] = (total[i] + x) % mod
    if pres.d >= 2:
        total = [0] + total[:D - 1]
    # a tail T^D h changes the distinguished part by p^{floor(D/λ)} at most
    nz = [i for i, c in enumerate(total) if c % p]
    if nz and nz[0] > 0:
        mu = min(vp(c, p) for c in total if c)
        kk = min(kk, mu + D // nz[0])
    return LambdaElement.from_T(total, p, max(kk, 1), D)


@lru_cache(maxsize=64)
def reduced_alexander(spec: TowerSpec) -> LambdaElement:
    """Δ_{L,τ} as an element of Z_p[[T]] (or the supplied base Λ-element)."""
    p, k = spec.p, spec.precision
    if not spec.over_s3:
        c = list(spec.base.lambda_coeffs)
        return LambdaElement.from_T(c, p, k, max(len(c), spec.truncation or len(c)))
    pres, keep = branched_sublink(spec)
    if spec.tau.is_integral():
        vals = tuple(spec.tau.integers[i] for i in keep)
        coeffs = list(_integral_order(pres, vals))
        if not any(coeffs):
            return LambdaElement.from_T([0], p, k, 1)
        D = max(len(coeffs), spec.truncation or 0)
        return LambdaElement.from_t(coeffs, p, k, D)
    return _series_order(pres, [spec.tau.values[i] for i in keep], p, k, spec.default_truncation())


def alexander_routes_agree(spec: TowerSpec) -> bool:
    """Cross-check the one-variable order against the multivariable substitution.

    The two agree up to a unit of Λ, so μ and the distinguished polynomial
    are compared.
    """
    if not spec.over_s3 or not spec.tau.is_integral():
        raise SpecError("route cross-check needs an integral character over S^3")
    if any(n < 0 for n in spec.tau.integers):
        raise SpecError("route cross-check needs nonnegative exponents")
    a = reduced_alexander(spec)
    pres, keep = branched_sublink(spec)
    D = max(a.truncation, 8)
    b = _series_order(pres, [spec.tau.values[i] for i in keep], spec.p, spec.precision + 8, D + 8)
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    wa, wb = weierstrass_prepare(a), weierstrass_prepare(b)
    if (wa.mu, wa.lam) != (wb.mu, wb.lam):
        return False
    k = min(wa.precision, wb.precision)
    m = spec.p**k
    return [c % m for c in wa.distinguished.poly()] == [c % m for c in wb.distinguished.poly()]


def _escalating(spec: TowerSpec, fn):
    """Run fn(Δ) and double precision and truncation on indeterminate valuations."""
    cap = precision_cap()
    k, D = spec.precision, spec.default_truncation()
    while True:
        s = spec.at_precision(k, D) if (k, D) != (spec.precision, spec.truncation) else spec
        try:
            f = reduced_alexander(s)
            if f.is_zero():
                return fn(None)
            return fn(f)
        except PrecisionError as exc:
            if 2 * k > cap:
                raise PrecisionError(f"valuation indeterminate at precision {k} (cap {cap}): {exc}") from exc
            k, D = 2 * k, 2 * D


# --- per-level homology -------------------------------------------------------------

def level_order_fast(spec: TowerSpec, n: int) -> int | str:
    """p-exponent of H_1(M_n) modulo the image of the base level, by resultants.

    Returns INFINITE when Δ_{L,τ} shares a factor Φ_{p^j} with j <= n.
    """
    if n < 0:
        raise ValueError("level must be >= 0")
    n0 = spec.base_level
    if n <= n0:
        return 0

    def go(f):
        if f is None:
            return INFINITE
        return level_exponent(f, n, n0)

    return _escalating(spec, go)


@lru_cache(maxsize=256)
def level_homology_oracle(spec: TowerSpec, n: int, bound: int | None = None) -> AbelianGroup:
    """Absolute H_1(M_n) by Reidemeister–Schreier and Smith normal form."""
    if not spec.over_s3:
        raise HypothesisError("the oracle is only available over S^3")
    bound = spec.oracle_max if bound is None else bound
    N = spec.p**n
    if N > bound:
        raise OracleBoundError(f"degree {N} exceeds the oracle bound {bound}")
    return cover_homology(spec, N)


def cover_homology(spec: TowerSpec, degree: int) -> AbelianGroup:
    """H_1 of the cyclic cover of any degree (not only p-powers) for the character τ."""
    vals = [v.residue % degree for v in spec.tau.values]
    if spec.tau.is_integral():
        vals = [x % degree for x in spec.tau.integers]
    return cyclic_cover_homology(spec.link, vals, degree)


def _base_is_qhs(spec: TowerSpec) -> bool:
    if not spec.over_s3:
        return True
    n0 = spec.base_level
    if n0 == 0:
        return True
    try:
        g = level_homology_oracle(spec, n0)
    except OracleBoundError as exc:
        raise HypothesisError(f"cannot decide whether the base level {n0} is a QHS^3: {exc}") from exc
    return g.free_rank == 0


def qhs3_check(spec: TowerSpec, n: int) -> bool:
    """True iff M_n is a rational homology sphere.

    Over S^3 with n0 = 0 this is the absence of Φ_{p^j} factors (j <= n) in
    Δ_{L,τ}; with n0 > 0 the base level M_{n0} is decided by the oracle.
    """
    if not _base_is_qhs(spec):
        return False
    n0 = spec.base_level
    if n <= n0:
        return True

    def go(f):
        if f is None:
            return False
        return not [j for j, _ in cyclotomic_factor_profile(f, spec.p, n) if j > n0]

    return _escalating(spec, go)


@dataclass(frozen=True)
class LadderEntry:
    level: int
    group: AbelianGroup | None  # absolute H_1(M_n), oracle path
    oracle_exponent: int | str | None  # relative to the base level
    fast_exponent: int | str | None
    provenance: tuple[str, ...]

    @property
    def agrees(self) -> bool | None:
        if self.oracle_exponent is None or self.fast_exponent is None:
            return None
        return self.oracle_exponent == self.fast_exponent


@dataclass(frozen=True)
class HomologyLadder:
    prime: int
    base_level: int
    entries: tuple[LadderEntry, ...]

    @property
    def consistent(self) -> bool:
        return all(e.agrees is not False for e in self.entries)

    def exponent(self, n: int) -> int | str | None:
        for e in self.entries:
            if e.level == n:
                return e.fast_exponent if e.fast_exponent is not None else e.oracle_exponent
        return None


def homology_ladder(spec: TowerSpec, levels: int | None = None, oracle_max: int | None = None) -> HomologyLadder:
    """Both paths at levels 1..levels; exponents are relative to the base level."""
    levels = spec.n_max if levels is None else levels
    bound = spec.oracle_max if oracle_max is None else oracle_max
    n0 = spec.base_level
    p = spec.p
    base_exp = None
    entries = []
    for n in range(1, levels + 1):
        prov = []
        group = orel = fast = None
        if spec.over_s3 and p**n <= bound:
            group = level_homology_oracle(spec, n, bound)
            prov.append("oracle")
            e = p_exponent(group, p)
            if n == n0:
                base_exp = e
            if n >= n0:
                if e is None or (n0 and base_exp is None):
                    orel = INFINITE
                else:
                    orel = e - (base_exp or 0)
        if n >= n0:
            try:
                fast = level_order_fast(spec, n) if qhs3_check(spec, n) else INFINITE
                prov.append("resultant")
            except HypothesisError:
                fast = None
        entries.append(LadderEntry(n, group, orel, fast, tuple(prov)))
    return HomologyLadder(p, n0, tuple(entries))


# --- invariants -------------------------------------------------------------------

@dataclass(frozen=True)
class TowerInvariants:
    lam: int
    mu: int
    nu: int
    n0: int  # smallest level from which exponent(n) = λn + μp^n + ν holds
    base_level: int
    qhs3_levels: tuple[bool, ...]
    exponents: tuple[tuple[int, int], ...]

    @property
    def lambda_(self) -> int:
        return self.lam


def iwasawa_invariants(spec: TowerSpec) -> TowerInvariants:
    """(λ, μ) from the Weierstrass data of Δ_{L,τ}; ν by exact fit of fast-path exponents."""
    p, n_max = spec.p, spec.n_max
    qhs = tuple(qhs3_check(spec, n) for n in range(1, n_max + 1))
    if not all(qhs):
        bad = [n for n, ok in enumerate(qhs, 1) if not ok]
        raise HypothesisError(f"M_n is not a QHS^3 at levels {bad}; growth law does not apply")
    n0 = spec.base_level
    wd = _escalating(spec, lambda f: weierstrass_prepare(f))
    lam, mu = wd.lam, wd.mu
    lo = max(n0, 1)
    table = [(n, level_order_fast(spec, n)) for n in range(lo, n_max + 1)]
    resid = [(n, e - lam * n - mu * p**n) for n, e in table]
    nu = resid[-1][1]
    top = resid[-3:] if len(resid) >= 3 else resid
    if len(resid) < 2 or any(r != nu for _, r in top):
        raise FitError(f"exponents do not fit λn + μp^n + ν with (λ, μ) = ({lam}, {mu}) at the top levels",
                       table)
    start = n_max
    for n, r in reversed(resid):
        if r != nu:
            break
        start = n
    return TowerInvariants(lam, mu, nu, start, n0, qhs, tuple(table))


def tln_lambda_shortcut(link: LinkPresentation, p: int):
    """λ = d - 1 (μ = ν = 0) for the TLN tower when p does not divide H_L(1)."""
    if link.d < 2:
        return "inapplicable"
    h = hosokawa_at_1(linking_matrix(link))
    if h % p == 0:
        return "inapplicable"
    return link.d - 1


def sakuma_quotient_check(spec: TowerSpec, n: int) -> dict:
    """Compare the oracle p-exponent at level n with |Λ/(Δ_{L,τ}, ν_{p^n})|."""
    if not spec.over_s3 or spec.base_level != 0:
        raise HypothesisError("the quotient check needs a totally branched tower over S^3")
    group = level_homology_oracle(spec, n)
    lhs = p_exponent(group, spec.p)
    lhs = INFINITE if lhs is None else lhs

    def nf(f):
        if f is None:
            return LambdaModuleNF(spec.p, free_rank=1)
        wd = weierstrass_prepare(f)
        polys = ((wd.distinguished, 1),) if wd.lam else ()
        return LambdaModuleNF(spec.p, 0, polys, (wd.mu,) if wd.mu else ())

    rhs = nf_quotient_order(_escalating(spec, nf), n)
    return {"level": n, "oracle": lhs, "quotient": rhs, "equal": lhs == rhs, "group": str(group)}


# --- files and reports ---------------------------------------------------------------

def load_tower(source, base_dir: Path | None = None, overrides: dict | None = None) -> TowerSpec:
    """Read a tower spec (path, corpus name or decoded JSON); ``overrides`` replace file fields."""
    from .corpus import resolve

    if isinstance(source, (str, Path)):
        path = resolve(str(source), base_dir)
        base_dir = path.parent
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise SpecError("tower file must hold a JSON object")
    data = {**data, **{k: v for k, v in (overrides or {}).items() if v is not None}}
    if str(data.get("schema", "1")) != "1":
        raise SpecError(f"unsupported schema {data.get('schema')!r}")
    try:
        p = int(data["p"])
    except (KeyError, TypeError, ValueError):
        raise SpecError("field 'p' is required and must be an integer") from None
    k = int(data.get("precision", 64))
    base = data.get("base", "S3")
    if base != "S3":
        if not isinstance(base, dict) or "h1" not in base or "lambda_element" not in base:
            raise SpecError("field 'base' must be \"S3\" or {h1, lambda_element}")
        base = QHSData(tuple(int(x) for x in base["h1"]), tuple(int(x) for x in base["lambda_element"]))
    link = None
    if "link" in data:
        link = load_link(data["link"], base_dir)
    elif base == "S3":
        raise SpecError("field 'link' is required over S^3")
    d = link.d if link is not None else 1
    raw = data.get("tau", ["1"] * d)
    if not isinstance(raw, list):
        raise SpecError("field 'tau' must be a list")
    try:
        tau = TauMap.parse(raw, p, k)
    except ValueError as exc:
        raise InvalidTauError(f"field 'tau': {exc}") from exc
    return TowerSpec(
        link=link, tau=tau, p=p, precision=k,
        truncation=int(data["truncation"]) if data.get("truncation") is not None else None,
        n_max=int(data.get("n_max", 4)), base=base,
        oracle_max=int(data.get("oracle_max", 9)), name=str(data.get("name", "")),
        raw_tau=tuple(raw),
    )


def _exp_json(x):
    return x if x is None or isinstance(x, int) else str(x)


def tower_report(spec: TowerSpec, levels: int | None = None, oracle_max: int | None = None) -> dict:
    """Ladder, QHS^3 flags and invariants as a JSON-ready dict."""
    if levels is not None:
        spec = replace(spec, n_max=max(levels, 2))
    levels = spec.n_max
    ladder = homology_ladder(spec, levels, oracle_max)
    delta = _escalating(spec, lambda f: f)
    qhs = []
    for n in range(1, levels + 1):
        try:
            qhs.append(qhs3_check(spec, n))
        except HypothesisError:
            qhs.append(None)
    report = {
        "schema": "1",
        "name": spec.name,
        "p": spec.p,
        "tau": [v.digit_string() if n is None else n
                for v, n in zip(spec.tau.values, spec.tau.integers or (None,) * len(spec.tau.values))],
        "base": "S3" if spec.over_s3 else {"h1": list(spec.base.h1), "lambda_element": list(spec.base.lambda_coeffs)},
        "base_level": spec.base_level,
        "reduced_alexander": str(delta) if delta is not None else "0",
        "ladder": [
            {
                "level": e.level,
                "degree": spec.p**e.level,
                "group": str(e.group) if e.group is not None else None,
                "oracle_exponent": _exp_json(e.oracle_exponent),
                "fast_exponent": _exp_json(e.fast_exponent),
                "provenance": list(e.provenance),
                "agree": e.agrees,
            }
            for e in ladder.entries
        ],
        "qhs3": qhs,
        "paths_agree": ladder.consistent,
    }
    if not all(q is True for q in qhs):
        report["invariants"] = None
        report["note"] = ("some M_n is not a rational homology sphere: Δ_{L,τ} is divisible by a "
                          "p-power cyclotomic polynomial or the base level has infinite H_1, "
                          "so the growth law is not asserted")
    else:
        try:
            inv = iwasawa_invariants(spec)
            report["invariants"] = {"lambda": inv.lam, "mu": inv.mu, "nu": inv.nu, "n0": inv.n0}
        except FitError as exc:
            report["invariants"] = None
            report["note"] = str(exc)
            report["fit_table"] = [[n, _exp_json(e)] for n, e in (exc.table or [])]
    return report
