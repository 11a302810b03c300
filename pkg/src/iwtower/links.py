"""Link presentations, Fox calculus and classical link invariants.

Diagrams are PD codes: each crossing is ``[i, j, k, l]`` listing edge labels
counterclockwise starting from the incoming under-edge ``i``.  A crossing is
positive when the over-strand runs from ``l`` to ``j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import sympy
from sympy.polys.matrices import DomainMatrix

from .errors import DegreeCapError, InvalidTauError, LinkParseError
from .padic import PAdicInt, parse_padic
from .smith import det

# A Laurent polynomial in t_1..t_d is a dict {exponent tuple: coefficient}.
Laurent = dict

DEGREE_CAP_GENERATORS = 16


def _l_add(a: Laurent, b: Laurent, scale: int = 1) -> Laurent:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + scale * c
        if out[e] == 0:
            del out[e]
    return out


@dataclass(frozen=True)
class LinkPresentation:
    name: str
    component_count: int
    generators: tuple[int, ...]  # component (0-based) of each Wirtinger generator
    relators: tuple[tuple[tuple[int, int], ...], ...]  # words of (generator, ±1)
    pd_code: tuple[tuple[int, int, int, int], ...] | None = None
    crossings: tuple[tuple[int, int, int, int], ...] = ()  # (over, in, out, sign) per crossing
    generator_names: tuple[str, ...] = ()
    component_names: tuple[str, ...] = ()
    linking_override: tuple[tuple[int, ...], ...] | None = None
    alexander_override: tuple[tuple[tuple[int, ...], int], ...] | None = None

    def __post_init__(self):
        d = self.component_count
        if d < 1:
            raise LinkParseError("a link needs at least one component")
        if any(not 0 <= c < d for c in self.generators):
            raise LinkParseError("generator component label out of range")
        if set(self.generators) != set(range(d)):
            raise LinkParseError("every component needs at least one generator")
        for r in self.relators:
            sums = [0] * d
            for g, e in r:
                if not 0 <= g < len(self.generators) or e not in (1, -1):
                    raise LinkParseError("relator uses an unknown generator")
                sums[self.generators[g]] += e
            if any(sums):
                raise LinkParseError("relator is not trivial in the abelianization")

    @property
    def d(self) -> int:
        return self.component_count

    def names(self) -> list[str]:
        if self.component_names:
            return list(self.component_names)
        return [f"K{i + 1}" for i in range(self.d)]


# --- PD codes -----------------------------------------------------------------

def _pd_components(pd: Sequence[Sequence[int]]):
    """Trace and orient components.

    Returns ``(comp_of, orders, leaving)``: the component of each edge, the
    oriented edge cycle of each component, and the set of crossing slots
    ``(crossing, position)`` through which the oriented strand leaves an edge.
    Orientation comes from under-passes (i -> k); components that are never
    under follow increasing edge labels.
    """
    where: dict[int, list[tuple[int, int]]] = {}
    for ci, x in enumerate(pd):
        if len(x) != 4:
            raise LinkParseError(f"crossing {ci} does not have 4 entries")
        for pos, e in enumerate(x):
            where.setdefault(e, []).append((ci, pos))
    for e, occ in sorted(where.items()):
        if len(occ) != 2:
            raise LinkParseError(f"arc {e} appears {len(occ)} times (expected 2)")

    comp_of: dict[int, int] = {}
    orders: list[list[int]] = []
    leaving: set[tuple[int, int]] = set()
    for start in sorted(where):
        if start in comp_of:
            continue
        comp = len(orders)
        seq, slots = [], []
        e, out = start, where[start][1]
        while True:
            comp_of[e] = comp
            seq.append(e)
            slots.append(out)
            ci, pos = out
            arrive = (ci, (pos + 2) % 4)
            e = pd[ci][arrive[1]]
            occ = where[e]
            out = occ[1] if occ[0] == arrive else occ[0]
            if e == start and out == where[start][1]:
                break
            if len(seq) > 4 * len(pd):
                raise LinkParseError("could not trace a component")
        # orientation
        fwd = {s for s in slots}
        back = {(ci, (pos + 2) % 4) for ci, pos in slots}
        votes = set()
        for ci, x in enumerate(pd):
            if comp_of.get(x[0]) != comp:
                continue
            if (ci, 0) in fwd:
                votes.add(True)
            if (ci, 2) in fwd:
                votes.add(False)
        if len(votes) > 1:
            raise LinkParseError(f"inconsistent orientation on component {comp + 1}")
        if votes:
            forward = votes.pop()
        else:
            n = len(seq)
            i0 = seq.index(min(seq))
            forward = n < 2 or seq[(i0 + 1) % n] > seq[(i0 - 1) % n]
        if forward:
            leaving |= fwd
            orders.append(seq)
        else:
            leaving |= back
            orders.append([seq[0]] + list(reversed(seq[1:])))
    return comp_of, orders, leaving


def crossing_sign(ci: int, leaving: set) -> int:
    """+1 when the over-strand runs from position 3 to position 1."""
    return 1 if (ci, 3) in leaving else -1


def parse_pd(pd: Sequence[Sequence[int]], name: str = "", extra_components: int = 0,
             component_names: Sequence[str] = ()) -> LinkPresentation:
    """Wirtinger presentation of a PD code (one generator per arc, one relator per crossing).

    ``extra_components`` adds split unknotted components without crossings;
    an empty code with no extra components is the unknot.
    """
    pd = [tuple(int(e) for e in x) for x in pd]
    if not pd:
        n = max(1, extra_components)
        return LinkPresentation(name, n, tuple(range(n)), (), pd_code=(), component_names=tuple(component_names))
    comp_of, orders, leaving = _pd_components(pd)
    # arcs: union over-strand edges j and l
    parent = {e: e for e in comp_of}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for x in pd:
        parent[find(x[1])] = find(x[3])
    roots = []
    for seq in orders:
        for e in seq:
            r = find(e)
            if r not in roots:
                roots.append(r)
    arc = {e: roots.index(find(e)) for e in comp_of}
    gens = [comp_of[roots[a]] for a in range(len(roots))]
    crossings, relators = [], []
    for ci, x in enumerate(pd):
        s = crossing_sign(ci, leaving)
        o, a, b = arc[x[1]], arc[x[0]], arc[x[2]]
        crossings.append((o, a, b, s))
        # x_b = x_o^s x_a x_o^-s
        relators.append(((o, s), (a, 1), (o, -s), (b, -1)))
    d = len(orders)
    for _ in range(extra_components):
        gens.append(d)
        d += 1
    return LinkPresentation(name, d, tuple(gens), tuple(tuple(r) for r in relators), tuple(pd),
                            tuple(crossings), component_names=tuple(component_names))


def braid_closure_pd(word: Sequence[int], strands: int) -> tuple[list[list[int]], int]:
    """PD code of a braid closure; σ_i is ``i`` (left strand over), σ_i^-1 is ``-i``.

    Edge labels are consecutive along each component.  Returns the code and
    the number of crossingless components (strands never touched).
    """
    nxt_label = strands
    pos_edge = list(range(strands))  # current edge at each position
    start_edge = list(range(strands))
    succ: dict[int, int] = {}
    raw = []
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < strands - 1:
            raise LinkParseError(f"braid generator {g} out of range")
        a, b = pos_edge[i], pos_edge[i + 1]
        a2, b2 = nxt_label, nxt_label + 1
        nxt_label += 2
        succ[a], succ[b] = a2, b2
        if g > 0:
            raw.append([b, a2, b2, a])  # left strand (a -> a2) over
        else:
            raw.append([a, b, a2, b2])
        pos_edge[i], pos_edge[i + 1] = b2, a2
    # closure: identify the final edge at each position with the starting edge
    alias = {}
    for q in range(strands):
        alias[pos_edge[q]] = start_edge[q]

    def canon(e):
        seen = 0
        while e in alias and alias[e] != e and seen < 10**6:
            e = alias[e]
            seen += 1
        return e

    succ2 = {}
    for e, f in succ.items():
        succ2[canon(e)] = canon(f)
    raw = [[canon(e) for e in x] for x in raw]
    used = {e for x in raw for e in x}
    # relabel consecutively along components
    label, done = {}, set()
    counter = 1
    free = 0
    for s in range(strands):
        e = canon(start_edge[s])
        if e in done:
            continue
        if e not in used:
            free += 1
            done.add(e)
            continue
        while e not in done:
            done.add(e)
            label[e] = counter
            counter += 1
            e = succ2[e]
    return [[label[e] for e in x] for x in raw], free


def mirror_pd(pd: Sequence[Sequence[int]]) -> list[list[int]]:
    """Swap over and under at every crossing, keeping orientation."""
    _, _, leaving = _pd_components(pd)
    out = []
    for ci, x in enumerate(pd):
        i, j, k, l = x
        if (ci, 3) in leaving:
            out.append([l, i, j, k])
        else:
            out.append([j, k, l, i])
    return out


def sublink_pd(pd: Sequence[Sequence[int]], keep: Sequence[int]) -> tuple[list[list[int]], int]:
    """Delete the components not in ``keep`` (0-based, PD component order).

    Returns the reduced code and the number of kept components left without
    crossings.
    """
    comp_of, orders, _ = _pd_components(pd)
    keep = set(keep)
    parent = {e: e for e in comp_of}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    kept = []
    for x in pd:
        cu, co = comp_of[x[0]], comp_of[x[1]]
        if cu in keep and co in keep:
            kept.append(list(x))
        elif cu in keep:
            parent[find(x[2])] = find(x[0])
        elif co in keep:
            parent[find(x[3])] = find(x[1])
    x2 = [[find(e) for e in x] for x in kept]
    used = {e for x in x2 for e in x}
    label, counter = {}, 1
    for c, seq in enumerate(orders):
        if c not in keep:
            continue
        for e in seq:
            r = find(e)
            if r in used and r not in label:
                label[r] = counter
                counter += 1
    free = sum(1 for c in keep if not any(find(e) in used for e in orders[c]))
    return [[label[e] for e in x] for x in x2], free


# --- Wirtinger word input ---------------------------------------------------------

def parse_wirtinger(gens: Sequence[dict], relators: Sequence[str], name: str = "",
                    component_names: Sequence[str] = ()) -> LinkPresentation:
    ids = [str(g["id"]) for g in gens]
    if any(not i.islower() for i in ids):
        raise LinkParseError("generator ids must be lowercase (uppercase marks inverses)")
    if len(set(ids)) != len(ids):
        raise LinkParseError("duplicate generator id")
    comps = sorted({int(g["component"]) for g in gens})
    cmap = {c: i for i, c in enumerate(comps)}
    words = []
    for r in relators:
        w = []
        for tok in str(r).split():
            if tok in ids:
                w.append((ids.index(tok), 1))
            elif tok.lower() in ids and tok.isupper():
                w.append((ids.index(tok.lower()), -1))
            else:
                raise LinkParseError(f"unknown generator {tok!r} in relator {r!r}")
        words.append(tuple(w))
    return LinkPresentation(name, len(comps), tuple(cmap[int(g["component"])] for g in gens),
                            tuple(words), generator_names=tuple(ids),
                            component_names=tuple(component_names))


# --- Fox calculus ---------------------------------------------------------------

@dataclass(frozen=True)
class FoxJacobian:
    d: int
    gen_components: tuple[int, ...]
    rows: tuple[tuple[dict, ...], ...]


def fox_jacobian(pres: LinkPresentation) -> FoxJacobian:
    d, gc = pres.d, pres.generators
    zero = (0,) * d
    rows = []
    for r in pres.relators:
        row = [dict() for _ in gc]
        prefix = list(zero)
        for g, e in r:
            c = gc[g]
            if e == 1:
                row[g] = _l_add(row[g], {tuple(prefix): 1})
                prefix[c] += 1
            else:
                prefix[c] -= 1
                row[g] = _l_add(row[g], {tuple(prefix): -1})
        rows.append(tuple(row))
    return FoxJacobian(d, gc, tuple(rows))


def fundamental_identity_holds(J: FoxJacobian) -> bool:
    for row in J.rows:
        acc: Laurent = {}
        for g, entry in enumerate(row):
            c = J.gen_components[g]
            for e, coef in entry.items():
                up = list(e)
                up[c] += 1
                acc = _l_add(acc, {tuple(up): coef})
                acc = _l_add(acc, {e: -coef})
        if acc:
            return False
    return True


def _symbols(d: int):
    return sympy.symbols("t" if d == 1 else " ".join(f"t{i + 1}" for i in range(d)), seq=True)


def _minor_det(J: FoxJacobian, subs, col: int, ring_gens) -> sympy.Poly:
    """Determinant of the Jacobian with row 0 and column ``col`` deleted.

    ``subs`` maps an exponent tuple to a monomial exponent tuple in the
    target ring; rows are shifted by monomials to clear negative exponents.
    """
    n = len(J.gen_components)
    rows = []
    for r in J.rows[1:]:
        entries = []
        for g in range(n):
            if g == col:
                continue
            poly: dict = {}
            for e, c in r[g].items():
                m = subs(e)
                poly[m] = poly.get(m, 0) + c
            entries.append(poly)
        mins = [min((m[v] for p in entries for m in p if p[m]), default=0) for v in range(len(ring_gens))]
        shifted = []
        for poly in entries:
            terms = {tuple(m[v] - mins[v] for v in range(len(ring_gens))): c for m, c in poly.items() if c}
            shifted.append(sympy.Poly.from_dict(terms or {(0,) * len(ring_gens): 0}, *ring_gens, domain="ZZ"))
        rows.append(shifted)
    if not rows:
        return sympy.Poly(1, *ring_gens, domain="ZZ")
    dom = sympy.ZZ[tuple(ring_gens)]
    M = DomainMatrix([[dom.from_sympy(p.as_expr()) for p in row] for row in rows], (len(rows), len(rows)), dom)
    return sympy.Poly(dom.to_sympy(M.det()), *ring_gens, domain="ZZ")


def canonical_laurent(poly: dict) -> dict:
    """Normalize up to ±monomials: lowest exponent 0 in each variable, positive
    leading coefficient in lexicographic order."""
    poly = {e: c for e, c in poly.items() if c}
    if not poly:
        return {}
    nv = len(next(iter(poly)))
    mins = [min(e[v] for e in poly) for v in range(nv)]
    out = {tuple(e[v] - mins[v] for v in range(nv)): c for e, c in poly.items()}
    lead = out[max(out)]
    if lead < 0:
        out = {e: -c for e, c in out.items()}
    return out


def multivariable_alexander(pres: LinkPresentation) -> dict:
    """Generator of the first elementary ideal (d=1) or its Torres quotient (d>=2).

    For d >= 2 the minor with column j removed equals Δ_L·(t_{c(j)} - 1);
    one column per component is tried and the gcd of the quotients returned.
    """
    if pres.alexander_override is not None:
        return canonical_laurent(dict(pres.alexander_override))
    d = pres.d
    if not pres.relators:
        if d == 1 and len(pres.generators) == 1:
            return {(0,): 1}
        return {}
    if len(pres.generators) > DEGREE_CAP_GENERATORS and d >= 3:
        raise DegreeCapError(f"{len(pres.generators)} generators exceed the multivariable cap {DEGREE_CAP_GENERATORS}")
    J = fox_jacobian(pres)
    ts = _symbols(d)
    if len(J.rows) != len(pres.generators):
        raise LinkParseError("multivariable Δ needs a Wirtinger presentation with one relator per generator")
    result = None
    cols = []
    for c in range(d):
        cols.append(pres.generators.index(c))
    for col in cols:
        m = _minor_det(J, lambda e: e, col, ts)
        if d >= 2:
            q, r = sympy.div(m, sympy.Poly(ts[pres.generators[col]] - 1, *ts, domain="ZZ"))
            if not r.is_zero:
                raise LinkParseError("Torres division failed; presentation is not a link Wirtinger presentation")
            m = q
        result = m if result is None else sympy.gcd(result, m)
    return canonical_laurent(dict(result.as_dict())) if not result.is_zero else {}


def laurent_to_str(poly: dict, d: int) -> str:
    ts = _symbols(d)
    if not poly:
        return "0"
    expr = sum(c * sympy.Mul(*[t**e for t, e in zip(ts, exps)]) for exps, c in poly.items())
    return str(sympy.Poly(expr, *ts).as_expr())


def one_variable_order(pres: LinkPresentation, values: Sequence[int]) -> list[int]:
    """Alexander-module order of the infinite cyclic cover sending meridian i to t^values[i].

    Computed as a one-variable minor of the specialized Fox matrix, divided
    by (t^v - 1)/(t - 1) for the deleted column.  Integer coefficients in t,
    low degree first, normalized to t-degree >= 0 and positive top coefficient.
    """
    d = pres.d
    if not pres.relators:
        if len(pres.generators) == 1:
            return [1]
        return [0]
    J = fox_jacobian(pres)
    t = sympy.Symbol("t")
    best = min(range(len(pres.generators)), key=lambda g: (abs(values[pres.generators[g]]) or 10**9, g))
    v = values[pres.generators[best]]
    if v == 0:
        raise InvalidTauError("no branched component")
    m = _minor_det(J, lambda e: (sum(a * b for a, b in zip(e, values)),), best, (t,))
    if d >= 2:
        geo = sympy.Poly(sum(t**i for i in range(abs(v))), t, domain="ZZ")
        q, r = sympy.div(m, geo)
        if not r.is_zero:
            raise LinkParseError("Torres division failed")
        m = q
    coeffs = [int(c) for c in reversed(m.all_coeffs())]
    while coeffs and coeffs[0] == 0 and len(coeffs) > 1:
        coeffs.pop(0)
    if coeffs and coeffs[-1] < 0:
        coeffs = [-c for c in coeffs]
    return coeffs or [0]


# --- linking data -------------------------------------------------------------------

def linking_matrix(source) -> list[list[int]]:
    """Linking matrix from a presentation with crossing data or an explicit table.

    An explicit table may be a full symmetric matrix or ``{(i, j): lk}``.
    Diagonal entries are minus the sum of the off-diagonal row.
    """
    if isinstance(source, LinkPresentation):
        if source.linking_override is not None:
            return _with_diagonal([list(r) for r in source.linking_override])
        if not source.crossings and source.relators:
            raise LinkParseError("linking numbers need crossing data or a linking_matrix override")
        d = source.d
        twice = [[0] * d for _ in range(d)]
        for o, a, _, s in source.crossings:
            ca, co = source.generators[a], source.generators[o]
            if ca != co:
                twice[ca][co] += s
                twice[co][ca] += s
        M = [[twice[i][j] // 2 if i != j else 0 for j in range(d)] for i in range(d)]
        return _with_diagonal(M)
    if isinstance(source, dict):
        d = 1 + max(max(k) for k in source)
        M = [[0] * d for _ in range(d)]
        for (i, j), v in source.items():
            M[i][j] = M[j][i] = v
        return _with_diagonal(M)
    return _with_diagonal([list(r) for r in source])


def _with_diagonal(M: list[list[int]]) -> list[list[int]]:
    d = len(M)
    for i in range(d):
        for j in range(d):
            if i != j and M[i][j] != M[j][i]:
                raise LinkParseError("linking matrix is not symmetric")
    for i in range(d):
        M[i][i] = -sum(M[i][j] for j in range(d) if j != i)
    return M


def hosokawa_at_1(lk: list[list[int]], drop: int = 0) -> int:
    """|H_L(1)| = |det| of the linking matrix with row and column ``drop`` removed."""
    d = len(lk)
    if d < 2:
        raise ValueError("Hosokawa value needs at least two components")
    minor = [[lk[i][j] for j in range(d) if j != drop] for i in range(d) if i != drop]
    return abs(det(minor))


def submatrix(lk: list[list[int]], keep: Sequence[int]) -> list[list[int]]:
    M = [[lk[i][j] if i != j else 0 for j in keep] for i in keep]
    return _with_diagonal(M)


# --- τ ----------------------------------------------------------------------------

@dataclass(frozen=True)
class TauMap:
    prime: int
    precision: int
    values: tuple[PAdicInt, ...]
    integers: tuple[int | None, ...] = ()

    @classmethod
    def parse(cls, raw: Sequence, p: int, k: int) -> "TauMap":
        vals, ints = [], []
        for x in raw:
            v, n = parse_padic(x, p, k)
            vals.append(v)
            ints.append(n)
        return cls(p, k, tuple(vals), tuple(ints))

    @classmethod
    def tln(cls, d: int, p: int, k: int = 64) -> "TauMap":
        return cls(p, k, tuple(PAdicInt.of(1, p, k) for _ in range(d)), (1,) * d)

    def is_integral(self) -> bool:
        return len(self.integers) == len(self.values) and all(n is not None for n in self.integers)

    def is_tln(self) -> bool:
        return self.is_integral() and all(n in (0, 1) for n in self.integers)


@dataclass(frozen=True)
class BranchProfile:
    branched: tuple[int, ...]
    unbranched: tuple[int, ...]
    totally_branched: bool  # every branched value is a unit
    n0: int  # max v_p over branched components

    def status(self, i: int) -> str:
        return "branched" if i in self.branched else "unbranched"


def validate_tau(pres: LinkPresentation, tau: TauMap) -> BranchProfile:
    if len(tau.values) != pres.d:
        raise InvalidTauError(f"tau has {len(tau.values)} entries for {pres.d} components")
    if all(v.residue % tau.prime == 0 for v in tau.values):
        raise InvalidTauError("tau mod p is zero: no meridian maps to a unit")
    branched = tuple(i for i, v in enumerate(tau.values) if v.residue != 0)
    unbranched = tuple(i for i, v in enumerate(tau.values) if v.residue == 0)
    vals = [v.valuation() for i, v in enumerate(tau.values) if i in branched]
    n0 = max(vals)
    return BranchProfile(branched, unbranched, n0 == 0, n0)


# --- files ------------------------------------------------------------------------

def load_link(source, base_dir: Path | None = None) -> LinkPresentation:
    """Read a link description (path, JSON text already decoded, or corpus name)."""
    from .corpus import resolve

    if isinstance(source, LinkPresentation):
        return source
    if isinstance(source, (str, Path)):
        path = resolve(str(source), base_dir)
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise LinkParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise LinkParseError("link file must hold a JSON object")
    name = str(data.get("name", ""))
    cnames = tuple(data.get("component_names", ()))
    try:
        if "pd_code" in data:
            pres = parse_pd(data["pd_code"], name, int(data.get("unlinked_components", 0)), cnames)
        elif "braid" in data:
            b = data["braid"]
            pd, free = braid_closure_pd(b["word"], int(b["strands"]))
            pres = parse_pd(pd, name, free, cnames)
        elif "wirtinger" in data:
            w = data["wirtinger"]
            pres = parse_wirtinger(w["generators"], w["relators"], name, cnames)
        else:
            raise LinkParseError("field 'pd_code', 'braid' or 'wirtinger' is required")
    except (KeyError, TypeError) as exc:
        raise LinkParseError(f"missing or malformed field: {exc}") from exc
    extra = {}
    if "linking_matrix" in data:
        M = data["linking_matrix"]
        if len(M) != pres.d or any(len(r) != pres.d for r in M):
            raise LinkParseError("field 'linking_matrix' has the wrong shape")
        extra["linking_override"] = tuple(tuple(int(x) for x in r) for r in M)
        _with_diagonal([list(r) for r in extra["linking_override"]])  # symmetry check
    if "multivariable_alexander" in data:
        terms = []
        for entry in data["multivariable_alexander"]:
            exps, c = entry
            if len(exps) != pres.d:
                raise LinkParseError("field 'multivariable_alexander': exponent length mismatch")
            terms.append((tuple(int(e) for e in exps), int(c)))
        extra["alexander_override"] = tuple(terms)
    if extra:
        from dataclasses import replace
        pres = replace(pres, **extra)
    return pres
