"""Full verification sweep: builds the standard algebras, enumerates their
root subsystems, instantiates seeded random operator families over every
subsystem, and drives each family through the whole identity/structure/
solution pipeline.  This is the engine behind ``cybe-forge report run-all``
and the acceptance test module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import averaging as av
from . import conformal as cf
from . import cybe as yb
from . import liealg
from .qlinalg import QMat, QVec, RowSpan
from .reports import Check, Report

EXPECTED_SUBSYSTEM_COUNTS = {
    "sl2": 2,
    "sl3": 5,
    "sl4": 15,  # frozen golden value from exhaustive enumeration
    "sl2+sl2": 4,
}

EXPECTED_CENTROID_DIMS = {"sl2": 1, "sl3": 1, "sl4": 1, "sl2+sl2": 2}

HPERP_DEGREE = 2


def random_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        num = rng.randint(-6, 6)
        den = rng.randint(1, 4)
        f = Fraction(num, den)
        if f or not nonzero:
            return f


def random_matrix(rng: random.Random, n: int) -> QMat:
    return QMat.from_fractions(
        [[random_rational(rng) for _ in range(n)] for _ in range(n)]
    )


def random_hperp_family(rng: random.Random, n: int, degree: int) -> tuple[QMat, ...]:
    if n == 0:
        return ()
    return tuple(random_matrix(rng, n) for _ in range(degree + 1))


@dataclass
class FamilyCase:
    name: str
    algebra_name: str
    subsystem: liealg.RootSubsystem
    spec: av.HomogeneousSpec
    family: av.ConfAveOp


@dataclass
class SweepContext:
    algebras: dict[str, tuple[liealg.LieAlgebra, liealg.RootDatum]]
    subsystems: dict[str, list[liealg.RootSubsystem]]
    families: list[FamilyCase] = field(default_factory=list)


def standard_algebras(rank_max: int = 4) -> dict[str, tuple[liealg.LieAlgebra, liealg.RootDatum]]:
    out = {}
    for n in range(2, rank_max + 1):
        out[f"sl{n}"] = liealg.build_sl(n)
    a, rda = liealg.build_sl(2)
    b, _ = liealg.build_sl(2)
    s = liealg.direct_sum(a, b)
    cartan = [QVec(1, tuple(h.nums) + (0,) * b.dim) for h in rda.cartan]
    cartan += [QVec(1, (0,) * a.dim + tuple(h.nums)) for h in rda.cartan]
    out["sl2+sl2"] = (s, liealg.root_decomposition(s, cartan))
    return out


def build_sweep_families(
    ctx: SweepContext, seed: int, trials: int
) -> list[FamilyCase]:
    """For every subsystem of every algebra, build ``trials`` families with
    random nonzero component scalars and a random polynomial block of degree
    HPERP_DEGREE on the orthogonal Cartan part."""
    cases = []
    for name, (g, rd) in sorted(ctx.algebras.items()):
        for si, sub in enumerate(ctx.subsystems[name]):
            dperp = len(av._hperp_basis(rd, sub.members))
            for t in range(trials):
                rng = random.Random((seed, name, si, t).__repr__())
                xi = {
                    ci: random_rational(rng, nonzero=True)
                    for ci in range(len(sub.components))
                }
                hperp = random_hperp_family(rng, dperp, HPERP_DEGREE)
                spec = av.HomogeneousSpec(sub, xi, hperp)
                fam = av.build_homogeneous(rd, spec)
                cases.append(
                    FamilyCase(f"{name}/sub{si}/t{t}", name, sub, spec, fam)
                )
    return cases


# ---------------------------------------------------------------------------
# criteria


def criterion_lie_kernel(ctx: SweepContext) -> Report:
    report = Report()
    for name, (g, rd) in sorted(ctx.algebras.items()):
        report.extend(g.validate(), prefix=f"{name}:")
        witness = None
        for i in range(g.dim):
            adi = g.ad_basis(i)
            for j in range(g.dim):
                for k in range(g.dim):
                    lhs = g.killing_pair(adi.col(j), QVec.unit(g.dim, k))
                    rhs = -g.killing_pair(QVec.unit(g.dim, j), adi.col(k))
                    if lhs != rhs:
                        witness = {"triple": (i, j, k)}
                        break
                if witness:
                    break
            if witness:
                break
        report.add(f"{name}:killing-invariance", witness is None, witness)
        report.add(f"{name}:killing-invertible", g.is_semisimple())
    g2, rd2 = ctx.algebras["sl2"]
    labels = g2.labels
    h = QVec.unit(3, labels.index("h1"))
    e = QVec.unit(3, labels.index("e12"))
    f = QVec.unit(3, labels.index("e21"))
    report.add("sl2:killing-values",
               g2.killing_pair(h, h) == 8
               and g2.killing_pair(e, f) == 4
               and g2.killing_pair(e, e) == 0)
    return report


def criterion_conformal_axioms(ctx: SweepContext, nmax: int = 3) -> Report:
    report = Report()
    for name, (g, _) in sorted(ctx.algebras.items()):
        report.extend(cf.CurAlgebra(g).check_axioms(nmax), prefix=f"{name}:cur-")
    return report


def criterion_classification(ctx: SweepContext) -> Report:
    report = Report()
    for name in sorted(ctx.algebras):
        count = len(ctx.subsystems[name])
        expected = EXPECTED_SUBSYSTEM_COUNTS[name]
        report.add(
            f"{name}:subsystem-count",
            count == expected,
            None if count == expected else {"expected": expected, "found": count},
        )
    for case in ctx.families:
        g, _ = ctx.algebras[case.algebra_name]
        ok, witness = av.is_conformal_averaging(g, case.family)
        report.add(f"{case.name}:conformal-averaging", ok, witness)
    return report


def criterion_structure(ctx: SweepContext) -> Report:
    report = Report()
    for case in ctx.families:
        g, rd = ctx.algebras[case.algebra_name]
        rep = av.verify_image_structure(g, rd, case.family)
        report.add(f"{case.name}:structure", rep.passed,
                   None if rep.passed else rep.first_failure().to_json())
    return report


def criterion_conformal_lift(ctx: SweepContext) -> Report:
    report = Report()
    for case in ctx.families:
        g, _ = ctx.algebras[case.algebra_name]
        cur = cf.CurAlgebra(g)
        op = cf.ConfOperator.from_family(case.family.family)
        rep = cf.check_conformal_averaging_on_cur(cur, op, case.family.N + 2)
        report.add(f"{case.name}:lift", rep.passed,
                   None if rep.passed else rep.first_failure().to_json())
    return report


def _split_null_prediction(
    g: liealg.LieAlgebra,
    rd: liealg.RootDatum,
    case: FamilyCase,
    kq: cf.KernelQuotient,
) -> tuple[bool, dict | None]:
    """Compare the quotient against the predicted split null extension: the
    subsystem part must reproduce its subalgebra structure constants and the
    orthogonal Cartan part must be central of the predicted dimension."""
    members = case.subsystem.members
    sub0: list[QVec] = []
    for i in members:
        cand = rd.coroots[i]
        if not RowSpan(sub0, g.dim).contains(cand):
            sub0.append(cand)
    sub0 += [rd.root_vectors[i] for i in members]
    hperp_coords = av._hperp_basis(rd, members)
    hperp = []
    for hc in hperp_coords:
        vec = QVec.zero(g.dim)
        for k, c in enumerate(hc.fractions()):
            if c:
                vec = vec + rd.cartan[k].scale(c)
        hperp.append(vec)

    kspan = RowSpan(kq.kernel_basis, g.dim)
    comp_idx = kq.complement_indices

    def project(vec: QVec) -> QVec:
        reduced = kspan.reduce(vec)
        return QVec.from_fractions([reduced[j] for j in comp_idx])

    quotient = kq.quotient
    center_dim_expected = len(hperp)
    # images of the predicted basis inside the quotient must form a basis
    images = [project(v) for v in sub0 + hperp]
    if RowSpan(images, quotient.dim).dim != quotient.dim:
        return False, {"reason": "predicted basis does not span the quotient"}
    n0 = len(sub0)
    span_mat = QMat.from_cols(images)
    t0 = case.family.family[0]
    # subsystem block: structure constants must match the subalgebra's
    for a, xa in enumerate(sub0):
        for b, xb in enumerate(sub0):
            w = g.bracket(xa, xb)
            expect = ql_solve_in_basis(span_mat, project(w))
            got = ql_solve_in_basis(
                span_mat, quotient_product(quotient, images, a, b)
            )
            if expect is None or got is None or expect != got:
                return False, {"reason": "subsystem block mismatch", "pair": (a, b)}
            if any(expect[n0 + i] != 0 for i in range(len(hperp))):
                return False, {"reason": "subsystem block leaks into center"}
    # center block: the orthogonal part must multiply to zero on everything
    for i in range(len(hperp)):
        zi = images[n0 + i]
        for j, other in enumerate(images):
            w1 = quotient_product_vec(quotient, zi, other)
            w2 = quotient_product_vec(quotient, other, zi)
            if not (w1.is_zero() and w2.is_zero()):
                return False, {"reason": "orthogonal part not central", "pair": (i, j)}
    if quotient.dim != n0 + center_dim_expected:
        return False, {
            "reason": "dimension mismatch",
            "expected": n0 + center_dim_expected,
            "found": quotient.dim,
        }
    return True, None


def ql_solve_in_basis(span_mat: QMat, v: QVec):
    from . import qlinalg as ql

    return ql.solve(span_mat, v)


def quotient_product(quotient: liealg.LieAlgebra, images: list[QVec], a: int, b: int) -> QVec:
    return quotient.product(images[a], images[b])


def quotient_product_vec(quotient: liealg.LieAlgebra, x: QVec, y: QVec) -> QVec:
    return quotient.product(x, y)


def criterion_leibniz(ctx: SweepContext) -> Report:
    report = Report()
    for case in ctx.families:
        g, rd = ctx.algebras[case.algebra_name]
        cur = cf.CurAlgebra(g)
        op = cf.ConfOperator.from_family(case.family.family)
        rep = cf.leibniz_products_and_check(cur, op, case.family.N + 1)
        report.add(f"{case.name}:leibniz", rep.passed,
                   None if rep.passed else rep.first_failure().to_json())
        kq = cf.kernel_and_quotient(cur, op)
        val = kq.quotient.validate()
        report.add(f"{case.name}:quotient-lie", val.passed,
                   None if val.passed else val.first_failure().to_json())
        pred_ok, pred_witness = _split_null_prediction(g, rd, case, kq)
        report.add(f"{case.name}:split-null", pred_ok and kq.split_null, pred_witness)

    # ordinary examples: identity and Cartan projection on sl2, and the
    # conjugation average over the 3x3 permutation group on the matrix Lie
    # algebra gl3
    g2, rd2 = ctx.algebras["sl2"]
    ident = av.make_averaging(g2, QMat.identity(g2.dim), "lie")
    proj = cartan_projection(g2, rd2)
    for nm, top in (("identity", ident), ("cartan-projection", av.make_averaging(g2, proj, "lie"))):
        res = av.leibniz_report(g2, top)
        report.add(f"ordinary/{nm}:leibniz", res.report.passed,
                   None if res.report.passed else res.report.first_failure().to_json())
    gl3 = liealg.matrix_associative_algebra(3)
    perms = permutation_matrices(3)
    tmat = av.group_averaging(perms)
    ok, witness = av.is_averaging(gl3, tmat, "associative")
    report.add("ordinary/perm3:associative-averaging", ok, witness)
    gl3_lie = liealg.commutator_lie(gl3)
    res = av.leibniz_report(gl3_lie, av.make_averaging(gl3_lie, tmat, "lie"))
    report.add("ordinary/perm3:leibniz", res.report.passed,
               None if res.report.passed else res.report.first_failure().to_json())
    return report


def cartan_projection(g: liealg.LieAlgebra, rd: liealg.RootDatum) -> QMat:
    """Projection onto the Cartan span along the root vectors."""
    cols = list(rd.cartan) + list(rd.root_vectors)
    U = QMat.from_cols(cols)
    from . import qlinalg as ql

    rows = [[Fraction(0)] * g.dim for _ in range(g.dim)]
    for i in range(len(rd.cartan)):
        rows[i][i] = Fraction(1)
    return U @ QMat.from_fractions(rows) @ ql.inverse(U)


def permutation_matrices(n: int) -> list[QMat]:
    from itertools import permutations

    out = []
    for perm in permutations(range(n)):
        out.append(
            QMat.from_fractions(
                [[1 if perm[j] == i else 0 for j in range(n)] for i in range(n)]
            )
        )
    return out


def criterion_cybe(ctx: SweepContext) -> Report:
    report = Report()
    for case in ctx.families:
        g, rd = ctx.algebras[case.algebra_name]
        try:
            sol = yb.solution_from_conformal_averaging(g, case.family, rd)
        except Exception as exc:
            report.add(f"{case.name}:cybe", False, {"error": str(exc)})
            continue
        report.add(f"{case.name}:cybe", True)
        agrees = yb.cybe_check_tensor(g, sol)
        report.add(f"{case.name}:tensor-agrees", agrees)
    g2, rd2 = ctx.algebras["sl2"]
    ident = av.make_averaging(g2, QMat.identity(g2.dim), "lie")
    proj = av.make_averaging(g2, cartan_projection(g2, rd2), "lie")
    for nm, top in (("identity", ident), ("cartan-projection", proj)):
        try:
            sol = yb.solution_from_symmetric_averaging(g2, top, "strict")
            ok = yb.cybe_check_tensor(g2, sol)
            report.add(f"ordinary/{nm}:cybe", ok)
        except Exception as exc:
            report.add(f"ordinary/{nm}:cybe", False, {"error": str(exc)})
    return report


def criterion_residue(ctx: SweepContext) -> Report:
    report = Report()
    for case in ctx.families:
        g, rd = ctx.algebras[case.algebra_name]
        sol = yb.solution_from_conformal_averaging(g, case.family, rd)
        if sol.is_zero():
            fam = av.ConfAveOp.make([QMat.zeros(g.dim, g.dim)])
            ok, witness = av.is_conformal_averaging(g, fam)
        else:
            rep = yb.residue_roundtrip(g, sol)
            ok, witness = rep.passed, (
                None if rep.passed else rep.first_failure().to_json()
            )
            if ok:
                extracted = yb.residue_extract(sol)
                expected = case.family.rescaled_by_factorials()
                ok = extracted.family == expected.family
                witness = None if ok else {"reason": "principal part differs"}
        report.add(f"{case.name}:residue", ok, witness)
    g2, _ = ctx.algebras["sl2"]
    p = yb.LaurentOp.make({-1: QMat.identity(g2.dim)})
    fam = yb.residue_extract(p)
    report.add(
        "residue-of-identity-pole",
        fam.N == 0 and fam.family[0] == QMat.identity(g2.dim),
    )
    return report


def criterion_negative_controls(ctx: SweepContext) -> Report:
    report = Report()
    g2, rd2 = ctx.algebras["sl2"]
    e_idx = g2.labels.index("e12")
    ade = g2.ad(QVec.unit(g2.dim, e_idx))
    bad = yb.LaurentOp.make({-1: ade})
    res = yb.cybe_check_operator(g2, bad)
    report.add("ade-pole-fails", (not res.ok) and res.witness is not None,
               None if not res.ok else {"reason": "unexpectedly passed"})

    # corrupted family: keep one root vector, zero its opposite partner
    full = [s for s in ctx.subsystems["sl2"] if s.members][0]
    spec = av.HomogeneousSpec(full, {0: Fraction(1)}, ())
    fam = av.build_homogeneous(rd2, spec)
    t0 = [list(row) for row in fam.family[0].fractions()]
    minus_idx = g2.labels.index("e21")
    for r in range(g2.dim):
        t0[r][minus_idx] = Fraction(0)
    corrupted = av.ConfAveOp.make([QMat.from_fractions(t0)])
    ok, witness = av.is_conformal_averaging(g2, corrupted)
    report.add("corrupted-family-fails", (not ok) and witness is not None,
               None if not ok else {"reason": "unexpectedly passed"})

    rb = yb.rota_baxter_check(g2, QMat.identity(g2.dim))
    report.add("identity-not-rota-baxter", (not rb.ok) and rb.witness is not None,
               None if not rb.ok else {"reason": "unexpectedly passed"})
    return report


def criterion_centroid(ctx: SweepContext) -> Report:
    report = Report()
    for name, (g, _) in sorted(ctx.algebras.items()):
        dim = len(g.centroid_basis())
        expected = EXPECTED_CENTROID_DIMS[name]
        report.add(
            f"{name}:centroid-dim",
            dim == expected,
            None if dim == expected else {"expected": expected, "found": dim},
        )
    return report


CRITERIA = (
    ("1-lie-kernel", criterion_lie_kernel),
    ("2-conformal-axioms", criterion_conformal_axioms),
    ("3-classification", criterion_classification),
    ("4-structure", criterion_structure),
    ("5-conformal-lift", criterion_conformal_lift),
    ("6-leibniz", criterion_leibniz),
    ("7-cybe", criterion_cybe),
    ("8-residue", criterion_residue),
    ("9-negative-controls", criterion_negative_controls),
    ("10-centroid", criterion_centroid),
)


def prepare_context(rank_max: int = 4, seed: int = 0, trials: int = 3) -> SweepContext:
    algebras = standard_algebras(rank_max)
    subsystems = {
        name: liealg.enumerate_closed_symmetric(rd)
        for name, (_, rd) in algebras.items()
    }
    ctx = SweepContext(algebras, subsystems)
    if trials > 0:
        ctx.families = build_sweep_families(ctx, seed, trials)
    return ctx


def run_all(rank_max: int = 4, seed: int = 0, trials: int = 3,
            fixture: dict | None = None) -> Report:
    ctx = prepare_context(rank_max, seed, trials)
    report = Report()
    for name, fn in CRITERIA:
        rep = fn(ctx)
        report.extend(rep, prefix=f"{name}/")
    if fixture is not None:
        ok = False
        witness = None
        try:
            from . import jsonio

            fam = jsonio.conf_ave_from_json(fixture)
            g, _ = ctx.algebras.get("sl2")
            if fam.dim == g.dim:
                ok, witness = av.is_conformal_averaging(g, fam)
        except Exception as exc:
            witness = {"error": str(exc)}
        report.add("fixture-valid", ok, witness)
    report.checks.sort(key=lambda c: c.name)
    return report
