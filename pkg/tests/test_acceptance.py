"""Acceptance criteria 1-12, each at its stated tolerance and time budget.

Every test records one line in the terminal summary ("acceptance criteria").
"""
import time
from fractions import Fraction as F

from conftest import ACCEPTANCE
from faircake import (
    check_envy_free,
    check_esv_probe,
    check_pareto_optimal,
    check_proportional,
    check_weak_pareto_optimal,
    enlarge,
    nash_brute_oracle,
    nash_product,
    price_gap,
    rm_experiment,
    solve_leximin_absolute,
    solve_leximin_relative,
    solve_nash,
    solve_wp_absolute,
    solve_wp_relative,
    verify_ceei,
    verify_sceei,
)
from faircake.cake import Allocation, utilities
from faircake.io import fixture_names, load_fixture, load_fixture_allocation
from faircake.monotonicity import Case, property_matrix, random_case, random_corpus
from faircake.rules import get_rule
from faircake.solvers.welfare import WelfareParam


class Criterion:
    def __init__(self, number, budget):
        self.number = number
        self.budget = budget
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        ACCEPTANCE[self.number] = (False, "did not finish")
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.budget
        msg = f"{elapsed:.2f}s / {self.budget}s"
        if exc_type is not None:
            msg += f"  {exc_type.__name__}: {exc}"
        elif self.detail:
            msg += f"  {self.detail}"
        ACCEPTANCE[self.number] = (ok, msg)
        if exc_type is None:
            assert elapsed < self.budget, f"criterion {self.number} took {elapsed:.2f}s"
        return False


def test_criterion_01_leximin_golden():
    with Criterion(1, 1.0) as c:
        cake, _ = load_fixture("leximin_example")
        a = solve_leximin_absolute(cake)
        r = solve_leximin_relative(cake)
        assert a.utilities.sorted_absolute() == (6, 6, 9)
        assert r.utilities.sorted_relative() == (F(5, 12),) * 3
        c.detail = "abs (6, 6, 9), rel (5/12, 5/12, 5/12)"


def test_criterion_02_leximin_not_ef():
    with Criterion(2, 1.0) as c:
        cake, _ = load_fixture("leximin_not_ef")
        res = solve_leximin_absolute(cake)
        assert res.utilities.sorted_absolute() == (F(1, 3),) * 4 + (F(2, 5),)
        assert solve_leximin_relative(cake).utilities.sorted_relative() == (F(1, 3),) * 4 + (F(2, 5),)
        ef = check_envy_free(cake, res.allocation)
        assert not ef
        assert (ef.witness["envious"], ef.witness["envied"]) == ("Alice", "Bob")
        c.detail = "vector (1/3 x4, 2/5), Alice envies Bob"


def test_criterion_03_nash_ceei_golden():
    with Criterion(3, 5.0) as c:
        cake, _ = load_fixture("ceei_example")
        res = solve_nash(cake)
        x = res.allocation.fractions
        for j in range(6):
            alice = 0 if j in (2, 3) else 1
            assert abs(x[0][j] - alice) <= 1e-6
            assert abs(x[1][j] - (1 - alice)) <= 1e-6
        expected = [F(1, 4), F(1, 4), F(1, 2), F(1, 2), F(1, 4), F(1, 4)]
        assert max(abs(p - q) for p, q in zip(res.prices.densities, expected)) <= 1e-6
        assert verify_sceei(cake, res.allocation, res.prices, 1e-6)
        assert verify_ceei(cake, res.allocation, res.prices, 1e-6)
        c.detail = "prices " + ", ".join(str(p) for p in res.prices.densities)


def test_criterion_04_ceei_not_po():
    with Criterion(4, 1.0) as c:
        cake, _ = load_fixture("weak_po_ceei")
        alloc, prices = load_fixture_allocation("weak_po_ceei", cake)
        assert prices.densities == (F(1, 5), F(4, 5), F(1))
        assert verify_ceei(cake, alloc, prices)
        po = check_pareto_optimal(cake, alloc)
        assert not po
        # the witness really is a Pareto improvement
        y = Allocation(po.witness["improving_allocation"])
        before, after = utilities(cake, alloc).absolute, utilities(cake, y).absolute
        assert all(b <= a for a, b in zip(after, before)) and any(b < a for a, b in zip(after, before))
        assert check_weak_pareto_optimal(cake, alloc)
        c.detail = "CEEI pass, PO fail with witness, weak-PO pass"


def test_criterion_05_cut_and_choose_rm():
    with Criterion(5, 1.0) as c:
        cake, extra = load_fixture("cut_and_choose")
        rep = rm_experiment(cake, extra, get_rule("cut-and-choose"))
        assert rep.before[1] == 5 and rep.after[1] == 3
        assert not rep
        c.detail = "Bob 5 -> 3"


def test_criterion_06_relative_leximin_rm():
    with Criterion(6, 2.0) as c:
        cake, extra = load_fixture("relative_leximin_rm")
        res = solve_leximin_relative(cake)
        assert res.utilities.sorted_relative() == tuple(F(k, 18) for k in (9, 9, 10, 10, 10))
        big = solve_leximin_relative(enlarge(cake, extra))
        assert big.utilities.absolute[0] < 9 and big.utilities.absolute[1] < 9
        rep = rm_experiment(cake, extra, get_rule("leximin-rel"))
        assert not rep
        c.detail = f"Alice, Bob 9 -> {big.utilities.absolute[0]}"


def test_criterion_07_convex_w_rm():
    with Criterion(7, 2.0) as c:
        s, t, eps = F(1, 4), F(1, 4), F(1, 20)
        wp = WelfareParam(2)
        # w(s) + w(s+2t) > w(s+t) + w(s+t+eps) must hold for the cake to work
        w = lambda x: x ** 2 / 2  # noqa: E731
        assert w(s) + w(s + 2 * t) > w(s + t) + w(s + t + eps)
        assert wp.kind == "convex"
        cake, extra = load_fixture("convex_w_rm")
        assert cake.density(0, 2) == t + eps and cake.density(1, 2) == t
        small = solve_wp_absolute(cake, 2)
        big = solve_wp_absolute(enlarge(cake, extra), 2)
        assert abs(small.utilities.absolute[0] - (s + t + eps)) <= 1e-6
        assert abs(big.utilities.absolute[0] - s) <= 1e-6
        assert not rm_experiment(cake, extra, get_rule("wp-abs", p=2))
        c.detail = f"Alice {small.utilities.absolute[0]} -> {big.utilities.absolute[0]}"


def test_criterion_08_wp_relative_prop():
    with Criterion(8, 2.0) as c:
        cake, _ = load_fixture("strictly_concave_not_prop")
        half = solve_wp_relative(cake, F(1, 2))
        x = half.allocation.fractions[0][0]
        assert x > F(3, 4) + F(1, 10**6)
        prop = check_proportional(cake, half.allocation, 1e-6)
        assert not prop and prop.witness["agent"] == "Bob"
        minus = solve_wp_relative(cake, -1)
        assert check_proportional(cake, minus.allocation, 1e-6)
        c.detail = f"p=1/2: x={float(x):.6f}; p=-1: Bob {float(minus.utilities.relative[1]):.6f}"


def test_criterion_09_oracle_equivalence():
    with Criterion(9, 60.0) as c:
        worst = 0.0
        for k in range(50):
            case = random_case(9, k, n_agents=3, n_slices=4)
            cake = case.cake
            res = solve_nash(cake)
            ora = nash_brute_oracle(cake, 60)
            gap = float(nash_product(cake, ora.allocation) - nash_product(cake, res.allocation))
            worst = max(worst, gap)
            assert gap <= 1e-4
            assert verify_sceei(cake, res.allocation, res.prices, 1e-6)
        c.detail = f"50 cakes, max oracle excess {worst:.3g}"


def _fixture_cases():
    out = []
    for name in fixture_names():
        cake, extra = load_fixture(name)
        out.append(Case(name, cake, extra, 0 if cake.n_agents > 1 else None))
    return out


def test_criterion_10_property_fuzz():
    with Criterion(10, 600.0) as c:
        corpus = _fixture_cases() + random_corpus(500, seed=10, n_agents=4, n_slices=6)
        table = property_matrix([get_rule(n) for n in ("nash", "leximin-abs", "leximin-rel")], corpus)
        nash, labs, lrel = table["nash"], table["leximin-abs"], table["leximin-rel"]
        assert nash.failures == {"PROP": 0, "EF": 0, "RM": 0, "PM": 0}
        assert labs.failures["RM"] == 0 and labs.failures["PM"] == 0
        assert labs.failures["PROP"] >= 1
        example5, _ = load_fixture("leximin_example")
        assert not check_proportional(example5, solve_leximin_absolute(example5).allocation)
        assert lrel.failures["PROP"] == 0 and lrel.failures["PM"] == 0
        cake, extra = load_fixture("relative_leximin_rm")
        assert not rm_experiment(cake, extra, get_rule("leximin-rel"))
        c.detail = (f"{len(corpus)} cases; nash {nash.failures}; leximin-abs PROP fails "
                    f"{labs.failures['PROP']}; leximin-rel RM fails {lrel.failures['RM']}")


def test_criterion_11_esv():
    with Criterion(11, 30.0) as c:
        for name in fixture_names():
            cake, _ = load_fixture(name)
            for rule in ("nash", "leximin-abs", "leximin-rel"):
                rep = check_esv_probe(cake, get_rule(rule), trials=10)
                assert rep, (name, rule, rep.witness)
        cake, _ = load_fixture("abs_convex_not_esv")
        assert not check_esv_probe(cake, get_rule("util-abs"), trials=10)
        c.detail = f"{len(fixture_names())} fixtures x 3 rules pass; util-abs refuted"


def test_criterion_12_price_monotonicity_uniqueness():
    with Criterion(12, 300.0) as c:
        worst_rise, worst_gap = F(-10**9), 0
        for case in random_corpus(500, seed=10, n_agents=4, n_slices=6):
            cake = case.cake
            before = solve_nash(cake)
            after = solve_nash(enlarge(cake, case.extra))
            assert verify_sceei(cake, before.allocation, before.prices, 1e-6)
            rise = max(after.prices.densities[j] - before.prices.densities[j] for j in range(cake.n_slices))
            worst_rise = max(worst_rise, rise)
            assert rise <= 2e-6
            order = list(reversed(range(cake.n_agents)))
            again = solve_nash(cake.permuted(order))
            gap = price_gap(before.prices, again.prices)
            worst_gap = max(worst_gap, gap)
            assert gap <= 2e-6
        c.detail = f"max price rise {float(worst_rise):.3g}, max re-solve gap {float(worst_gap):.3g}"

