import json
from fractions import Fraction

import pytest

from qloop.cartan import GradedDimVector, preset
from qloop.preproj import (
    CapExceeded,
    GradedModule,
    build_cyclic_quotient,
    build_injective_trunc,
    build_kr_module,
    direct_sum,
    dualize_shift,
    relations,
    verify_module,
)

EPS0 = ("eps", 0)


def test_a1_cyclic_l2():
    m = build_cyclic_quotient(0, 2, preset("A1"))
    assert m.dims == GradedDimVector({(0, 0): 1, (0, 2): 1})
    assert m.action(EPS0, (0, 0)) == [[1]]


def test_a1_cyclic_l1_is_simple():
    m = build_cyclic_quotient(0, 1, preset("A1"))
    assert m.dims == GradedDimVector.delta(0, 0)
    assert not m.actions


def test_a2_projective_vertex_one():
    m = build_cyclic_quotient(0, 1, preset("A2"))
    assert m.dims == GradedDimVector({(0, 0): 1, (1, -1): 1})


def test_b2_cyclic_sizes():
    cd = preset("B2")
    assert len(build_cyclic_quotient(0, 1, cd).pieces()) == 4
    assert len(build_cyclic_quotient(1, 1, cd).pieces()) == 3


def test_kr_a1_l1():
    m = build_kr_module(0, 5, 1, preset("A1"))
    assert m.dims == GradedDimVector.delta(0, 6)


def test_kr_a1_l2():
    m = build_kr_module(0, 0, 2, preset("A1"))
    assert m.dims == GradedDimVector({(0, 0): 1, (0, 2): 1})
    assert m.action(EPS0, (0, 0)) == [[1]]


def test_kr_matches_dual_of_cyclic():
    cd = preset("A2")
    assert build_kr_module(1, 3, 2, cd) == dualize_shift(build_cyclic_quotient(1, 2, cd), -3 - 2)


def test_dualize_twice_is_identity():
    cd = preset("B2")
    m = build_cyclic_quotient(0, 2, cd)
    assert dualize_shift(dualize_shift(m, 3), 3) == m


def test_injective_a1_depth3_chain():
    m = build_injective_trunc(0, 0, 3, preset("A1"))
    assert m.dims == GradedDimVector({(0, -4): 1, (0, -2): 1, (0, 0): 1})
    assert m.action(EPS0, (0, -4)) == [[1]] and m.action(EPS0, (0, -2)) == [[1]]


def test_injective_depth_one_is_dual_first_layer():
    cd = preset("A2")
    assert build_injective_trunc(0, 0, 1, cd) == dualize_shift(build_cyclic_quotient(0, cd.t(0), cd), 0)


def test_injective_truncations_are_monotone():
    cd = preset("A1")
    small = build_injective_trunc(0, 0, 2, cd).dims
    big = build_injective_trunc(0, 0, 3, cd).dims
    assert all(big[key] == n for key, n in small.items())


def test_injective_rejects_depth_zero():
    with pytest.raises(ValueError):
        build_injective_trunc(0, 0, 0, preset("A1"))


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "B2", "C2", "G2"])
def test_constructed_modules_verify(name):
    cd = preset(name)
    for i in range(cd.n):
        for l in (1, 2):
            assert verify_module(build_cyclic_quotient(i, l, cd)).ok
            assert verify_module(build_kr_module(i, 0, l, cd)).ok
        assert verify_module(build_injective_trunc(i, 0, 1, cd)).ok


def test_b2_kr_mixed_relation():
    cd = preset("B2")
    names = [r.name for r in relations(cd)]
    assert "eps[1]^1 alpha[1,2] = alpha[1,2] eps[2]^2" in names
    report = verify_module(build_kr_module(0, 0, 1, cd))
    assert report.ok and report.checked > 0


def test_grading_violation_detected():
    cd = preset("A1")
    dims = GradedDimVector({(0, 0): 1, (0, 1): 1})
    bad = GradedModule(cd, dims, {(EPS0, (0, 0), (0, 1)): ((Fraction(1),),)})
    report = verify_module(bad)
    assert not report.ok and "grading violation" in report.first_failure()


def test_relation_violation_detected():
    cd = preset("A2")
    m = build_kr_module(0, 0, 2, cd)
    # doubling one alpha map breaks eps alpha = alpha eps
    broken = dict(m.actions)
    key = (("alpha", 0, 1), (1, 3), (0, 2))
    broken[key] = tuple(tuple(2 * x for x in row) for row in broken[key])
    report = verify_module(GradedModule(cd, m.dims, broken))
    assert not report.ok
    assert report.first_failure().startswith("relation violated: eps[1]^1 alpha[1,2]")


def test_eps_loop_on_one_piece_rejected():
    # with a correct grading eps is automatically nilpotent, so a loop is a grading error
    cd = preset("A1")
    dims = GradedDimVector({(0, 0): 1})
    report = verify_module(GradedModule(cd, dims, {(EPS0, (0, 0), (0, 0)): ((Fraction(1),),)}))
    assert not report.ok and "grading violation" in report.first_failure()


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        build_cyclic_quotient(0, 6, preset("A2"), cap=2)


def test_direct_sum_dims():
    cd = preset("A1")
    s = direct_sum([build_kr_module(0, 0, 1, cd), build_kr_module(0, 0, 1, cd)])
    assert s.dims == GradedDimVector.delta(0, 1, 2)
    assert verify_module(s).ok


def test_dump_is_json():
    data = json.loads(build_kr_module(0, 0, 2, preset("A1")).dump())
    assert data["dims"] == [[1, 0, 1], [1, 2, 1]]
    assert data["actions"][0]["arrow"] == "eps[1]"
