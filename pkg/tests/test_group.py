import random

import pytest

from rouxforge.field import FieldSpec
from rouxforge.group import (
    CapExceededError,
    GroupError,
    MatOps,
    PermOps,
    closure,
    derived_subgroup,
    direct_product_with_cyclic,
    double_coset_decomposition,
    enumerate_linear_characters,
    group_from_json,
    group_to_json,
    is_doubly_transitive,
    is_doubly_transitive_bruteforce,
    natural_permutation_action,
    projective_line_action,
    stabilizer,
)


def s3():
    ops = PermOps(3)
    return closure([(1, 0, 2), (1, 2, 0)], ops, name="S3")


def sl2(q):
    spec = FieldSpec(*(qk for qk in _pk(q)))
    ops = MatOps(spec, 2)
    gens = [((1, 1), (0, 1)), ((0, 1), (spec.neg(1), 0))]
    return closure(gens, ops, name=f"SL(2,{q})")


def _pk(q):
    for p in range(2, q + 1):
        k = 0
        qq = q
        while qq % p == 0:
            qq //= p
            k += 1
        if qq == 1:
            return (p, k)
        if q % p == 0:
            break
    raise ValueError(f"{q} is not a prime power")


def test_closure_s3():
    G = s3()
    assert G.order == 6


def test_closure_sl25():
    G = sl2(5)
    assert G.order == 120  # q(q^2-1)


def test_closure_cap():
    ops = PermOps(5)
    with pytest.raises(CapExceededError):
        closure([(1, 2, 3, 4, 0), (1, 0, 2, 3, 4)], ops, cap=10)


def test_stabilizer_s3():
    G = s3()
    act = natural_permutation_action(G)
    stab = stabilizer(act, 0)
    assert stab.order == 2


def test_stabilizer_sl25_projective():
    G = sl2(5)
    act = projective_line_action(G)
    assert act.degree == 6
    stab = stabilizer(act, act.points[0])
    assert stab.order == 20  # q(q-1)


def test_action_compatibility():
    G = sl2(5)
    projective_line_action(G).check_compatibility()


def test_is_doubly_transitive():
    assert is_doubly_transitive(natural_permutation_action(s3()))
    # C4 acting on itself by translation: regular, not 2-transitive
    ops = PermOps(4)
    C4 = closure([(1, 2, 3, 0)], ops, name="C4")
    assert not is_doubly_transitive(natural_permutation_action(C4))
    assert is_doubly_transitive(projective_line_action(sl2(7)))


def test_doubly_transitive_matches_bruteforce():
    cases = [
        natural_permutation_action(s3()),
        natural_permutation_action(closure([(1, 2, 3, 0)], PermOps(4))),
        projective_line_action(sl2(5)),
        natural_permutation_action(
            closure([(1, 0, 2, 3), (1, 2, 3, 0)], PermOps(4), name="S4")
        ),
    ]
    for act in cases:
        assert is_doubly_transitive(act) == is_doubly_transitive_bruteforce(act)


def test_double_cosets_s3():
    G = s3()
    H = G.subgroup([G.identity, (1, 0, 2)])
    cells = double_coset_decomposition(G, H)
    assert sorted(len(c) for c in cells) == [2, 4]


def test_double_cosets_two_transitive_stabilizer():
    G = sl2(5)
    act = projective_line_action(G)
    H = stabilizer(act, act.points[0])
    assert len(double_coset_decomposition(G, H)) == 2


def test_double_cosets_whole_group():
    G = s3()
    H = G.subgroup(G.elements)
    assert len(double_coset_decomposition(G, H)) == 1


def test_double_coset_size_formula():
    G = sl2(5)
    act = projective_line_action(G)
    H = stabilizer(act, act.points[0])
    hset = set(H.elements)
    for cell in double_coset_decomposition(G, H):
        x = cell[0]
        xinv = G.inv(x)
        inter = sum(1 for h in H.elements if G.mul(G.mul(x, h), xinv) in hset)
        assert len(cell) == H.order**2 // inter


def test_derived_subgroup():
    ops = PermOps(4)
    C4 = closure([(1, 2, 3, 0)], ops)
    assert derived_subgroup(C4).order == 1
    G = s3()
    D = derived_subgroup(G)
    assert D.order == 3
    # Borel subgroup of SL(2,5): derived subgroup of order 5, abelianization C4
    G = sl2(5)
    act = projective_line_action(G)
    B = stabilizer(act, act.points[0])
    D = derived_subgroup(B)
    assert D.order == 5
    assert B.order // D.order == 4


def test_character_counts():
    G = sl2(5)
    act = projective_line_action(G)
    B = stabilizer(act, act.points[0])
    chars = enumerate_linear_characters(B)
    assert len(chars) == 4
    orders = sorted(c.image_order for c in chars)
    assert orders == [1, 2, 4, 4]  # dual of C4
    for c in chars:
        c.verify_homomorphism(B)
    # pairwise distinct
    sigs = {tuple(sorted(c.exponents.items())) + (c.modulus,) for c in chars}
    assert len(sigs) == 4


def test_characters_trivial_abelianization():
    # A4 is perfect? no: A4' = V4, abelianization C3 -> use A5 (perfect)
    ops = PermOps(5)
    A5 = closure([(1, 2, 0, 3, 4), (0, 1, 3, 4, 2)], ops, name="A5")
    assert A5.order == 60
    chars = enumerate_linear_characters(A5)
    assert len(chars) == 1 and chars[0].is_trivial


def test_direct_product():
    G = s3()
    P = direct_product_with_cyclic(G, 2)
    assert P.order == 12
    a = (G.elements[1], 1)
    b = (G.elements[2], 1)
    assert P.mul(a, b) == (G.mul(G.elements[1], G.elements[2]), 0)
    assert direct_product_with_cyclic(sl2(5), 4).order == 480


def test_associativity_and_inverses_spot_check():
    G = sl2(5)
    rng = random.Random(7)
    els = G.elements
    for _ in range(1000):
        a, b, c = (rng.choice(els) for _ in range(3))
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    for a in els:
        assert G.mul(a, G.inv(a)) == G.identity


def test_group_json_roundtrip():
    data = {"kind": "permutation", "degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}
    G = group_from_json(data)
    assert G.order == 6
    assert group_from_json(group_to_json(G)).order == 6

    mdata = {
        "kind": "matrix",
        "field": {"p": 5, "k": 1, "irreducible": [0, 1]},
        "dim": 2,
        "generators": [[1, 1, 0, 1], [0, 1, 4, 0]],
    }
    M = group_from_json(mdata)
    assert M.order == 120
    assert group_from_json(group_to_json(M)).order == 120


def test_group_json_bad_input():
    with pytest.raises(GroupError):
        group_from_json({"kind": "permutation", "degree": 3, "generators": [[0, 0, 1]]})
    with pytest.raises(GroupError):
        group_from_json({"kind": "nonsense"})


def test_associativity_spot_checks_small_groups():
    # random-triple associativity and full inverse checks, per backend
    rng = random.Random(99)
    groups = [
        s3(),
        closure([(1, 2, 3, 0)], PermOps(4), name="C4"),
        closure([(1, 0, 2, 3), (1, 2, 3, 0)], PermOps(4), name="S4"),
        sl2(5),
        direct_product_with_cyclic(s3(), 4),
    ]
    for G in groups:
        els = G.elements
        for _ in range(1000):
            a, b, c = (rng.choice(els) for _ in range(3))
            assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
        for a in els:
            assert G.mul(a, G.inv(a)) == G.identity
            assert G.mul(G.inv(a), a) == G.identity
