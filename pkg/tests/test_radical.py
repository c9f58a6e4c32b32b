import random

import numpy as np
import pytest

from rouxforge.families import sl2_cover, su3_cover
from rouxforge.group import (
    PermOps,
    closure,
    enumerate_linear_characters,
    natural_permutation_action,
)
from rouxforge.radical import (
    HigmanDecompositionTable,
    Key,
    RadicalError,
    cover_from_group,
    detect_higman,
    find_key,
    radicalize,
    random_outside_stabilizer,
    roux_from_higman_pair,
    roux_params_from_radicalization,
    trivial_character_dims,
    verify_higman_axioms,
)
from rouxforge.roux import signature_matrix, verify_roux


def s3_cover():
    G = closure([(1, 0, 2), (1, 2, 0)], PermOps(3), name="S3")
    return cover_from_group(G, natural_permutation_action(G))


def sl2_chars(q, materialize=False):
    cover, x = sl2_cover(q, materialize=materialize)
    return cover, x, enumerate_linear_characters(cover.stab)


def by_order(chars, m):
    return [c for c in chars if c.modulus == m]


def test_cover_verify_sl25():
    cover, _ = sl2_cover(5, materialize=True)
    cover.verify()
    assert cover.n == 6
    assert cover.stab.order == 20
    assert cover.group.order == 120


def test_su3_cover_counts():
    cover, x, _ = su3_cover(3)
    assert cover.n == 28
    assert cover.stab.order == 216
    assert not cover.in_stabilizer(x)


def test_su33_closure_order():
    cover, x, _ = su3_cover(3, materialize=True)
    assert cover.group.order == 6048
    cover.verify()


def test_radicalize_trivial():
    cover = s3_cover()
    trivial = by_order(enumerate_linear_characters(cover.stab), 1)[0]
    rad = radicalize(cover, trivial)
    assert rad.r == 2
    assert rad.h_elements() == [(xi, 0) for xi in cover.stab.elements]
    assert rad.order() == 12


def test_radicalize_sl25_quadratic():
    cover, x, chars = sl2_chars(5, materialize=True)
    quad = by_order(chars, 2)[0]
    rad = radicalize(cover, quad)  # includes the normalizer check at order 480
    assert rad.r == 4
    assert len(rad.h_elements()) == 20
    assert rad.order() == 480


def test_radicalize_su33_bookkeeping():
    cover, x, _ = su3_cover(3, materialize=True)
    chars = enumerate_linear_characters(cover.stab)
    assert len(chars) == 8
    order4 = by_order(chars, 4)[0]
    rad = radicalize(cover, order4)
    assert rad.r == 8
    assert rad.order() == 48384


def test_detect_sl25():
    cover, x, chars = sl2_chars(5)
    detects = {c.modulus: detect_higman(cover, c, x) for c in chars}
    assert detects[1] is True  # trivial character: condition reads 1 = 1
    assert detects[2] is True  # quadratic-residue character
    assert detects[4] is False  # order-4 characters fail


def test_detect_rejects_stabilizer_x():
    cover, x, chars = sl2_chars(5)
    with pytest.raises(RadicalError):
        detect_higman(cover, chars[0], cover.stab.elements[0])


def test_detect_choice_independence():
    rng = random.Random(42)
    for q in (5, 7, 13):
        cover, x, chars = sl2_chars(q)
        for alpha in chars:
            baseline = detect_higman(cover, alpha, x)
            for _ in range(5):
                y = random_outside_stabilizer(cover, rng)
                assert detect_higman(cover, alpha, y) == baseline


def test_find_key_psl_signs():
    # z = 1 when q = 1 mod 4, z = i when q = 3 mod 4
    for q, expected in ((5, 0), (13, 0), (7, 1), (11, 1)):
        cover, x, chars = sl2_chars(q)
        quad = by_order(chars, 2)[0]
        rad = radicalize(cover, quad)
        key = find_key(rad, x)
        assert key.z_exponent == expected, q


def test_find_key_su3_sign_choices():
    cover, x, eta_b0 = su3_cover(3)
    chars = enumerate_linear_characters(cover.stab)
    order4 = by_order(chars, 4)[0]
    rad = radicalize(cover, order4)
    generic = find_key(rad, x)
    assert generic.z_exponent == 0  # least square root of alpha(1) = 1
    preferred = (2 * order4.exponent(eta_b0)) % rad.r
    assert preferred == 4  # the opposite sign: exponent r' in C_r
    key = find_key(rad, x, prefer_exponent=preferred)
    assert key.z_exponent == 4
    with pytest.raises(RadicalError):
        find_key(rad, x, prefer_exponent=1)  # not a square root


def test_find_key_requires_double_transitivity():
    ops = PermOps(4)
    C4 = closure([(1, 2, 3, 0)], ops, name="C4")
    cover = cover_from_group(C4, natural_permutation_action(C4))
    trivial = enumerate_linear_characters(cover.stab)[0]
    rad = radicalize(cover, trivial, verify=False)
    with pytest.raises(RadicalError):
        find_key(rad, (1, 2, 3, 0))


def test_params_sl2():
    for q, expected in ((5, (2, 0, 2, 0)), (7, (0, 3, 0, 3))):
        cover, x, chars = sl2_chars(q)
        quad = by_order(chars, 2)[0]
        rad = radicalize(cover, quad)
        key = find_key(rad, x)
        params = roux_params_from_radicalization(rad, key)
        assert params.coeffs == expected


def test_params_trivial_character():
    cover, x, chars = sl2_chars(5)
    trivial = by_order(chars, 1)[0]
    rad = radicalize(cover, trivial)
    key = find_key(rad, x)
    params = roux_params_from_radicalization(rad, key)
    assert params.coeffs == (4, 0)  # c_1 = n-2, c_{-1} = 0


def test_roux_from_higman_pair_sl25():
    cover, x, chars = sl2_chars(5)
    quad = by_order(chars, 2)[0]
    rad = radicalize(cover, quad)
    key = find_key(rad, x)
    B = roux_from_higman_pair(rad, key)
    assert (B.n, B.r) == (6, 4)
    params = verify_roux(B)
    assert params.coeffs == roux_params_from_radicalization(rad, key).coeffs
    # the k = 1 signature carries a (6, 3) equiangular tight frame
    from rouxforge.lines import gram_from_signature, verify_etf

    gram, _ = gram_from_signature(signature_matrix(B, 1, params))
    cert = verify_etf(gram)
    assert cert.passed and cert.d == 3 and cert.real


def test_roux_from_higman_pair_sl27_not_real():
    cover, x, chars = sl2_chars(7)
    quad = by_order(chars, 2)[0]
    rad = radicalize(cover, quad)
    key = find_key(rad, x)
    B = roux_from_higman_pair(rad, key)
    assert (B.n, B.r) == (8, 4)
    from rouxforge.lines import gram_from_signature, is_real_line_sequence, verify_etf

    S = signature_matrix(B, 1)
    cert = verify_etf(gram_from_signature(S)[0])
    assert cert.passed and cert.d == 4
    assert not is_real_line_sequence(S)
    assert not cert.real


def test_key_sign_flip_translates_parameters():
    cover, x, chars = sl2_chars(5)
    quad = by_order(chars, 2)[0]
    rad = radicalize(cover, quad)
    key = find_key(rad, x)
    other = Key(key.x, (key.z_exponent + rad.r_prime) % rad.r, rad.r)
    p1 = roux_params_from_radicalization(rad, key)
    p2 = roux_params_from_radicalization(rad, other)
    shift = rad.r_prime
    assert all(
        p2.coeffs[w] == p1.coeffs[(w + shift) % rad.r] for w in range(rad.r)
    )
    # both keys generate the same lines: signature spectra coincide
    B1 = roux_from_higman_pair(rad, key)
    B2 = roux_from_higman_pair(rad, other)
    for k in range(rad.r):
        s1 = np.linalg.eigvalsh(signature_matrix(B1, k, p1))
        s2 = np.linalg.eigvalsh(signature_matrix(B2, k, p2))
        assert np.allclose(sorted(s1), sorted(s2), atol=1e-9) or np.allclose(
            sorted(s1), sorted(np.linalg.eigvalsh(signature_matrix(B2, (-k) % rad.r, p2))), atol=1e-9
        )


def test_shared_table_matches_fresh_runs():
    cover, x, chars = sl2_chars(7)
    table = HigmanDecompositionTable(cover, x)
    quad = by_order(chars, 2)[0]
    rad = radicalize(cover, quad)
    key = find_key(rad, x)
    assert roux_from_higman_pair(rad, key, table) == roux_from_higman_pair(rad, key)
    assert (
        roux_params_from_radicalization(rad, key, table).coeffs
        == roux_params_from_radicalization(rad, key).coeffs
    )


def test_trivial_character_dims():
    assert trivial_character_dims(6) == {1, 5}
    assert trivial_character_dims(3) == {1, 2}
    with pytest.raises(RadicalError):
        trivial_character_dims(2)


def test_higman_axioms_s3_trivial():
    cover = s3_cover()
    trivial = by_order(enumerate_linear_characters(cover.stab), 1)[0]
    rad = radicalize(cover, trivial)
    key = find_key(rad, cover.first_outside_stabilizer())
    Gt, H, _ = rad.materialize()
    report = verify_higman_axioms(Gt, H, (key.x, key.z_exponent))
    assert report.passed, report.first_failure


def test_higman_axioms_sl25_quadratic():
    cover, x, chars = sl2_chars(5, materialize=True)
    quad = by_order(chars, 2)[0]
    rad = radicalize(cover, quad)
    key = find_key(rad, x)
    Gt, H, _ = rad.materialize()
    report = verify_higman_axioms(Gt, H, (key.x, key.z_exponent))
    assert report.passed, report.first_failure
    assert detect_higman(cover, quad, x) is True


def test_higman_axioms_h5_fails_for_nonreal_character():
    cover, x, chars = sl2_chars(5, materialize=True)
    order4 = by_order(chars, 4)[0]
    assert detect_higman(cover, order4, x) is False
    rad = radicalize(cover, order4, verify=False)
    candidate = find_key(rad, x)
    Gt, H, _ = rad.materialize()
    report = verify_higman_axioms(Gt, H, (candidate.x, candidate.z_exponent))
    assert not report.passed
    assert not report.axioms["H5"]


def test_higman_axioms_rejects_key_in_normalizer():
    cover = s3_cover()
    trivial = by_order(enumerate_linear_characters(cover.stab), 1)[0]
    rad = radicalize(cover, trivial)
    Gt, H, _ = rad.materialize()
    inside = (cover.stab.elements[0], 1)
    with pytest.raises(RadicalError):
        verify_higman_axioms(Gt, H, inside)


def test_normalizer_identity_small_instances():
    # radicalize() verifies N(H) = G~0* automatically below the cap
    cover = s3_cover()
    for alpha in enumerate_linear_characters(cover.stab):
        radicalize(cover, alpha)
    cover7, x7, chars7 = sl2_chars(7, materialize=True)
    radicalize(cover7, by_order(chars7, 2)[0])  # order 1344 product group


def test_gram_idempotent_rank_sl27():
    from rouxforge.roux import gram_from_idempotent, matrix_rank_by_threshold

    cover, x, chars = sl2_chars(7)
    quad = by_order(chars, 2)[0]
    rad = radicalize(cover, quad)
    key = find_key(rad, x)
    B = roux_from_higman_pair(rad, key)
    G = gram_from_idempotent(B, 1, -1)
    assert matrix_rank_by_threshold(G) == 4


def test_real_line_shortcut_real_key():
    # real character with a key z in {1, -1}: every branch is real
    for q in (5, 13):
        cover, x, chars = sl2_chars(q)
        quad = by_order(chars, 2)[0]
        rad = radicalize(cover, quad)
        key = find_key(rad, x)
        assert key.z_exponent in (0, rad.r_prime)  # z = +-1
        B = roux_from_higman_pair(rad, key)
        params = verify_roux(B)
        from rouxforge.roux import is_real_lines

        assert all(is_real_lines(params, k) for k in range(rad.r))


def test_real_line_shortcut_involution():
    # real character and a self-inverse x outside the stabilizer
    cover, x, eta_b0 = su3_cover(3)
    assert cover.ops.mul(x, x) == cover.ops.identity
    chars = enumerate_linear_characters(cover.stab)
    real = [c for c in chars if c.modulus == 2][0]
    rad = radicalize(cover, real)
    key = find_key(rad, x, prefer_exponent=(2 * real.exponent(eta_b0)) % rad.r)
    B = roux_from_higman_pair(rad, key)
    params = verify_roux(B)
    from rouxforge.roux import is_real_lines

    assert all(is_real_lines(params, k) for k in range(rad.r))
