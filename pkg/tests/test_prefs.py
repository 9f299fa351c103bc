import json
import random
from fractions import Fraction

import pytest

from maxlot import (
    AlternativeSet,
    Lottery,
    PreferenceProfile,
    margin_matrix,
    pairwise_counts,
    selection_matrix,
)
from maxlot.prefs import SelectionMatrix, coerce_weight

from helpers import random_profile, reversed_profile


def test_alternative_set_validation():
    with pytest.raises(ValueError):
        AlternativeSet(["only"])
    with pytest.raises(ValueError):
        AlternativeSet(["a", "a"])
    with pytest.raises(ValueError):
        AlternativeSet(["a", ""])
    alts = AlternativeSet(["x", "y", "z"])
    assert alts.index("y") == 1
    assert "z" in alts and "w" not in alts
    with pytest.raises(KeyError):
        alts.index("w")


def test_profile_rejects_non_permutations(rgb):
    with pytest.raises(ValueError):
        PreferenceProfile(rgb, (((0, 0, 1), Fraction(1)),))
    with pytest.raises(ValueError):
        PreferenceProfile(rgb, (((0, 1, 2), Fraction(0)),))  # zero total weight


def test_coerce_weight_is_exact():
    assert coerce_weight(3) == Fraction(3)
    assert coerce_weight(0.33) == Fraction(33, 100)
    assert coerce_weight("1/3") == Fraction(1, 3)
    with pytest.raises(ValueError):
        coerce_weight(float("nan"))
    with pytest.raises(TypeError):
        coerce_weight(True)


def test_pairwise_counts_majority_profile(majority3):
    counts = pairwise_counts(majority3)
    n = counts.n_matrix
    R, G, B = 0, 1, 2
    assert n[R][G] == 5 and n[R][B] == 2 and n[B][R] == 3
    assert n[B][G] == 3 and n[G][B] == 2 and n[G][R] == 0
    assert counts.total_weight == 5
    assert all(x == 0 for row in counts.e_matrix for x in row)


def test_pairwise_counts_single_voter():
    profile = PreferenceProfile.from_rankings(["a", "b"], [(["a", "b"], 1)])
    counts = pairwise_counts(profile)
    assert counts.n_matrix[0][1] == 1 and counts.n_matrix[1][0] == 0


def test_pairwise_counts_cyclic_profile(cyclic):
    counts = pairwise_counts(cyclic)
    n = counts.n_matrix
    R, G, B = 0, 1, 2
    assert n[R][B] == 2 and n[B][G] == 2 and n[G][R] == 2
    assert n[B][R] == 1 and n[G][B] == 1 and n[R][G] == 1


def test_margin_matrix_examples(majority3, cyclic):
    m1 = margin_matrix(pairwise_counts(majority3)).m_matrix
    assert m1 == ((0, 5, -1), (-5, 0, -1), (1, 1, 0))
    m2 = margin_matrix(pairwise_counts(cyclic)).m_matrix
    assert m2 == ((0, -1, 1), (1, 0, -1), (-1, 1, 0))


def test_margin_of_all_indifferent_counts(rgb):
    from maxlot import PairwiseCounts
    from maxlot.prefs import _freeze, _zeros

    m = 3
    e = _zeros(m)
    for a in range(m):
        for b in range(m):
            if a != b:
                e[a][b] = Fraction(4)
    counts = PairwiseCounts(rgb, _freeze(_zeros(m)), _freeze(e), Fraction(4))
    margins = margin_matrix(counts)
    assert all(x == 0 for row in margins.m_matrix for x in row)
    sel = selection_matrix(counts)
    assert sel.p_matrix[0][1] == Fraction(1, 2)


def test_selection_matrix_examples(majority3, cyclic):
    sel = selection_matrix(pairwise_counts(majority3))
    assert sel.p_matrix[2][0] == Fraction(3, 5)
    assert sel.p_matrix[0][1] == 1
    sel2 = selection_matrix(pairwise_counts(cyclic))
    assert sel2.p_matrix[0][2] == Fraction(2, 3)


def test_count_identity_and_margin_reversal_on_random_profiles():
    rng = random.Random(1234)
    for _ in range(100):
        profile = random_profile(rng)
        counts = pairwise_counts(profile)
        m = len(profile.alternatives)
        n_mat, e_mat = counts.n_matrix, counts.e_matrix
        total = counts.total_weight
        for a in range(m):
            for b in range(m):
                if a != b:
                    assert n_mat[a][b] + n_mat[b][a] + e_mat[a][b] == total

        margins = margin_matrix(counts)
        for a in range(m):
            for b in range(m):
                assert margins.m_matrix[a][b] == -margins.m_matrix[b][a]

        rev = margin_matrix(pairwise_counts(reversed_profile(profile)))
        for a in range(m):
            for b in range(m):
                assert rev.m_matrix[a][b] == -margins.m_matrix[a][b]

        # proportional margins against selection probabilities:
        # M/n == 2*N/n - 1 + E/n off the diagonal, exactly.
        sel = selection_matrix(counts)
        norm = margins.normalized()
        for a in range(m):
            for b in range(m):
                if a != b:
                    lhs = norm.m_matrix[a][b]
                    rhs = 2 * Fraction(n_mat[a][b], 1) / total - 1 + e_mat[a][b] / total
                    assert lhs == rhs
                    assert sel.p_matrix[a][b] + sel.p_matrix[b][a] == 1


def test_selection_matrix_from_floats_validates(rgb):
    good = SelectionMatrix.from_probabilities(
        rgb, [[0.5, 0.7, 0.2], [0.3, 0.5, 0.9], [0.8, 0.1, 0.5]]
    )
    assert good.p_matrix[0][1] == 0.7
    with pytest.raises(ValueError):
        SelectionMatrix.from_probabilities(
            rgb, [[0.5, 0.7, 0.2], [0.4, 0.5, 0.9], [0.8, 0.1, 0.5]]
        )


def test_lottery_invariants(rgb):
    lot = Lottery(rgb, [0.5, 0.5, -1e-13])
    assert lot.probabilities[2] == 0.0
    assert abs(sum(lot.probabilities) - 1.0) < 1e-15
    with pytest.raises(ValueError):
        Lottery(rgb, [0.6, 0.6, 0.0])
    with pytest.raises(ValueError):
        Lottery(rgb, [1.1, -0.1, 0.0])
    assert Lottery.point_mass(rgb, 2).prob("B") == 1.0
    assert Lottery.uniform(rgb).tv_distance(Lottery.point_mass(rgb, 0)) == pytest.approx(
        2 / 3
    )


def test_lottery_serialization_digits(rgb):
    lot = Lottery(rgb, [1 / 3, 1 / 3, 1 / 3])
    data = json.loads(lot.to_json())
    assert data["R"] == pytest.approx(1 / 3, abs=1e-12)
    assert len(str(data["R"]).replace("0.", "")) <= 12


def test_profile_json_round_trip(majority3, tmp_path):
    path = tmp_path / "profile.json"
    majority3.save(path)
    loaded = PreferenceProfile.load(path)
    assert loaded == majority3
    # serialize -> parse -> serialize is the identity on the JSON form
    assert loaded.to_json_dict() == majority3.to_json_dict()


def test_profile_json_rational_weights(tmp_path):
    profile = PreferenceProfile.from_rankings(
        ["x", "y"], [(["x", "y"], "1/3"), (["y", "x"], 0.34)]
    )
    path = tmp_path / "p.json"
    profile.save(path)
    loaded = PreferenceProfile.load(path)
    assert loaded.groups[0][1] == Fraction(1, 3)
    assert loaded.groups[1][1] == Fraction(34, 100)
