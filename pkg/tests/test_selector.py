import numpy as np
import pytest

from aefs import (
    AutoencoderParams,
    FeatureRanking,
    Hyperparams,
    TrainConfig,
    forward,
    rank_features,
    reconstruct_from_selected,
    seeded_init,
    select_top,
    train,
)


def params_with_row_norms():
    # encoder rows with norms 5, 0, 3
    w1 = np.array([[3.0, 4.0], [0.0, 0.0], [0.0, 3.0]])
    w2 = np.ones((2, 3))
    return AutoencoderParams(w1, w2, "sigmoid", "identity")


class TestRankFeatures:
    def test_scores_and_order(self):
        r = rank_features(params_with_row_norms())
        np.testing.assert_allclose(r.scores, [5.0, 0.0, 3.0])
        np.testing.assert_array_equal(r.order, [0, 2, 1])

    def test_all_zero_ties_break_by_index(self):
        params = AutoencoderParams(np.zeros((4, 2)), np.zeros((2, 4)))
        r = rank_features(params)
        np.testing.assert_array_equal(r.order, [0, 1, 2, 3])
        assert np.all(r.scores == 0.0)

    def test_row_permutation_equivariance(self):
        rng = np.random.default_rng(0)
        w1 = rng.standard_normal((6, 3))
        w2 = rng.standard_normal((3, 6))
        base = rank_features(AutoencoderParams(w1, w2))
        perm = rng.permutation(6)
        permuted = rank_features(AutoencoderParams(w1[perm], w2[:, perm]))
        np.testing.assert_allclose(permuted.scores, base.scores[perm])

    def test_ignores_decoder(self):
        rng = np.random.default_rng(1)
        w1 = rng.standard_normal((5, 3))
        a = rank_features(AutoencoderParams(w1, rng.standard_normal((3, 5))))
        b = rank_features(AutoencoderParams(w1, rng.standard_normal((3, 5))))
        np.testing.assert_array_equal(a.scores, b.scores)
        np.testing.assert_array_equal(a.order, b.order)

    def test_provenance_carried(self):
        r = rank_features(params_with_row_norms(), {"alpha": 0.1})
        assert r.provenance == {"alpha": 0.1}


class TestSelectTop:
    def test_all_features(self):
        r = rank_features(params_with_row_norms())
        assert set(select_top(r, 3)) == {0, 1, 2}

    def test_single_best(self):
        r = rank_features(params_with_row_norms())
        np.testing.assert_array_equal(select_top(r, 1), [0])

    def test_tie_break_on_zero_scores(self):
        params = AutoencoderParams(np.zeros((4, 2)), np.zeros((2, 4)))
        np.testing.assert_array_equal(select_top(rank_features(params), 2), [0, 1])

    def test_nesting(self):
        rng = np.random.default_rng(2)
        params = AutoencoderParams(rng.standard_normal((8, 3)), rng.standard_normal((3, 8)))
        r = rank_features(params)
        for s1 in range(1, 9):
            for s2 in range(s1, 9):
                assert set(select_top(r, s1)) <= set(select_top(r, s2))

    def test_out_of_range(self):
        r = rank_features(params_with_row_norms())
        with pytest.raises(ValueError, match="s must be"):
            select_top(r, 0)
        with pytest.raises(ValueError, match="s must be"):
            select_top(r, 4)


class TestRankingValidation:
    def test_rejects_bad_permutation(self):
        with pytest.raises(ValueError, match="permutation"):
            FeatureRanking(np.array([1.0, 2.0]), np.array([0, 0]))

    def test_rejects_unsorted_order(self):
        with pytest.raises(ValueError, match="descending"):
            FeatureRanking(np.array([1.0, 2.0]), np.array([0, 1]))


class TestEndToEndPermutationEquivariance:
    def test_training_commutes_with_feature_permutation(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((25, 7))
        x = (x - x.mean(0)) / x.std(0)
        cfg = TrainConfig(hidden_size=3, hp=Hyperparams(alpha=0.01, beta=0.01),
                          max_epochs=40, seed=5)
        init = seeded_init(7, cfg)
        perm = rng.permutation(7)

        params_a, _ = train(x, cfg, init=init)
        rank_a = rank_features(params_a)
        init_b = AutoencoderParams(init.w1[perm], init.w2[:, perm],
                                   init.act_hidden, init.act_output)
        params_b, _ = train(x[:, perm], cfg, init=init_b)
        rank_b = rank_features(params_b)

        np.testing.assert_allclose(rank_b.scores, rank_a.scores[perm], rtol=1e-9)
        np.testing.assert_array_equal(perm[rank_b.order], rank_a.order)


class TestReconstructFromSelected:
    def test_full_selection_matches_forward(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((6, 4))
        params = AutoencoderParams(rng.standard_normal((4, 3)), rng.standard_normal((3, 4)))
        recon = reconstruct_from_selected(params, x, range(4), impute="zero")
        np.testing.assert_array_equal(recon, forward(params, x)[1])

    def test_empty_selection_zero_impute(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((6, 4))
        params = AutoencoderParams(rng.standard_normal((4, 3)), rng.standard_normal((3, 4)))
        recon = reconstruct_from_selected(params, x, [], impute="zero")
        np.testing.assert_array_equal(recon, forward(params, np.zeros_like(x))[1])

    def test_feature_mean_impute(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((10, 3))
        params = AutoencoderParams(rng.standard_normal((3, 2)), rng.standard_normal((2, 3)))
        recon = reconstruct_from_selected(params, x, [1], impute="feature_mean")
        masked = np.tile(x.mean(axis=0), (10, 1))
        masked[:, 1] = x[:, 1]
        np.testing.assert_array_equal(recon, forward(params, masked)[1])

    def test_index_out_of_range(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((5, 3))
        params = AutoencoderParams(rng.standard_normal((3, 2)), rng.standard_normal((2, 3)))
        with pytest.raises(ValueError, match="selected indices"):
            reconstruct_from_selected(params, x, [0, 3])

    def test_unknown_impute(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((5, 3))
        params = AutoencoderParams(rng.standard_normal((3, 2)), rng.standard_normal((2, 3)))
        with pytest.raises(ValueError, match="impute"):
            reconstruct_from_selected(params, x, [0], impute="median")
