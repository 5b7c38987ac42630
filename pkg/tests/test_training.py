"""Concept mining, similarity, family construction, pairing, edge weights."""
import numpy as np
import pytest

from conftest import make_blob_packs
from ifcm.ifs import (
    IntuitionisticFuzzySet,
    PointwiseMax,
    Scaled,
    Trapezoidal,
    Triangular,
    icoa,
    ifs_intersection,
    ifs_union,
    ifs_validate,
    linguistic_partition,
)
from ifcm.training import (
    ClassSpec,
    Medoid,
    TrainingConfig,
    TrainingDataError,
    build_mf_family,
    mine_concepts,
    pair_ifs,
    similarity,
    train,
    weight_input_input,
    weight_input_output,
)

GRID01 = np.linspace(0.0, 1.0, 1001)


def med(vec, class_id=1):
    return Medoid(np.asarray(vec, dtype=float), class_id, "m")


class TestMineConcepts:
    def test_two_well_separated_groups(self):
        vectors = np.array([[0.0], [0.1], [1.0], [1.1]])
        medoids = mine_concepts({1: vectors}, 2)
        values = sorted(m.vector[0] for m in medoids)
        # exhaustive 2-partition: the only optimal split is {0, .1}|{1, 1.1}
        assert values[0] in (0.0, 0.1)
        assert values[1] in (1.0, 1.1)

    def test_cluster_count_equal_to_vectors(self):
        vectors = np.array([[0.2, 0.0], [0.5, 1.0], [0.9, 0.4]])
        medoids = mine_concepts({1: vectors}, 3)
        got = sorted(tuple(m.vector) for m in medoids)
        assert got == sorted(tuple(v) for v in vectors)

    def test_identical_vectors_single_cluster(self):
        vectors = np.tile([0.3, 0.7], (5, 1))
        medoids = mine_concepts({2: vectors}, 1)
        assert len(medoids) == 1
        np.testing.assert_array_equal(medoids[0].vector, [0.3, 0.7])
        assert medoids[0].class_id == 2

    def test_medoids_are_members(self):
        rng = np.random.default_rng(42)
        vectors = rng.normal(size=(40, 3))
        for m in mine_concepts({1: vectors}, 4):
            assert any(np.array_equal(m.vector, v) for v in vectors)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        vectors = rng.normal(size=(30, 2))
        a = mine_concepts({1: vectors, 2: vectors + 4}, 3, seed=9)
        b = mine_concepts({1: vectors, 2: vectors + 4}, 3, seed=9)
        for ma, mb in zip(a, b):
            np.testing.assert_array_equal(ma.vector, mb.vector)
            assert ma.concept_label == mb.concept_label

    def test_too_few_vectors(self):
        with pytest.raises(TrainingDataError, match="class 1"):
            mine_concepts({1: np.zeros((2, 3))}, 5)

    def test_labels_carry_class_names(self):
        medoids = mine_concepts({1: np.array([[0.0], [1.0]])}, 2,
                                class_names={1: "Flamingo"})
        assert [m.concept_label for m in medoids] == ["Flamingo-part1",
                                                      "Flamingo-part2"]


class TestSimilarity:
    def test_equidistant_pair(self):
        z = similarity([[0.5, 0.5]], [med([0.0, 0.5]), med([1.0, 0.5])])
        np.testing.assert_allclose(z, [0.5, 0.5])

    def test_exact_match_takes_all(self):
        z = similarity([[0.3, 0.4]], [med([0.3, 0.4]), med([0.9, 0.9])])
        np.testing.assert_allclose(z, [1.0, 0.0])

    def test_known_three_medoid_values(self):
        # direct formula: for each region, 1 - dist_m / (sum of dists),
        # averaged over the 5 regions
        d = [[0.2, 0.1, 0.9], [0.8, 0.4, 0.3], [0.5, 0.5, 0.5],
             [0.1, 0.9, 0.2], [0.7, 0.7, 0.1]]
        r = [med([0.25, 0.15, 0.85]), med([0.75, 0.45, 0.25]),
             med([0.15, 0.85, 0.25])]
        np.testing.assert_allclose(
            similarity(d, r),
            [0.6049906441442574, 0.7340628853507569, 0.6609464705049856],
            atol=1e-15)

    def test_ratio_terms_sum_per_region(self):
        # sum over medoids of (1 - ratio) is exactly M - 1 for each region
        rng = np.random.default_rng(42)
        for _ in range(30):
            n_med = int(rng.integers(2, 6))
            d = rng.normal(size=(1, 4))
            medoids = [med(rng.normal(size=4)) for _ in range(n_med)]
            z = similarity(d, medoids)
            np.testing.assert_allclose(z.sum(), n_med - 1, atol=1e-12)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(3)
        d = rng.normal(size=(6, 3))
        medoids = [med(rng.normal(size=3)) for _ in range(4)]
        z = similarity(d, medoids)
        perm = [2, 0, 3, 1]
        z_perm = similarity(d, [medoids[i] for i in perm])
        np.testing.assert_allclose(z_perm, z[perm], atol=1e-14)

    def test_region_equal_to_all_medoids(self):
        z = similarity([[0.5]], [med([0.5]), med([0.5])])
        np.testing.assert_allclose(z, [0.5, 0.5])  # uniform 1 - 1/2

    def test_needs_two_medoids(self):
        with pytest.raises(TrainingDataError):
            similarity([[0.1]], [med([0.1])])

    def test_outputs_in_unit_interval(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            d = rng.normal(size=(int(rng.integers(1, 7)), 3))
            medoids = [med(rng.normal(size=3))
                       for _ in range(int(rng.integers(2, 6)))]
            z = similarity(d, medoids)
            assert z.min() >= 0.0 and z.max() <= 1.0


class TestBuildMfFamily:
    def test_single_value_triangular_covers_domain(self):
        fns = build_mf_family([0.4] * 8, 1, "triangular")
        assert len(fns) == 1
        assert fns[0](0.4) == 1.0
        assert fns[0](0.0) > 0.0 and fns[0](1.0) > 0.0

    def test_two_cluster_apexes(self):
        values = [0.1] * 10 + [0.9] * 10
        fns = build_mf_family(values, 2, "triangular")
        assert [f.peak for f in fns] == [0.1, 0.9]

    def test_family_size_clamped_to_distinct(self):
        fns = build_mf_family([0.2, 0.2, 0.6, 0.6, 0.8], 10, "triangular")
        assert len(fns) == 3
        assert [f.peak for f in fns] == [0.2, 0.6, 0.8]

    def test_triangular_shoulders_cover_endpoints(self):
        fns = build_mf_family([0.3, 0.5, 0.7], 3, "triangular")
        assert isinstance(fns[0], Trapezoidal) and fns[0](0.0) == 1.0
        assert isinstance(fns[-1], Trapezoidal) and fns[-1](1.0) == 1.0
        assert isinstance(fns[1], Triangular)
        assert fns[1].a == 0.3 and fns[1].b == 0.5 and fns[1].c == 0.7

    def test_no_coverage_gaps(self):
        rng = np.random.default_rng(42)
        for shape in ("triangular", "gaussian"):
            for _ in range(15):
                values = rng.uniform(0, 1, int(rng.integers(1, 40)))
                fns = build_mf_family(values, int(rng.integers(1, 7)), shape)
                cover = np.max([f(GRID01) for f in fns], axis=0)
                assert cover.min() > 0.0

    def test_gaussian_widths_follow_gaps(self):
        fns = build_mf_family([0.2, 0.8], 2, "gaussian")
        assert [f.center for f in fns] == [0.2, 0.8]
        np.testing.assert_allclose([f.sigma for f in fns], [0.3, 0.3])
        tight = build_mf_family([0.2, 0.21, 0.8], 3, "gaussian")
        assert tight[0].sigma == 0.05  # floored
        assert tight[1].sigma == 0.05
        np.testing.assert_allclose(tight[2].sigma, 0.295)

    def test_gaussian_single_value(self):
        fns = build_mf_family([0.6], 1, "gaussian")
        assert fns[0].center == 0.6 and fns[0].sigma == 0.5

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            build_mf_family([], 2)
        with pytest.raises(ValueError):
            build_mf_family([0.5], 0)
        with pytest.raises(ValueError):
            build_mf_family([0.5], 2, "sinusoid")


class TestPairIfs:
    def test_disjoint_supports_pair_up(self):
        b = [Triangular(0.6, 0.9, 1.0)]
        q = [Triangular(0.0, 0.1, 0.4)]
        pairs = pair_ifs(b, q)
        assert len(pairs) == 1
        assert pairs[0].mu_fn is b[0] and pairs[0].gamma_fn is q[0]
        assert pairs[0].label == "Very High"  # term of apex 0.9

    def test_identical_unit_shapes_fall_back_to_damping(self):
        tri = Triangular(0.0, 0.5, 1.0)
        pairs = pair_ifs([tri], [tri])
        assert len(pairs) == 1
        assert isinstance(pairs[0].mu_fn, Scaled)
        assert pairs[0].mu_fn.factor == 0.5
        assert ifs_validate(pairs[0])

    def test_matches_dense_grid_filter(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            def rand_family():
                out = []
                for _ in range(3):
                    a, b, c = np.sort(rng.uniform(0, 1, 3))
                    out.append(Triangular(a, b, c))
                return out
            bs, qs = rand_family(), rand_family()
            pairs = pair_ifs(bs, qs)
            expected = [(b, q) for b in bs for q in qs
                        if np.max(b(GRID01) + q(GRID01)) <= 1.0 + 1e-12]
            if expected:
                assert [(p.mu_fn, p.gamma_fn) for p in pairs] == expected
            else:
                assert all(isinstance(p.mu_fn, Scaled) for p in pairs)
            assert all(ifs_validate(p) for p in pairs)

    def test_labels_use_supplied_partition(self):
        pairs = pair_ifs([Triangular(0.6, 0.9, 1.0)],
                         [Triangular(0.0, 0.1, 0.4)],
                         partition=linguistic_partition(3))
        assert pairs[0].label == "High"


SYM_SET = IntuitionisticFuzzySet(
    Triangular(0.3, 0.5, 0.7),
    PointwiseMax((Triangular(0.0, 0.15, 0.3), Triangular(0.7, 0.85, 1.0))))


class TestWeightInputOutput:
    def test_single_point_evidence(self):
        s = IntuitionisticFuzzySet(Triangular(0.4, 0.75, 1.0),
                                   Triangular(0.0, 0.2, 0.55))
        w, rel = weight_input_output([s], [0.7, 0.7, 0.7])
        np.testing.assert_allclose(w.mu, s.mu_fn(0.7))
        np.testing.assert_allclose(w.gamma, s.gamma_fn(0.7))
        assert rel is s  # single-set union collapses to the set itself

    def test_symmetric_evidence_centers(self):
        w, rel = weight_input_output([SYM_SET], [0.4, 0.6])
        # icoa of symmetric weights around 0.5 lands exactly on 0.5
        np.testing.assert_allclose(w.mu, 1.0)
        np.testing.assert_allclose(rel.mu_fn(0.5), 1.0)

    def test_matches_composed_oracle(self):
        rng = np.random.default_rng(42)
        s1 = IntuitionisticFuzzySet(Triangular(0.5, 0.8, 1.0),
                                    Triangular(0.0, 0.2, 0.45))
        s2 = IntuitionisticFuzzySet(Triangular(0.55, 0.9, 1.0),
                                    Triangular(0.05, 0.3, 0.5))
        sims = rng.uniform(0.5, 1.0, 10)
        w, rel = weight_input_output([s1, s2], sims)
        union = ifs_union([s1, s2])
        z = icoa(union, sims)
        np.testing.assert_allclose(w.mu, union.mu_fn(z), atol=1e-15)
        np.testing.assert_allclose(w.gamma, union.gamma_fn(z), atol=1e-15)

    def test_indeterminate_gives_neutral(self):
        s = IntuitionisticFuzzySet(Triangular(0.6, 0.8, 1.0),
                                   Triangular(0.0, 0.2, 0.5))
        diag = {}
        w, _ = weight_input_output([s], [0.1, 0.2], diag)
        assert (w.mu, w.gamma) == (0.0, 0.0)
        assert diag["neutral_edges"] == 1


class TestWeightInputInput:
    def test_idempotent_against_input_output(self):
        s = IntuitionisticFuzzySet(Triangular(0.5, 0.8, 1.0),
                                   Triangular(0.0, 0.2, 0.45))
        sims = [0.6, 0.75, 0.9]
        w_io, _ = weight_input_output([s], sims)
        w_ii, _ = weight_input_input([s], [s], sims, sims)
        np.testing.assert_allclose((w_ii.mu, w_ii.gamma),
                                   (w_io.mu, w_io.gamma), atol=1e-15)

    def test_disjoint_memberships_annihilate(self):
        s1 = IntuitionisticFuzzySet(Triangular(0.0, 0.2, 0.4),
                                    Triangular(0.6, 0.8, 1.0))
        s2 = IntuitionisticFuzzySet(Triangular(0.6, 0.8, 1.0),
                                    Triangular(0.0, 0.2, 0.4))
        diag = {}
        w, _ = weight_input_input([s1], [s2], [0.2], [0.8], diag)
        assert (w.mu, w.gamma) == (0.0, 0.0)
        assert diag["neutral_edges"] == 1

    def test_matches_composed_oracle(self):
        rng = np.random.default_rng(7)
        s1 = IntuitionisticFuzzySet(Triangular(0.4, 0.7, 1.0),
                                    Triangular(0.0, 0.1, 0.35))
        s2 = IntuitionisticFuzzySet(Triangular(0.5, 0.85, 1.0),
                                    Triangular(0.0, 0.25, 0.45))
        sims1 = rng.uniform(0.55, 0.95, 6)
        sims2 = rng.uniform(0.6, 1.0, 4)
        w, rel = weight_input_input([s1], [s2], sims1, sims2)
        inter = ifs_intersection(s1, s2)
        z = icoa(inter, np.concatenate([sims1, sims2]))
        np.testing.assert_allclose(w.mu, inter.mu_fn(z), atol=1e-15)
        np.testing.assert_allclose(w.gamma, inter.gamma_fn(z), atol=1e-15)

    def test_no_shared_evidence_gives_neutral(self):
        s = IntuitionisticFuzzySet(Triangular(0.5, 0.8, 1.0),
                                   Triangular(0.0, 0.2, 0.45))
        diag = {}
        w, rel = weight_input_input([s], [s], [], [], diag)
        assert (w.mu, w.gamma) == (0.0, 0.0)
        assert diag["neutral_edges"] == 1
        assert rel is not None  # relation survives for inspection


TRAIN_CFG = TrainingConfig(clusters_per_class=2, e_b=4, e_q=4,
                           mf_shape="triangular", seed=0)


class TestTrain:
    def test_three_class_topology(self):
        packs = make_blob_packs(per_class=10, n_classes=3, seed=1)
        model = train(packs, TRAIN_CFG)
        assert model.n_inputs == 6
        assert model.n_outputs == 3
        assert model.n_concepts == 9
        io = [e for e in model.edges if e.kind == "input_output"]
        ii = [e for e in model.edges if e.kind == "input_input"]
        assert len(io) == 6 * 3
        assert len(ii) == 6 * 5

    def test_minimal_two_class_topology(self):
        packs = make_blob_packs(per_class=6, n_classes=2, seed=2)
        cfg = TrainingConfig(clusters_per_class=1, e_b=3, e_q=3,
                             mf_shape="triangular")
        model = train(packs, cfg)
        assert model.n_concepts == 4
        io = [e for e in model.edges if e.kind == "input_output"]
        ii = [e for e in model.edges if e.kind == "input_input"]
        assert len(io) == 4
        assert len(ii) == 2  # one symmetric pair

    def test_input_input_weights_symmetric(self):
        packs = make_blob_packs(per_class=8, n_classes=2, seed=3)
        model = train(packs, TRAIN_CFG)
        w = model.weight_matrix()
        m = model.n_inputs
        np.testing.assert_array_equal(w.w_mu[:m, :m], w.w_mu[:m, :m].T)
        np.testing.assert_array_equal(w.w_gamma[:m, :m], w.w_gamma[:m, :m].T)

    def test_outputs_are_sinks(self):
        packs = make_blob_packs(per_class=8, n_classes=2, seed=4)
        model = train(packs, TRAIN_CFG)
        w = model.weight_matrix()
        m = model.n_inputs
        assert not w.w_mu[m:].any()
        assert not w.w_gamma[m:].any()

    def test_all_relations_valid(self):
        packs = make_blob_packs(per_class=8, n_classes=3, seed=5)
        model = train(packs, TRAIN_CFG)
        for e in model.edges:
            assert ifs_validate(e.relation)
        for u in model.unions:
            assert ifs_validate(u)

    def test_mutual_edges_across_classes_are_neutral(self):
        packs = make_blob_packs(per_class=8, n_classes=3, seed=11)
        model = train(packs, TRAIN_CFG)
        for e in model.edges:
            if e.kind != "input_input":
                continue
            same = (model.medoids[e.src].class_id
                    == model.medoids[e.dst].class_id)
            if same:
                assert e.weight.mu > 0.0
                assert not e.neutral
            else:
                assert (e.weight.mu, e.weight.gamma) == (0.0, 0.0)
                assert e.neutral

    def test_polarity_follows_class_structure(self):
        packs = make_blob_packs(per_class=8, n_classes=2, seed=6)
        model = train(packs, TRAIN_CFG)
        for e in model.edges:
            if e.kind != "input_output":
                continue
            same = (model.medoids[e.src].class_id
                    == model.classes[e.dst - model.n_inputs].class_id)
            assert e.polarity == (+1 if same else -1)

    def test_deterministic(self):
        packs = make_blob_packs(per_class=8, n_classes=2, seed=7)
        a = train(packs, TRAIN_CFG)
        b = train(packs, TRAIN_CFG)
        wa, wb = a.weight_matrix(), b.weight_matrix()
        np.testing.assert_array_equal(wa.w_mu, wb.w_mu)
        np.testing.assert_array_equal(wa.w_gamma, wb.w_gamma)

    def test_class_with_too_few_images(self):
        packs = make_blob_packs(per_class=8, n_classes=2, seed=8)
        short = [p for p in packs if not (p.class_id == 2
                                          and p.image_id != "c2-i0")]
        with pytest.raises(TrainingDataError, match="class 2"):
            train(short, TRAIN_CFG)

    def test_single_class_rejected(self):
        packs = make_blob_packs(per_class=8, n_classes=1, seed=9)
        with pytest.raises(TrainingDataError):
            train(packs, TRAIN_CFG)

    def test_explicit_class_specs_validated(self):
        packs = make_blob_packs(per_class=6, n_classes=2, seed=10)
        with pytest.raises(TrainingDataError, match="contiguous"):
            train(packs, TRAIN_CFG,
                  classes=[ClassSpec(1, "a"), ClassSpec(3, "b")])
