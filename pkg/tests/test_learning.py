from .common import *


class TestTrainingSet(TestCase):

    def test_counts(self):
        d = TrainingSet([0, 0, 1, 1], [0, 0, 1, 0], 2, 2)
        self.assertEqual(d.m, 4)
        self.assertEqual(len(d), 4)
        self.assertEqual(d.pairs, [(0, 0), (0, 0), (1, 1), (1, 0)])
        self.assertEqual(d.counts().tolist(), [[2, 0], [1, 1]])

    def test_rejects(self):
        with self.assertRaises(ParameterError):
            TrainingSet([0, 1], [0], 2, 2)
        with self.assertRaises(ParameterError):
            TrainingSet([], [], 2, 2)
        with self.assertRaises(ParameterError):
            TrainingSet([0, 2], [0, 0], 2, 2)
        with self.assertRaises(ParameterError):
            TrainingSet([0], [-1], 2, 2)


class TestSample(TestCase):

    def test_identity_outputs_equal_inputs(self):
        d = sample_training_set(channel_family('identity:3'), 1000, seed=1)
        self.assertEqual(d.m, 1000)
        self.assertTrue(np.array_equal(d.x, d.y))

    def test_deterministic(self):
        w = channel_family('bsc:0.2')
        a = sample_training_set(w, 5000, seed=4)
        b = sample_training_set(w, 5000, seed=4)
        c = sample_training_set(w, 5000, seed=5)
        self.assertEqual(a.pairs, b.pairs)
        self.assertNotEqual(a.pairs, c.pairs)

    def test_independent_of_threads(self):
        w = channel_family('bsc:0.2')
        threads = config.threads
        try:
            config.threads = 1
            serial = sample_training_set(w, 3 * SAMPLE_BLOCK + 17, seed=8)
            config.threads = 4
            threaded = sample_training_set(w, 3 * SAMPLE_BLOCK + 17, seed=8)
        finally:
            config.threads = threads
        self.assertTrue(np.array_equal(serial.x, threaded.x))
        self.assertTrue(np.array_equal(serial.y, threaded.y))

    def test_flip_fraction(self):
        d = sample_training_set(channel_family('bsc:0.1'), 100000, seed=2)
        flips = float(np.mean(d.x != d.y))
        self.assertLess(abs(flips - 0.1), 0.01)
        # Inputs are uniform.
        self.assertLess(abs(float(np.mean(d.x)) - 0.5), 0.01)

    def test_rejects(self):
        with self.assertRaises(ParameterError):
            sample_training_set(channel_family('bsc:0.1'), 0, seed=0)


class TestEstimate(TestCase):

    def test_examples(self):
        d = TrainingSet([0, 0, 1, 1], [0, 0, 1, 0], 2, 2)
        w = estimate_empirical_channel(d)
        self.assertDistAlmostEqual(w.row(0), [1.0, 0.0])
        self.assertDistAlmostEqual(w.row(1), [0.5, 0.5])

        w = estimate_empirical_channel(TrainingSet([0, 0, 0], [1, 1, 1], 2, 2))
        self.assertDistAlmostEqual(w.row(0), [0, 1])
        self.assertEqual(w.flagged_rows, (1, ))
        self.assertDistAlmostEqual(w.row(1), [0.5, 0.5])

    def test_rows_are_stochastic(self):
        d = sample_training_set(channel_family('uniform:4,5'), 97, seed=0)
        w = estimate_empirical_channel(d)
        self.assertDistAlmostEqual(w.transition.sum(axis=1), np.ones(4), delta=1e-12)

    def test_consistency(self):
        w = binary_channel(0.1, 0.3)
        w_hat = estimate_empirical_channel(sample_training_set(w, 10 ** 6, seed=3))
        self.assertLess(float(np.max(np.abs(w_hat.transition - w.transition))), 0.005)

    def test_empirical_tv_shrinks(self):
        w = channel_family('bsc:0.11')
        truth = joint_distribution(w)
        tvs = []
        for seed in range(100):
            d = sample_training_set(w, 10 ** 5, seed=seed)
            tvs.append(total_variation(empirical_joint(d), truth))
        self.assertLess(float(np.median(tvs)), 0.01)

    def test_empirical_joint(self):
        d = TrainingSet([0, 0, 1, 1], [0, 0, 1, 0], 2, 2)
        self.assertDistAlmostEqual(empirical_joint(d), [0.5, 0, 0.25, 0.25])


class TestConcentration(TestCase):

    def test_example(self):
        self.assertAlmostEqual(kl_concentration_bound(10 ** 5, 1, 0.01), 4.60517e-5, delta=1e-10)

    def test_formula(self):
        m, c, delta = 1000, 4, 0.05
        expected = (3 * math.log(1001) - math.log(0.05)) / 1000
        self.assertAlmostEqual(kl_concentration_bound(m, c, delta), expected, places=15)

    def test_trivial_limit(self):
        self.assertLess(kl_concentration_bound(100, 1, 1 - 1e-12), 1e-13)

    def test_decreasing_in_m(self):
        bounds = [kl_concentration_bound(m, 4, 0.05) for m in (10, 100, 1000, 10 ** 4, 10 ** 5)]
        self.assertNonincreasing(bounds)
        for m in (10, 1000, 10 ** 5):
            small, large = kl_concentration_bound(m, 4, 0.05), kl_concentration_bound(2 * m, 4, 0.05)
            # ln(2m + 1) > ln(m + 1), so doubling m falls short of halving.
            self.assertLess(large, small)
            self.assertGreater(large, small / 2)

    def test_invalid_delta(self):
        for delta in (0, 1, -0.1, 1.5):
            with self.assertRaises(InvalidDelta):
                kl_concentration_bound(100, 4, delta)

    def test_coverage(self):
        # At least 1 - delta of the draws land within the bound.
        w = binary_channel(0.2, 0.35)
        truth = joint_distribution(w)
        bound = kl_concentration_bound(500, 4, 0.1)
        misses = 0
        for seed in range(2000):
            d = sample_training_set(w, 500, seed=seed)
            if kl_divergence(empirical_joint(d), truth) > bound:
                misses += 1
        self.assertLessEqual(misses / 2000.0, 0.13)


class TestPenalty(TestCase):

    def test_example(self):
        kappa = tv_penalty(PenaltyParams(m=10 ** 6, alphabet_product=4, delta=0.01, n0=100))
        self.assertAlmostEqual(kappa, 0.067783, delta=1e-6)

    def test_monotone(self):
        by_n0 = [penalty(10 ** 6, 4, 0.01, n0) for n0 in (1, 10, 100, 1000, 10 ** 4)]
        self.assertNondecreasing(by_n0)
        by_m = [penalty(m, 4, 0.01, 100) for m in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)]
        self.assertNonincreasing(by_m)

    def test_saturates(self):
        self.assertGreater(penalty(100, 4, 0.01, 10 ** 6), 0.999)
        self.assertLessEqual(penalty(100, 4, 0.01, 10 ** 9), 1.0)

    def test_known_channel(self):
        self.assertEqual(penalty(None, 4, 0.01, 100), 0.0)
        with self.assertRaises(InvalidN0):
            penalty(None, 4, 0.01, 0)

    def test_invalid(self):
        with self.assertRaises(InvalidN0):
            PenaltyParams(m=1000, alphabet_product=4, delta=0.01, n0=0)
        with self.assertRaises(InvalidDelta):
            PenaltyParams(m=1000, alphabet_product=4, delta=1.0, n0=1)


class TestMaxBlocklength(TestCase):

    def test_example(self):
        self.assertEqual(max_blocklength(10 ** 6, 4, 0.01), 147)

    def test_definition(self):
        for m, c, delta in ((10 ** 6, 4, 0.01), (10 ** 4, 9, 0.1), (50, 2, 0.5)):
            n = max_blocklength(m, c, delta)
            scale = (c - 1) * math.log1p(m) - math.log(delta)
            self.assertLessEqual(n ** 2 * scale, m)
            self.assertGreater((n + 1) ** 2 * scale, m)

    def test_single_letter(self):
        n = max_blocklength(1000, 1, 0.5)
        self.assertEqual(n, int(math.floor(math.sqrt(1000 / math.log(2)))))

    def test_nondecreasing_in_m(self):
        self.assertNondecreasing([max_blocklength(m, 4, 0.05) for m in range(1, 5000, 37)])
