from .common import *


class TestChannelFile(TestCase):

    def test_parse(self):
        w = parse_channel_file('# a bsc\ndmc 2 2\n0.9 0.1\n\n0.1 0.9\n')
        self.assertDistAlmostEqual(w.row(0), [0.9, 0.1])
        self.assertDistAlmostEqual(w.row(1), [0.1, 0.9])

    def test_round_trip_is_exact(self):
        gen = np.random.default_rng(12)
        for w in (channel_family('bsc:0.11'), Dmc(gen.dirichlet(np.ones(5), size=3))):
            again = parse_channel_file(format_channel(w))
            self.assertTrue(np.array_equal(w.transition, again.transition))

    def test_errors(self):
        with self.assertRaises(ParseError) as cm:
            parse_channel_file('dmc 2 2\n0.9 0.1\n0.1 0.8 0.1\n')
        self.assertEqual(cm.exception.line, 3)

        with self.assertRaises(ParseError) as cm:
            parse_channel_file('dmc 2 2\n0.9 abc\n0.1 0.9\n')
        self.assertEqual((cm.exception.line, cm.exception.column), (2, 5))

        # A token that also occurs inside the one before it.
        with self.assertRaises(ParseError) as cm:
            parse_channel_file('dmc 1 2\n1e5 e5\n')
        self.assertEqual((cm.exception.line, cm.exception.column), (2, 5))
        with self.assertRaises(ParseError) as cm:
            parse_channel_file('dmc 1 3\n  0.5   0.5 x0.5\n')
        self.assertEqual(cm.exception.column, 13)

        with self.assertRaises(ParseError):
            parse_channel_file('channel 2 2\n')
        with self.assertRaises(ParseError):
            parse_channel_file('# nothing here\n')
        with self.assertRaises(ParseError):
            parse_channel_file('dmc 2 2\n0.9 0.1\n')
        with self.assertRaises(ParseError):
            parse_channel_file('dmc 1 2\n0.5 0.5\n0.5 0.5\n')

    def test_validation(self):
        with self.assertRaises(RowNotStochastic):
            parse_channel_file('dmc 1 2\n0.5 0.4\n')


class TestTrainingFile(TestCase):

    def test_parse(self):
        d = parse_training_file('# pairs\n0,1\n1, 1\n\n0,0\n', 2, 2)
        self.assertEqual(d.pairs, [(0, 1), (1, 1), (0, 0)])

    def test_errors(self):
        with self.assertRaises(IndexOutOfRange) as cm:
            parse_training_file('0,1\n2,0\n', 2, 2)
        self.assertEqual((cm.exception.line, cm.exception.column), (2, 1))
        with self.assertRaises(ParseError):
            parse_training_file('0;1\n', 2, 2)
        with self.assertRaises(ParseError):
            parse_training_file('0,x\n', 2, 2)
        with self.assertRaises(ParseError):
            parse_training_file('# only a comment\n', 2, 2)


class TestCommands(TestCase):

    def test_capacity(self):
        status, out, err = run_cli('capacity', '--channel', 'bsc:0.11')
        self.assertEqual(status, 0, err)
        rows = read_pairs(out)
        self.assertAlmostEqual(float(rows['capacity_bits']), 0.500084, delta=1e-6)
        self.assertEqual(rows['unique_caid'], 'true')
        self.assertEqual(rows['support'], '0 1')

    def test_dispersion(self):
        status, out, err = run_cli('dispersion', '--channel', 'bsc:0.11', '--eps', '0.001')
        self.assertEqual(status, 0, err)
        rows = read_pairs(out)
        self.assertAlmostEqual(float(rows['dispersion']), bsc_dispersion(0.11), delta=1e-6)

    def test_normal_approx(self):
        status, out, err = run_cli('normal-approx', '--channel', 'bsc:0.11', '--n', '2000', '--eps', '0.001')
        self.assertEqual(status, 0, err)
        rows = read_pairs(out)
        self.assertAlmostEqual(float(rows['rate']), 0.43487, delta=1e-4)
        self.assertEqual(rows['condition_ok'], '')

    def test_normal_approx_partial(self):
        status, out, err = run_cli('normal-approx', '--channel', 'bsc:0.11', '--n', '2000', '--n0', '500',
            '--eps', '0.001', '--m', '1000000', '--delta', '0.01')
        self.assertEqual(status, 0, err)
        rows = read_pairs(out)
        self.assertAlmostEqual(float(rows['rate']), 0.0924, delta=2e-3)
        self.assertEqual(rows['condition_ok'], 'false')

    def test_achieve(self):
        status, out, err = run_cli('achieve', '--channel', 'bsc:0.11', '--n', '100', '--n0', '100',
            '--rate', '0.2', '--eps', '0.1')
        self.assertEqual(status, 0, err)
        rows = read_pairs(out)
        self.assertEqual(rows['best_n0'], '100')
        self.assertEqual(rows['method'], 'exact')
        self.assertEqual(float(rows['penalty_term']), 0.0)
        self.assertEqual(rows['mc_std_error'], '')

    def test_converse(self):
        status, out, err = run_cli('converse', '--channel', 'bsc:0.11', '--n', '100', '--eps', '0.1')
        self.assertEqual(status, 0, err)
        rows = read_pairs(out)
        self.assertEqual(rows['vacuous'], 'false')
        self.assertLess(float(rows['rate_upper']), 1.0)

        status, out, err = run_cli('converse', '--channel', 'bsc:0.11', '--n', '100', '--eps', '0.1',
            '--m', '10')
        self.assertEqual(status, 0, err)
        self.assertEqual(read_pairs(out)['vacuous'], 'true')

    def test_sample_and_estimate(self):
        status, out, err = run_cli('sample', '--channel', 'bsc:0.1', '--m', '500', '--seed', '3')
        self.assertEqual(status, 0, err)
        self.assertEqual(len(out.strip().splitlines()), 500)

        with tempfile.NamedTemporaryFile('w', suffix='.csv', delete=False) as fh:
            fh.write(out)
        try:
            status, est, err = run_cli('estimate', '--training', fh.name, '--inputs', '2', '--outputs', '2')
        finally:
            os.unlink(fh.name)
        self.assertEqual(status, 0, err)
        w_hat = parse_channel_file(est)
        self.assertLess(abs(w_hat.row(0)[1] - 0.1), 0.1)

    def test_channel_file(self):
        with tempfile.NamedTemporaryFile('w', suffix='.dmc', delete=False) as fh:
            fh.write(format_channel(channel_family('z:0.5')))
        try:
            status, out, err = run_cli('capacity', '--channel', fh.name)
        finally:
            os.unlink(fh.name)
        self.assertEqual(status, 0, err)
        self.assertAlmostEqual(float(read_pairs(out)['capacity_bits']), math.log2(1.25), delta=1e-9)

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as root:
            path = os.path.join(root, 'out.csv')
            status, out, err = run_cli('-o', path, 'capacity', '--channel', 'bsc:0.11')
            self.assertEqual(status, 0, err)
            self.assertEqual(out, '')
            with open(path) as fh:
                self.assertIn('capacity_bits', fh.read())

    def test_simulate(self):
        argv = ('simulate', '--channel', 'bsc:0.1', '--n', '12', '--n0', '6', '--code-size', '16',
            '--eps', '0.1', '--trials', '5000', '--seed', '7')
        status, out, err = run_cli(*argv)
        self.assertEqual(status, 0, err)
        rows = read_pairs(out)
        self.assertEqual(rows['m0'], '4')
        self.assertEqual(rows['l_factor'], '2')
        # Same seed, same numbers, whatever the thread count.
        self.assertEqual(run_cli('--threads', '1', *argv)[1], out)
        self.assertEqual(run_cli('--threads', '3', *argv)[1], out)

    def test_verify(self):
        status, out, err = run_cli('verify', '--channel', 'identity:2', '--m', '20', '--n', '16',
            '--code-size', '2', '--eps', '0.1', '--delta', '0.1', '--draws', '4', '--trials', '100')
        self.assertEqual(status, 0, err)
        rows = read_pairs(out)
        self.assertEqual(rows['draws'], '4')
        self.assertEqual(rows['reliability_ok'], 'true')

    def test_sandwich(self):
        status, out, err = run_cli('sandwich', '--channel', 'bsc:0.11', '--n', '50,100', '--eps', '0.1')
        self.assertEqual(status, 0, err)
        lines = out.strip().splitlines()
        self.assertEqual(lines[0], 'n,achievable_rate,converse_rate,normal_approx_rate,penalty,condition_ok')
        self.assertEqual(len(lines), 3)
        for line in lines[1:]:
            n, achievable, converse, approx, kappa, ok = line.split(',')
            self.assertLessEqual(float(achievable), float(converse))
            self.assertEqual(float(kappa), 0.0)
            self.assertEqual(ok, '')


class TestErrors(TestCase):

    def test_unknown_command(self):
        status, out, err = run_cli('frobnicate')
        self.assertEqual(status, 2)

    def test_bad_family(self):
        status, out, err = run_cli('capacity', '--channel', 'awgn:1')
        self.assertEqual(status, 3)
        self.assertTrue(err.startswith('error,ParseError,'), err)
        self.assertEqual(out, '')

    def test_bad_file(self):
        with tempfile.NamedTemporaryFile('w', suffix='.dmc', delete=False) as fh:
            fh.write('dmc 2 2\n0.9 0.1\n0.1 0.8 0.1\n')
        try:
            status, out, err = run_cli('capacity', '--channel', fh.name)
        finally:
            os.unlink(fh.name)
        self.assertEqual(status, 3)
        self.assertIn('line 3', err)

    def test_parameter_error(self):
        status, out, err = run_cli('normal-approx', '--channel', 'bsc:0.11', '--n', '100', '--eps', '0.5')
        self.assertEqual(status, ParameterError('').code)
        self.assertTrue(err.splitlines()[-1].startswith('error,InvalidEpsilon,'), err)

    def test_missing_rate(self):
        status, out, err = run_cli('achieve', '--channel', 'bsc:0.11', '--n', '10', '--eps', '0.1')
        self.assertEqual(status, 3)


class TestThreads(TestCase):

    seeded = [
        ('sample', '--channel', 'bsc:0.1', '--m', '70000', '--seed', '5'),
        ('estimate', '--channel', 'uniform:3,3', '--m', '5000', '--seed', '1'),
        ('capacity', '--channel', 'bsc:0.11', '--m', '10000', '--seed', '1'),
        ('dispersion', '--channel', 'bsc:0.11', '--m', '10000', '--seed', '1', '--eps', '0.01'),
        ('achieve', '--channel', 'uniform:3,3', '--n', '60', '--rate', '0.1', '--eps', '0.1', '--seed', '2'),
        ('achieve', '--channel', 'bsc:0.11', '--n', '64', '--n0', '64', '--rate', '0.3', '--eps', '0.1',
            '--seed', '2', '--atom-cap', '100'),
        ('max-rate', '--channel', 'bsc:0.11', '--m', '100000', '--n', '40', '--eps', '0.1', '--seed', '3'),
        ('converse', '--channel', 'bsc:0.11', '--m', '100000', '--n', '40', '--eps', '0.1', '--seed', '3'),
        ('normal-approx', '--channel', 'bsc:0.11', '--m', '100000', '--n', '200', '--eps', '0.01', '--seed', '3'),
        ('simulate', '--channel', 'bsc:0.1', '--m', '2000', '--n', '12', '--n0', '6', '--code-size', '16',
            '--eps', '0.1', '--trials', '5000', '--seed', '7', '--tie-break', 'random'),
        ('simulate', '--channel', 'bsc:0.1', '--n', '12', '--n0', '4', '--code-size', '8', '--eps', '0.1',
            '--trials', '500', '--codebooks', '6', '--seed', '8'),
        ('verify', '--channel', 'bsc:0.11', '--m', '2000', '--n', '8', '--code-size', '4', '--eps', '0.2',
            '--delta', '0.1', '--draws', '10', '--trials', '500', '--seed', '4'),
        ('sandwich', '--channel', 'bsc:0.11', '--m', '100000', '--n', '20,40', '--eps', '0.1', '--seed', '3'),
    ]

    def test_same_output_at_one_and_eight(self):
        for argv in self.seeded:
            status, serial, err = run_cli('--threads', '1', *argv)
            self.assertEqual(status, 0, '%s: %s' % (' '.join(argv), err))
            status, threaded, err = run_cli('--threads', '8', *argv)
            self.assertEqual(status, 0, '%s: %s' % (' '.join(argv), err))
            self.assertEqual(serial, threaded, ' '.join(argv))

    def test_monte_carlo_path_is_covered(self):
        status, out, err = run_cli('--threads', '8', *self.seeded[5])
        self.assertEqual(status, 0, err)
        self.assertEqual(read_pairs(out)['method'], 'monte_carlo')


class TestLogging(TestCase):

    def test_each_run_logs_to_its_own_stream(self):
        argv = ('dispersion', '--channel', 'bsc:0.11', '--eps', '0.5')
        for _ in range(2):
            status, out, err = run_cli(*argv)
            self.assertEqual(status, 0, err)
            self.assertIn('WARNING fblearn: epsilon = 1/2', err)

    def test_verbose(self):
        status, out, err = run_cli('-v', 'capacity', '--channel', 'bsc:0.11')
        self.assertEqual(status, 0, err)
        self.assertIn('INFO fblearn: ', err)
        status, out, err = run_cli('capacity', '--channel', 'bsc:0.11')
        self.assertNotIn('INFO', err)
