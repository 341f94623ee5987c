"""Package-wide defaults.

Every tunable used by the numerical modules lives on :data:`config`. Functions
accept keyword overrides that default to ``None`` and fall back to it.

The only environment variable is ``FBLEARN_THREADS``, which caps the number of
worker threads; absent (or ``0``) means one per CPU.

"""

import os
import logging


log = logging.getLogger('fblearn')


class _Config(object):

    #: Largest number of atom pairs a single convolution may form.
    atom_cap = 5 * 10 ** 6

    #: Blahut-Arimoto stopping gap in bits, and iteration limit.
    ba_tol = 1e-10
    ba_max_iter = 10 ** 5

    #: Bits below capacity that still count as a capacity-achieving letter.
    caid_slack = 1e-7

    #: Allowed deviation of the CAID constraints from the computed caod.
    lp_feasibility = 1e-7
    lp_retries = 3

    #: Samples for Monte Carlo fallback of the RCU term.
    mc_samples = 10 ** 5

    #: Largest mini-codebook the simulator will build.
    codebook_cap = 2 ** 20

    #: Rate bisection tolerance in bits per channel use.
    rate_tol = 1e-6

    #: n0 scans are exhaustive up to this blocklength; sparse above it.
    n0_full_scan = 512
    n0_grid_points = 64

    #: Compositions scanned exhaustively by the converse before hill climbing.
    composition_scan_limit = 512

    def __init__(self):
        self.reload()

    def reload(self):
        """Re-read the environment."""
        raw = os.environ.get('FBLEARN_THREADS', '').strip()
        try:
            threads = int(raw) if raw else 0
        except ValueError:
            log.warning('ignoring FBLEARN_THREADS=%r; not an integer' % raw)
            threads = 0
        self.threads = threads if threads > 0 else (os.cpu_count() or 1)


config = _Config()
