from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase
import csv
import math

from ..montecarlo import (
    acceptance_bound_grid,
    lcb_coverage,
    write_coverage,
    write_grid,
)


class AcceptanceBoundGridTestCase(TestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.cells = acceptance_bound_grid(strategies=10_000, seed=0)

    def test_grid_shape(self):
        self.assertEqual(
            [(c.k_trials, c.tau) for c in self.cells],
            [(k, tau) for k in (10, 50, 200) for tau in (0.5, 0.8)])

    def test_no_violations(self):
        self.assertTrue(all(cell.holds for cell in self.cells))

    def test_applicable_cells_are_checked(self):
        applicable = [c for c in self.cells if c.applicable]
        self.assertTrue(applicable)
        for cell in applicable:
            self.assertLess(cell.delta, cell.a_hat)
            self.assertGreaterEqual(
                cell.mean_q - 3 * cell.std_error, cell.bound)
            self.assertLessEqual(cell.bad_fraction, 1)
        # K=200, τ=0.5: δ = e^-1 is well below the acceptance rate
        cell = self.cells[4]
        self.assertEqual((cell.k_trials, cell.tau), (200, 0.5))
        self.assertTrue(cell.applicable)
        self.assertAlmostEqual(cell.delta, math.exp(-1))

    def test_single_cell(self):
        single = acceptance_bound_grid(
            strategies=10_000, k_values=(200, ), tau_values=(0.5, ), seed=0)
        self.assertEqual(len(single), 1)
        self.assertEqual(single[0], self.cells[4])

    def test_csv(self):
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'grid.csv'
            write_grid(path, self.cells)
            with open(path, newline='') as fh:
                rows = list(csv.DictReader(fh))
        self.assertEqual(len(rows), 6)
        self.assertIn(rows[0]['holds'], ('true', 'false'))


class LCBCoverageTestCase(TestCase):

    def test_loose_setting(self):
        report = lcb_coverage(100, 0.05, 0.4, replications=10_000, seed=1)
        self.assertAlmostEqual(report.bound, math.exp(-0.5))
        self.assertTrue(report.holds)

    def test_informative_setting(self):
        report = lcb_coverage(500, 0.05, 0.4, replications=10_000, seed=1)
        self.assertAlmostEqual(report.bound, 0.0821, places=4)
        self.assertTrue(report.holds)
        self.assertLess(report.frequency, report.bound)

    def test_fail_on_invalid_arguments(self):
        with self.assertRaises(ValueError):
            lcb_coverage(0, 0.05, 0.4)
        with self.assertRaises(ValueError):
            lcb_coverage(10, 0.05, 1.5)

    def test_csv(self):
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'coverage.csv'
            write_coverage(path, [lcb_coverage(50, 0.1, 0.5, 1000)])
            header = path.read_text().splitlines()[0]
        self.assertTrue(header.startswith('m_samples,epsilon,a_s'))
