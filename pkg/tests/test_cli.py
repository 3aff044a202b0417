import contextlib
import io
import os
import tempfile
import unittest

from qfpi.cli import main
from qfpi.cli.sweep import main as sweep_main
from qfpi.converters import FIELDS


def run(argv, main=main):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue()


class TestCommands(unittest.TestCase):
    def test_rectify(self):
        code, out = run(["rectify", "--p-inc", "0.1", "--length", "0.3", "--dw1", "0.5",
                         "--header"])
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], ",".join(FIELDS))
        self.assertEqual(len(lines), 2)
        code, out = run(["rectify", "--p-inc", "0.1", "--length", "0.3", "--dw1", "0.5"])
        self.assertEqual(out, lines[1] + "\n")
    def test_transmit(self):
        code, out = run(["transmit", "--p-inc", "0.1", "--length", "0.5", "--header"])
        self.assertEqual(code, 0)
        header, row = out.splitlines()
        row = dict(zip(header.split(","), row.split(",")))
        self.assertAlmostEqual(float(row["T"]), 0.943, delta=1e-3)
        self.assertEqual(row["direction"], "ltr")
        self.assertEqual(row["converged"], "1")
        self.assertNotIn("branch_count", row)
    def test_transmit_scan(self):
        code, out = run(["transmit", "--p-inc", "0.1", "--length", "0.5", "--header",
                         "--scan", "--n-seeds", "2", "--scan-grid", "0"])
        self.assertEqual(code, 0)
        lines = out.splitlines()
        header = lines[0].split(",")
        self.assertEqual(header[-1], "branch_count")
        for line in lines[1:]:
            self.assertEqual(line.split(",")[-1], str(len(lines) - 1))
    def test_profile(self):
        code, out = run(["profile", "--p-inc", "0.05", "--length", "0.5", "--n-samples", "5"])
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "z,p_intr,avg_intracavity")
        self.assertEqual(len(lines), 6)
        self.assertNotEqual(lines[1].split(",")[2], "")
        self.assertEqual(lines[2].split(",")[2], "")
    def test_sweep(self):
        code, out = run(["sweep", "--axis", "L:0:1:3", "--p-inc", "0.05",
                         "--outputs", "transmit", "--nb-jobs", "1"])
        self.assertEqual(code, 0)
        self.assertEqual(len(out.splitlines()), 4)


class TestExitCodes(unittest.TestCase):
    def test_invalid_value(self):
        code, out = run(["transmit", "--p-inc", "-1"])
        self.assertEqual(code, 1)
        self.assertEqual(out, "")
    def test_invalid_arguments(self):
        with self.assertRaises(SystemExit) as cm:
            run(["levitate"])
        self.assertEqual(cm.exception.code, 1)
        with self.assertRaises(SystemExit) as cm:
            run(["rectify", "--p-inc", "lots"])
        self.assertEqual(cm.exception.code, 1)
    def test_strict(self):
        argv = ["rectify", "--p-inc", "0.1", "--length", "1", "--max-iterations", "1"]
        self.assertEqual(run(argv)[0], 0)
        self.assertEqual(run(argv + ["--strict"])[0], 2)
    def test_single_value_axis(self):
        code, out = run(["sweep", "--axis", "L:0:1:1", "--nb-jobs", "1"])
        self.assertEqual(code, 1)
        self.assertEqual(out, "")
    def test_missing_config(self):
        self.assertEqual(run(["rectify", "--config", "/nonexistent/qfpi.cfg"])[0], 1)


class TestConfigFiles(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.dir.name, "setup.cfg")
        with open(self.path, "w") as fp:
            fp.write("p_inc = 0.05\nlength = 0.5\naxis1 = L 0 1 3\noutputs = rectify\n"
                     "nb_jobs = 1\nn_coarse = 3\nn_refine = 3\nrounds = 1\n")
    def tearDown(self):
        self.dir.cleanup()
    def test_flags_override(self):
        code, out = run(["rectify", "--config", self.path, "--length", "0.3"])
        row = out.split(",")
        self.assertEqual((row[0], row[1]), ("0.05", "0.3"))
    def test_sweep_entry_point(self):
        dest = os.path.join(self.dir.name, "out.csv")
        code, out = run([self.path, "--out", dest], main=sweep_main)
        self.assertEqual(code, 0)
        self.assertEqual(out, "")
        with open(dest) as fp:
            lines = fp.read().splitlines()
        self.assertEqual(lines[0], ",".join(FIELDS))
        self.assertEqual(len(lines), 4)
    def test_search(self):
        code, out = run(["search", "--config", self.path])
        self.assertEqual(code, 0)
        header, row = out.splitlines()
        self.assertEqual(header, "L,dw1,r_factor,l_factor,T12,T21,evaluated")
        self.assertEqual(row.split(",")[-1], "18")
