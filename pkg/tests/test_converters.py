import io
import unittest

from qfpi.converters import (
    FIELDS,
    format_number,
    read_records,
    record_to_row,
    records_to_csv,
    write_records,
)
from qfpi.errors import InvalidParameterError
from qfpi.sweep import SweepRecord


class TestConverters(unittest.TestCase):
    def setUp(self):
        self.rec = SweepRecord(0.001, 1.0, 0.09, 0.0, 1.0, 1.0, p1=0.1, T12=0.5,
                               converged_12=True, iterations=12, residual=1e-13)
    def test_header(self):
        self.assertEqual(",".join(FIELDS),
            "p_inc,L,dw1,dw2,gamma1,gamma2,p1,p2,R1,R2,T12,T21,r_factor,l_factor,"
            "avg_intracavity,converged_12,converged_21,iterations,residual")
    def test_format(self):
        self.assertEqual(format_number(0.1), "0.1")
        self.assertEqual(format_number(1e-13), "1e-13")
        self.assertEqual(format_number(None), "")
        self.assertEqual(format_number(False), "0")
        self.assertEqual(format_number(7), "7")
    def test_row(self):
        row = record_to_row(self.rec)
        self.assertEqual(row[:7], ["0.001", "1.0", "0.09", "0.0", "1.0", "1.0", "0.1"])
        self.assertEqual(row[7], "")
        self.assertEqual(row[-4:], ["1", "0", "12", "1e-13"])
    def test_read_back(self):
        fp = io.StringIO(records_to_csv([self.rec]))
        self.assertEqual(read_records(fp), [self.rec])
    def test_no_header(self):
        fp = io.StringIO()
        write_records([self.rec], fp, header=False)
        self.assertEqual(len(fp.getvalue().splitlines()), 1)
    def test_malformed(self):
        with self.assertRaises(InvalidParameterError):
            read_records(io.StringIO("p_inc,L\n0.1,x\n"))
