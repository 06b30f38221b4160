import io
import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from fockops import cli
from fockops.formats import dump_json, fmt_float, fockmat_text, read_fockmat, write_fockmat
from fockops.matrixizer import OperatorSpec, build_matrix


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestFormats:
    def test_fmt_float(self):
        assert fmt_float(0.1) == "0.10000000000000001"
        assert float(fmt_float(math.pi)) == math.pi
        assert fmt_float(-0.0) == "-0"

    def test_fockmat_roundtrip_bit_exact(self, tmp_path):
        entries = build_matrix(OperatorSpec.weighted(0.7 - 0.3j, 0.5j, -0.7, 0.4), 96, 64).entries
        path = tmp_path / "m.fockmat"
        with open(path, "w") as fh:
            write_fockmat(entries, fh)
        back = read_fockmat(path)
        assert back.shape == (96, 64)
        assert np.array_equal(back.view(np.uint64), entries.view(np.uint64))

    def test_header(self):
        text = fockmat_text(np.zeros((96, 64), dtype=complex))
        assert text.splitlines()[0] == "fockmat 96 64"
        assert len(text.splitlines()) == 1 + 96 * 64

    def test_read_from_stream(self):
        m = np.array([[1 + 2j], [0.5 - 0j]])
        assert np.array_equal(read_fockmat(io.StringIO(fockmat_text(m))), m)

    def test_dump_json_order_and_complex(self):
        text = dump_json({"z": 1 + 2j, "a": [1.0, 2.0], "n": None, "t": True})
        doc = json.loads(text)
        assert list(doc) == ["z", "a", "n", "t"]
        assert doc["z"] == {"re": 1.0, "im": 2.0}


class TestParse:
    @pytest.mark.parametrize("text,value", [("0.5", 0.5), ("1i", 1j), ("0+1i", 1j), ("-2-0.5i", -2 - 0.5j), ("1e-3", 1e-3)])
    def test_complex(self, text, value):
        assert cli.parse_complex(text) == value

    @pytest.mark.parametrize("text", ["abc", "1+", "1 + 2i", "", "1j"])
    def test_complex_rejects(self, text):
        with pytest.raises(Exception):
            cli.parse_complex(text)


class TestClassify:
    def test_json_report(self, capsys):
        code, out, _ = run(["classify", "--gamma", "1", "--c", "0.3", "--a", "0.5", "--b", "0.3"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["classification"]["normal"] is True
        assert doc["norm"]["closed_form"] == pytest.approx(1.197217, abs=1e-6)
        assert doc["norm"]["rel_diff"] < 1e-6
        assert doc["norm"]["first_factor_check"]["alternative_value"] > 0
        jsonschema.validate(doc, cli.schema())

    def test_identity(self, capsys):
        code, out, _ = run(["classify", "--c", "0", "--a", "1", "--b", "0"], capsys)
        doc = json.loads(out)
        assert code == 0
        assert doc["norm"]["closed_form"] == 1
        assert doc["classification"]["closed_range"] and not doc["classification"]["compact"]
        jsonschema.validate(doc, cli.schema())

    def test_unbounded_is_verdict(self, capsys):
        code, out, _ = run(["classify", "--gamma", "1", "--c", "0.5", "--a", "0+1i", "--b", "1"], capsys)
        doc = json.loads(out)
        assert code == 0 and doc["classification"]["bounded"] is False
        jsonschema.validate(doc, cli.schema())

    def test_degenerate(self, capsys):
        code, out, _ = run(["classify", "--gamma", "0", "--c", "0.3", "--a", "0.5", "--b", "0.3"], capsys)
        doc = json.loads(out)
        assert code == 0 and doc["classification"]["degenerate"]
        jsonschema.validate(doc, cli.schema())

    def test_schema_rejects_extra_top_key(self, capsys):
        _, out, _ = run(["classify", "--c", "0", "--a", "0.5", "--b", "0.3"], capsys)
        doc = json.loads(out)
        doc["extra"] = 1
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(doc, cli.schema())

    def test_text_and_csv(self, capsys):
        _, out, _ = run(["classify", "--c", "0", "--a", "0.5", "--b", "0.3", "--format", "text"], capsys)
        assert "classification.bounded: true" in out
        _, out, _ = run(["classify", "--c", "0", "--a", "0.5", "--b", "0.3", "--format", "csv"], capsys)
        assert out.startswith("key,value\n")

    def test_parse_error_echoes_token(self, capsys):
        code, _, err = run(["classify", "--c", "zz", "--a", "0.5", "--b", "0"], capsys)
        assert code == 2 and "zz" in err

    def test_unsupported_poly(self, capsys):
        code, _, err = run(["classify", "--c", "0", "--a", "0.5", "--b", "0", "--poly", "1,1"], capsys)
        assert code == 3 and "unsupported" in err

    def test_inner_dim_bounds(self, capsys):
        assert run(["classify", "--c", "0", "--a", "0.5", "--b", "0", "--inner-dim", "300"], capsys)[0] == 2
        assert run(["classify", "--c", "0", "--a", "0.5", "--b", "0", "--tol", "0"], capsys)[0] == 2

    def test_deterministic(self, capsys):
        argv = ["classify", "--gamma", "2", "--c", "0.5", "--a", "-0.7", "--b", "0.4"]
        assert run(argv, capsys)[1] == run(argv, capsys)[1]

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "r.json"
        run(["classify", "--c", "0", "--a", "0.5", "--b", "0", "--out", str(path)], capsys)
        assert json.loads(path.read_text())["classification"]["normal"] is True


class TestWitness:
    def test_table(self, capsys):
        code, out, err = run(["witness", "--c", "0", "--a", "0.5", "--b", "0", "--r-max", "4", "--steps", "9"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "r,g"
        rows = {float(r): float(g) for r, g in (ln.split(",") for ln in lines[1:])}
        assert rows[2.0] == pytest.approx(4.978707e-2, rel=1e-6)
        assert rows[0.0] == 1.0
        assert "1e-12" in err

    def test_first_row_constant_symbol(self, capsys):
        _, out, _ = run(["witness", "--c", "0", "--a", "0", "--b", "0", "--r-max", "8", "--steps", "5"], capsys)
        assert out.splitlines()[1] == "0,1"

    def test_critical_decays(self, capsys):
        _, out, err = run(["witness", "--c", "0.3", "--a", "0.5", "--b", "0.3", "--r-max", "10", "--steps", "101"], capsys)
        assert float(out.splitlines()[-1].split(",")[1]) < 1e-12
        assert "first r" in err

    def test_rejects_unit_circle(self, capsys):
        code, _, err = run(["witness", "--c", "1i", "--a", "1i", "--b", "1", "--r-max", "4", "--steps", "9"], capsys)
        assert code == 3 and "closed range" in err


class TestMatrix:
    def test_diag(self, capsys):
        code, out, _ = run(["matrix", "--c", "0", "--a", "0.5", "--b", "0", "--N", "4", "--M", "4"], capsys)
        assert code == 0
        m = read_fockmat(io.StringIO(out))
        assert np.count_nonzero(m) == 4
        np.testing.assert_array_equal(np.diag(m), [1, 0.5, 0.25, 0.125])

    def test_header(self, capsys):
        _, out, _ = run(["matrix", "--c", "0.3", "--a", "0.5", "--b", "0.3", "--N", "64", "--M", "96"], capsys)
        assert out.splitlines()[0] == "fockmat 96 64"

    def test_dimension_error(self, capsys):
        assert run(["matrix", "--c", "0", "--a", "0.5", "--b", "0", "--N", "8", "--M", "4"], capsys)[0] == 2

    def test_csv(self, capsys):
        _, out, _ = run(["matrix", "--c", "0", "--a", "0.5", "--b", "0", "--N", "2", "--M", "2", "--format", "csv"], capsys)
        assert out.splitlines()[0] == "row,col,re,im"

    def test_file_roundtrip(self, tmp_path, capsys):
        path = tmp_path / "m.fockmat"
        run(["matrix", "--c", "0.5i", "--a", "-0.7", "--b", "0.4", "--N", "16", "--out", str(path)], capsys)
        direct = build_matrix(OperatorSpec.weighted(1, 0.5j, -0.7, 0.4), 16 + 32, 16).entries
        assert np.array_equal(read_fockmat(path), direct)


class TestVerify:
    def test_norms_pass(self, capsys):
        code, out, _ = run(["verify", "norms"], capsys)
        assert code == 0
        assert "FAIL" not in out and "summary:" in out
        assert "norm.weighted.printed_variant" in out

    def test_json_and_csv(self, capsys):
        code, out, _ = run(["verify", "adjoint", "--format", "json"], capsys)
        doc = json.loads(out)
        assert code == 0 and doc["failed"] == 0 and doc["passed"] == len(doc["checks"])
        code, out, _ = run(["verify", "adjoint", "--format", "csv"], capsys)
        assert out.splitlines()[0] == "name,params,metric,value,status"

    def test_failure_exit(self, capsys):
        # truncation far too small for the 1e-6 norm criteria
        code, out, _ = run(["verify", "norms", "--inner-dim", "4"], capsys)
        assert code == 1 and "FAIL" in out

    def test_unknown_suite(self, capsys):
        assert run(["verify", "nope"], capsys)[0] == 2


def test_entry_point_module():
    proc = subprocess.run([sys.executable, "-m", "fockops.cli", "classify", "--c", "0", "--a", "0.5", "--b", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["classification"]["normal"] is True
