import io
import json

import numpy as np
import pytest

from app.errors import FileFormatError
from app.schemas import INFINITE, NEG_INFINITE, SweepRow
from app.services import channel_service, inequality_service
from app.utils import formats


@pytest.mark.parametrize(
    "value,text",
    [
        (1.0, "1.0"),
        (0.5, "0.5"),
        (-2.0, "-2.0"),
        (3, "3.0"),
        (-0.0, "0.0"),
        (1e-20, "1e-20"),
        (0.1 + 0.2, "0.3"),
        (1.0 / 3.0, "0.333333333333"),
        (1234567890123.0, "1.23456789012e+12"),
        (INFINITE, "inf"),
        (NEG_INFINITE, "-inf"),
        (True, "true"),
        (False, "false"),
        (None, ""),
    ],
)
def test_format_number(value, text):
    assert formats.format_number(value) == text


def _write(tmp_path, name, document):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


class TestKrausFiles:
    def test_complex_entries(self, tmp_path):
        path = _write(
            tmp_path,
            "phase.json",
            {"dimIn": 2, "dimOut": 2, "ops": [[[1, 0], [0, [0, 1]]]]},
        )
        s = formats.load_kraus(path)
        assert np.allclose(s.ops[0], np.diag([1.0, 1j]))

    def test_shape_error_names_operator(self, tmp_path):
        path = _write(tmp_path, "short.json", {"dimIn": 2, "dimOut": 2, "ops": [[[1, 0], [0, 1]], [[1, 0]]]})
        with pytest.raises(FileFormatError) as info:
            formats.load_kraus(path)
        assert info.value.operator_index == 1
        assert "operator 1" in str(info.value)

    def test_bad_entry_names_operator(self, tmp_path):
        path = _write(tmp_path, "entry.json", {"dimIn": 1, "dimOut": 1, "ops": [[["x"]]]})
        with pytest.raises(FileFormatError) as info:
            formats.load_kraus(path)
        assert info.value.operator_index == 0

    def test_incomplete_set(self, tmp_path):
        path = _write(tmp_path, "half.json", {"dimIn": 1, "dimOut": 1, "ops": [[[0.5]]]})
        with pytest.raises(FileFormatError, match="complete"):
            formats.load_kraus(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\"dimIn\": 2,")
        with pytest.raises(FileFormatError, match="invalid JSON"):
            formats.load_kraus(str(path))

    def test_missing_dimension(self, tmp_path):
        path = _write(tmp_path, "nodim.json", {"dimOut": 2, "ops": [[[1, 0], [0, 1]]]})
        with pytest.raises(FileFormatError, match="dimIn"):
            formats.load_kraus(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            formats.load_kraus(str(tmp_path / "absent.json"))


class TestStatesAndEnsembles:
    def test_builtin_states(self):
        assert np.allclose(formats.resolve_state("mixed2").mat, np.eye(2) / 2)
        assert np.allclose(formats.resolve_state("pure0").mat, np.diag([1.0, 0.0]))
        assert np.allclose(formats.resolve_state("mm2").mat, np.eye(2) / 2)

    def test_builtin_ensembles(self):
        mm2 = formats.resolve_ensemble("mm2")
        assert mm2.probs == (0.5, 0.5)
        pure = formats.resolve_ensemble("pure0")
        assert pure.size == 1
        assert abs(pure.states[0][0]) == pytest.approx(1.0)

    def test_state_file(self, tmp_path):
        path = _write(tmp_path, "state.json", {"dim": 2, "matrix": [[0.75, [0, 0.25]], [[0, -0.25], 0.25]]})
        rho = formats.resolve_state(path)
        assert rho.mat[0, 1] == pytest.approx(0.25j)

    def test_state_file_must_be_a_state(self, tmp_path):
        path = _write(tmp_path, "state.json", {"dim": 2, "matrix": [[1.0, 0.0], [0.0, 1.0]]})
        with pytest.raises(FileFormatError, match="trace"):
            formats.load_state(path)

    def test_ensemble_file(self, tmp_path):
        path = _write(tmp_path, "ens.json", {"probs": [0.5, 0.5], "states": [[1, 0], [0.6, 0.8]]})
        e = formats.resolve_ensemble(path)
        assert e.size == 2
        rho = formats.load_state(path)
        assert rho.mat[1, 1] == pytest.approx(0.32)

    def test_ensemble_file_length_mismatch(self, tmp_path):
        path = _write(tmp_path, "ens.json", {"probs": [1.0], "states": [[1, 0], [0, 1]]})
        with pytest.raises(FileFormatError):
            formats.load_ensemble(path)


class TestReportStreams:
    def _report(self):
        return inequality_service.check_dpi(
            formats.resolve_ensemble("mm2"),
            channel_service.identity_channel(2),
            channel_service.two_pauli(0.5),
            instance={"seed": 7, "trial": 2},
        )

    def test_csv_header_written_once(self):
        stream = io.StringIO()
        writer = formats.ReportWriter(stream, "csv")
        writer.write(self._report())
        writer.write(self._report())
        lines = stream.getvalue().splitlines()
        assert lines[0] == "name,trial,lhs,rhs,slack,satisfied,c,cpVerdict,seed"
        assert len(lines) == 3
        assert lines[1] == "dpi,2,1.0,-0.5,1.5,true,,,7"

    def test_json_lines(self):
        stream = io.StringIO()
        formats.ReportWriter(stream, "json").write(self._report())
        document = json.loads(stream.getvalue())
        assert document["name"] == "dpi"
        assert document["slack"] == pytest.approx(1.5)

    def test_indeterminate_slack(self):
        report = inequality_service.build_report(
            inequality_service.Inequality.LINDBLAD, INFINITE, INFINITE, 1e-9, {"trial": 0, "seed": 1}
        )
        assert formats.report_row(report)[2:6] == ["inf", "inf", "indeterminate", "true"]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            formats.ReportWriter(io.StringIO(), "xml")


class TestSweepTable:
    ROW = SweepRow(x=0.5, c_numeric=0.25, c_eq27=0.5, c_bloch=0.25, abs_diff=0.25, agrees=False)

    def test_csv_header_is_exact(self):
        stream = io.StringIO()
        formats.write_sweep([], stream)
        assert stream.getvalue() == "x,c_numeric,c_eq27,abs_diff,agrees\n"

    def test_csv_row(self):
        stream = io.StringIO()
        formats.write_sweep([self.ROW], stream)
        assert stream.getvalue().splitlines()[1] == "0.5,0.25,0.5,0.25,false"

    def test_json_carries_bloch_minimum(self):
        stream = io.StringIO()
        formats.write_sweep([self.ROW], stream, "json")
        assert json.loads(stream.getvalue()) == [
            {"x": 0.5, "c_numeric": 0.25, "c_eq27": 0.5, "c_bloch": 0.25, "abs_diff": 0.25, "agrees": False}
        ]
