import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from markov.errors import DimensionMismatchError, StochasticityError, TensorStructureError
from markov.tensor import StochasticTensor
from markov.tensor_io import (
    dumps_json,
    dumps_text,
    load_tensor,
    load_vector,
    parse_json,
    parse_text,
    save_tensor,
)

GOOD = """\
# two-state chain, second order
order 3 dim 2

1 1 1 0.25
2 1 1 0.75
1 2 1 1.0
2 1 2 1.0
1 2 2 0.5
2 2 2 0.5
"""


class TestParseText:
    def test_comments_and_blank_lines(self):
        order, dim, entries = parse_text(GOOD)
        assert (order, dim) == (3, 2)
        assert len(entries) == 6
        assert entries[0] == ([1, 1, 1], 0.25)

    def test_missing_header(self):
        with pytest.raises(TensorStructureError, match="missing"):
            parse_text("# nothing here\n")

    def test_bad_header_reports_line(self):
        with pytest.raises(TensorStructureError, match=r"f:2: expected header"):
            parse_text("# c\nsize 3 2\n", source="f")

    def test_wrong_arity_reports_line(self):
        with pytest.raises(TensorStructureError, match=r":3: expected 3 indices"):
            parse_text("order 3 dim 2\n1 1 1 1.0\n1 2 0.5\n")

    def test_index_out_of_range(self):
        with pytest.raises(TensorStructureError, match=r"out of range 1\.\.2"):
            parse_text("order 2 dim 2\n3 1 1.0\n")
        with pytest.raises(TensorStructureError, match="out of range"):
            parse_text("order 2 dim 2\n0 1 1.0\n")

    def test_unparsable_value(self):
        with pytest.raises(TensorStructureError, match="cannot parse"):
            parse_text("order 2 dim 2\n1 1 abc\n")


class TestParseJson:
    def test_entries(self):
        order, dim, entries = parse_json('{"order": 2, "dim": 2, "entries": [[1, 1, 1.0], [2, 2, 1.0]]}')
        assert (order, dim) == (2, 2)
        assert entries == [([1, 1], 1.0), ([2, 2], 1.0)]

    @pytest.mark.parametrize("doc", ["not json", '{"order": 2}', '{"order": 2, "dim": 2, "entries": [[1, 1]]}'])
    def test_malformed(self, doc):
        with pytest.raises(TensorStructureError):
            parse_json(doc)


class TestLoadSave:
    def test_text_file_round_trip(self, fixture_i, tensor_file):
        path = tensor_file(fixture_i.tensor)
        again = load_tensor(path)
        assert_array_equal(again.to_dense(), fixture_i.tensor.to_dense())

    def test_json_file_round_trip(self, random_tensor, tensor_file):
        t = random_tensor(4, 3, seed=5, density=0.4)
        again = load_tensor(tensor_file(t, "t.json"))
        assert_array_equal(again.subs, t.subs)
        assert_array_equal(again.vals, t.vals)

    def test_dumps_formats(self):
        t = StochasticTensor.from_dense(np.eye(2))
        assert dumps_text(t).splitlines() == ["order 2 dim 2", "1 1 1", "2 2 1"]
        assert json.loads(dumps_json(t)) == {"order": 2, "dim": 2, "entries": [[1, 1, 1.0], [2, 2, 1.0]]}

    def test_invalid_file_suggests_repair(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("order 2 dim 2\n1 1 0.5\n2 1 0.3\n2 2 1.0\n")
        with pytest.raises(StochasticityError, match=r"\(try --repair\)"):
            load_tensor(path)

    def test_repair_on_load(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("order 2 dim 2\n1 1 0.5\n2 1 0.3\n2 2 1.0\n")
        t = load_tensor(path, repair=True)
        assert_allclose(t.to_dense()[:, 0], [0.625, 0.375])

    def test_unchecked_load(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("order 2 dim 2\n1 1 0.5\n")
        assert load_tensor(path, check=False).nnz == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError, match="cannot read tensor file"):
            load_tensor(tmp_path / "nope.txt")

    def test_save_creates_parent(self, tmp_path):
        path = save_tensor(StochasticTensor.uniform(2, 2), tmp_path / "deep" / "u.txt")
        assert path.exists()


class TestLoadVector:
    def test_whitespace(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("0.5 0.3\n0.2\n")
        assert_allclose(load_vector(path, n=3), [0.5, 0.3, 0.2])

    def test_json(self, tmp_path):
        path = tmp_path / "v.json"
        path.write_text("[0.25, 0.75]")
        assert_allclose(load_vector(path), [0.25, 0.75])

    def test_wrong_length(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("0.5 0.5")
        with pytest.raises(DimensionMismatchError):
            load_vector(path, n=3)

    def test_garbage(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("0.5 x")
        with pytest.raises(TensorStructureError):
            load_vector(path)
