import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flab.errors import ConfigError
from flab.textio import (dumps_json, format_complex, format_float, format_zeros, parse_complex,
                         parse_complex_list, parse_zeros, read_config, read_matrix, read_zeros, write_matrix)
from flab.zerofind import ZeroSet

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite)
def test_float_round_trip(x):
    assert float(format_float(x)) == x


@given(finite, finite)
def test_complex_round_trip(a, b):
    z = complex(a, b)
    assert parse_complex(format_complex(z)) == z


@pytest.mark.parametrize("text, value", [("i", 1j), ("-i", -1j), ("1-i", 1 - 1j), ("2+3i", 2 + 3j), ("-2.5", -2.5),
                                         ("0.5-0.5i", 0.5 - 0.5j), ("3j", 3j), (" 1 + 2i ", 1 + 2j), ("-1e-3i", -1e-3j)])
def test_parse_complex_forms(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1+", "i2"])
def test_parse_complex_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)


def test_format_complex_signs():
    assert format_complex(1 - 1j) == "1-1i"
    assert format_complex(complex(0, -0.0)) == "0-0i"
    assert parse_complex_list("-i, 1-i,") == [-1j, 1 - 1j]


def test_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    path = tmp_path / "B.csv"
    write_matrix(path, B)
    assert path.read_text().startswith("# n=3\n")
    np.testing.assert_array_equal(read_matrix(path), B)


@pytest.mark.parametrize("text, line", [("1,2\n", 1), ("# n=2\n1,2\n3\n", 3), ("# n=2\n1,x\n0,1\n", 2),
                                        ("# n=2\n1,0\n", None)])
def test_matrix_errors(tmp_path, text, line):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ConfigError) as info:
        read_matrix(path)
    if line is not None:
        assert f"{path}:{line}:" in str(info.value)


def test_zeros_round_trip(tmp_path):
    Z = ZeroSet(((-1 + 0j, 1), (complex(0.1, -2.000000000000001), 3)))
    path = tmp_path / "z.csv"
    path.write_text(format_zeros(Z))
    back = read_zeros(path)
    assert back == Z
    assert format_zeros(ZeroSet()) == "re,im,multiplicity\n"
    assert len(parse_zeros("re,im,multiplicity\n")) == 0


@pytest.mark.parametrize("text, line", [("re,im,multiplicity\n-1,0,1\n-2,0,x\n", 3),
                                        ("re,im,multiplicity\n-1,0\n", 2), ("re,im,multiplicity\n-1,0,0\n", 2),
                                        ("a,b,c\n", 1), ("re,im,multiplicity\n-1,0,1\nfoo,0,1\n", 3)])
def test_zeros_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError, match=f"z.csv:{line}:"):
        parse_zeros(text, "z.csv")


def test_zeros_on_cut_rejected():
    with pytest.raises(ConfigError):
        parse_zeros("re,im,multiplicity\n2,0,1\n")


def test_dumps_json_stable():
    text = dumps_json({"b": np.float64(0.1), "a": [np.int64(2), float("inf"), 1 - 2j, np.bool_(True)]})
    assert text == dumps_json(json.loads(text))
    data = json.loads(text)
    assert list(data) == ["a", "b"] and data["a"] == [2, "inf", "1-2i", True] and data["b"] == 0.1


def test_read_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# sweep\nfamily = inv-sqrt\neps-prime=0.2  # trailing\n\nM = 3\n")
    assert read_config(path) == {"family": "inv-sqrt", "eps_prime": "0.2", "M": "3"}
    path.write_text("family inv-sqrt\n")
    with pytest.raises(ConfigError, match=":1:"):
        read_config(path)
    with pytest.raises(ConfigError):
        read_config(tmp_path / "missing.cfg")
