import json

import pytest

from heisenqc import __version__
from heisenqc.errors import ConfigError
from heisenqc.storage_manager import load_data, save_csv, save_data, stamp


def test_save_data_is_sorted_and_finite(tmp_path):
    path = save_data(tmp_path / "nested" / "report.json", {"b": float("nan"), "a": [1.0, float("-inf")]})
    text = path.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")
    assert json.loads(text) == {"a": [1.0, "-inf"], "b": "nan"}


def test_load_data(tmp_path):
    path = tmp_path / "config.json"
    path.write_text('{"seed": 1}', encoding="utf-8")
    assert load_data(path) == {"seed": 1}
    assert load_data(tmp_path / "missing.json", default={}) == {}
    with pytest.raises(ConfigError, match="not found"):
        load_data(tmp_path / "missing.json")
    path.write_text("{oops", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_data(path)


def test_load_data_from_directory(tmp_path):
    with pytest.raises(ConfigError, match="could not be read"):
        load_data(tmp_path)


def test_save_csv(tmp_path):
    path = save_csv(tmp_path / "table.csv", ["x", "label"], [[0.1, "a,b"], [2, "c"]], "abc123")
    raw = path.read_bytes().decode("utf-8")
    lines = raw.split("\r\n")
    assert lines[0] == "x,label,config_hash,version"
    assert lines[1] == f'0.1,"a,b",abc123,{__version__}'
    assert lines[2] == f"2,c,abc123,{__version__}"
    assert lines[3] == ""


def test_stamp():
    stamped = stamp({"value": 1}, {"seed": 0}, "hash", 1)
    assert stamped["value"] == 1
    assert stamped["config"] == {"seed": 0}
    assert stamped["meta"]["config_hash"] == "hash"
    assert stamped["meta"]["schema_version"] == 1
    assert set(stamped["meta"]["versions"]) == {"heisenqc", "numpy", "scipy"}
