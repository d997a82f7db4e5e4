import logging
from fractions import Fraction

import pytest

import Config
from RationalIO import (SchemaError, dump_document, format_rational, load_document, parse_document, parse_integer,
                        parse_rational)


def test_parse_rational():
    assert parse_rational(3) == 3
    assert parse_rational("5/2") == Fraction(5, 2)
    assert parse_rational(" 0.25 ") == Fraction(1, 4)
    assert parse_rational(2.0) == 2
    for bad in (2.5, True, "two", "1/0", None):
        with pytest.raises(SchemaError):
            parse_rational(bad)


def test_parse_integer():
    assert parse_integer("4", minimum=0) == 4
    with pytest.raises(SchemaError, match="Invalid integer"):
        parse_integer("1/2")
    with pytest.raises(SchemaError, match="below 0"):
        parse_integer(-1, minimum=0)


def test_format_rational():
    assert format_rational(Fraction(6, 3)) == "2"
    assert format_rational(Fraction(-3, 4)) == "-3/4"


def test_documents(tmp_path):
    assert parse_document('{"schema": "cover-v1", "m": 0}', "cover-v1")["m"] == 0
    with pytest.raises(SchemaError, match="schema version mismatch"):
        parse_document('{"schema": "cover-v2"}', "cover-v1")
    with pytest.raises(SchemaError) as e:
        parse_document('{\n"schema": ', "cover-v1", source="bad.json")
    assert e.value.source == "bad.json" and e.value.line == 2
    with pytest.raises(SchemaError, match="must be an object"):
        parse_document("[]", "cover-v1")

    path = tmp_path / "doc.json"
    path.write_text(dump_document({"schema": "cover-v1", "b": 1, "a": [1, 2]}))
    assert load_document(path, "cover-v1") == {"schema": "cover-v1", "a": [1, 2], "b": 1}
    assert path.read_text().index('"a"') < path.read_text().index('"b"')


def test_config(monkeypatch):
    monkeypatch.delenv(Config.NODE_LIMIT_ENV, raising=False)
    assert Config.node_limit() == Config.DEFAULT_NODE_LIMIT
    monkeypatch.setenv(Config.NODE_LIMIT_ENV, "25")
    assert Config.node_limit() == 25
    monkeypatch.setenv(Config.NODE_LIMIT_ENV, "-3")
    with pytest.raises(ValueError):
        Config.node_limit()

    monkeypatch.setenv(Config.DEV_ORACLE_ENV, "yes")
    assert Config.dev_oracle_enabled()
    monkeypatch.setenv(Config.DEV_ORACLE_ENV, "0")
    assert not Config.dev_oracle_enabled()

    monkeypatch.delenv(Config.LOG_LEVEL_ENV, raising=False)
    assert Config.log_level() == logging.WARNING
    assert Config.log_level("debug") == logging.DEBUG
    with pytest.raises(ValueError):
        Config.log_level("chatty")
