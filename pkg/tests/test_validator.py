"""
Self-check rows and the result cache.
"""

import pytest

import database
from validator import Check, check_equal, check_geq, check_leq, exit_code_for, format_check, summarize_checks


class TestChecks:
    def test_relations(self):
        assert check_equal("eq", 1.0, 1.0 + 1e-13, 1e-12).passed
        assert not check_equal("eq", 1.0, 1.1).passed
        assert check_leq("le", 0.4, 0.5).passed
        assert check_geq("ge", 0.5, 0.4).passed
        assert not check_geq("ge", 0.4, 0.5).passed

    def test_serialized_key_is_pass(self):
        row = check_leq("key norm m=2", 0.5, 0.7071).model_dump(by_alias=True)
        assert row == {"name": "key norm m=2", "pass": True, "lhs": 0.5, "rhs": 0.7071}

    def test_roundtrip_through_alias(self):
        row = check_equal("catalan p=3", 5, 5).model_dump(by_alias=True)
        assert Check.model_validate(row).passed

    def test_summary_and_exit_code(self):
        rows = [check_equal("a", 1, 1), check_geq("b", 0.0, 1.0)]
        assert summarize_checks(rows) == ("FAIL", 1, ["b"])
        assert exit_code_for(rows) == 3
        assert exit_code_for(rows[:1]) == 0
        assert exit_code_for([]) == 0

    def test_format(self):
        assert format_check(check_equal("a", 1, 1)).startswith("✓ a")


class TestCache:
    @pytest.fixture
    def db_path(self, tmp_path):
        path = tmp_path / "results.db"
        database.init_database(path)
        return path

    def test_store_and_fetch(self, db_path):
        database.cache_result("spectral", {"u": 1.0, "T": 3.0}, "1.0.0", {"results": [1]}, db_path)
        assert database.get_cached_result("spectral", {"T": 3.0, "u": 1.0}, "1.0.0", db_path) == {"results": [1]}

    def test_version_separates_entries(self, db_path):
        database.cache_result("spectral", {"u": 1.0}, "1.0.0", {"results": [1]}, db_path)
        assert database.get_cached_result("spectral", {"u": 1.0}, "2.0.0", db_path) is None

    def test_clear_and_stats(self, db_path):
        database.cache_result("moments", {"p": 1}, "v", {}, db_path)
        database.cache_result("spectral", {"u": 1}, "v", {}, db_path)
        assert database.get_cache_stats(db_path) == {"total_entries": 2, "by_command": {"moments": 1, "spectral": 1}}
        database.clear_cache("moments", db_path)
        assert database.get_cache_stats(db_path)["total_entries"] == 1

    def test_canonical_key(self):
        assert database.canonical_key({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'

    def test_missing_table_reads_as_miss(self, tmp_path):
        assert database.get_cached_result("spectral", {}, "v", tmp_path / "empty.db") is None
