"""Tests for CSV item I/O and the bundled fixtures."""

from __future__ import annotations

import io

import numpy as np
import pytest

from fairexposure.core import PositionBias, RankingProblem, utility
from fairexposure.datasets import (
    NEWS_SEED,
    jobseeker_items,
    load_jobseeker,
    load_synthetic_news,
    read_items_csv,
    synthetic_news_items,
    write_items_csv,
)
from fairexposure.lp import solve_problem


class TestReadItemsCsv:
    def test_parses_minimal_file(self):
        text = "id,group,utility\nx,G,0.5\ny,H,0.25\n"
        items = read_items_csv(io.StringIO(text))
        assert [it.id for it in items] == ["x", "y"]
        assert [it.group for it in items] == ["G", "H"]
        assert [it.utility for it in items] == [0.5, 0.25]

    def test_whitespace_around_fields_tolerated(self):
        items = read_items_csv(io.StringIO("id,group,utility\n a , G , 0.5 \n"))
        assert items[0].id == "a" and items[0].utility == 0.5

    def test_blank_lines_skipped(self):
        items = read_items_csv(io.StringIO("id,group,utility\n\na,G,0.5\n\n"))
        assert len(items) == 1

    def test_missing_header_rejected(self):
        with pytest.raises(ValueError, match="line 1: expected header"):
            read_items_csv(io.StringIO("a,G,0.5\n"))

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError, match="empty input"):
            read_items_csv(io.StringIO(""))

    def test_header_only_rejected(self):
        with pytest.raises(ValueError, match="no item rows"):
            read_items_csv(io.StringIO("id,group,utility\n"))

    def test_field_count_error_carries_line_number(self):
        with pytest.raises(ValueError, match="line 3: expected 3 fields"):
            read_items_csv(io.StringIO("id,group,utility\na,G,0.5\nb,H\n"))

    def test_bad_utility_error_carries_line_number(self):
        with pytest.raises(ValueError, match="line 2: utility must be a decimal"):
            read_items_csv(io.StringIO("id,group,utility\na,G,high\n"))

    def test_out_of_range_utility_error_carries_line_number(self):
        with pytest.raises(ValueError, match=r"line 2: utility of item 'a'"):
            read_items_csv(io.StringIO("id,group,utility\na,G,1.5\n"))

    def test_duplicate_id_rejected(self):
        with pytest.raises(ValueError, match="line 3: duplicate item id 'a'"):
            read_items_csv(io.StringIO("id,group,utility\na,G,0.5\na,H,0.6\n"))

    def test_empty_id_rejected(self):
        with pytest.raises(ValueError, match="line 2: empty item id"):
            read_items_csv(io.StringIO("id,group,utility\n,G,0.5\n"))

    def test_path_input(self, tmp_path):
        path = tmp_path / "items.csv"
        path.write_text("id,group,utility\na,G,0.5\n", encoding="utf-8")
        assert read_items_csv(path)[0].id == "a"


class TestWriteItemsCsv:
    def test_round_trips_exactly(self, tmp_path):
        items = synthetic_news_items()
        path = tmp_path / "out.csv"
        write_items_csv(items, path)
        assert read_items_csv(path) == items

    def test_stream_output(self):
        buffer = io.StringIO()
        write_items_csv(jobseeker_items(), buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "id,group,utility"
        assert lines[1] == "m1,M,0.82"
        assert len(lines) == 7


class TestJobseekerFixture:
    def test_generator_values(self):
        items = jobseeker_items()
        assert [it.id for it in items] == ["m1", "m2", "m3", "f1", "f2", "f3"]
        assert [it.group for it in items] == ["M", "M", "M", "F", "F", "F"]
        np.testing.assert_allclose(
            [it.utility for it in items], [0.82, 0.81, 0.80, 0.79, 0.78, 0.77]
        )

    def test_bundled_csv_matches_generator(self):
        assert load_jobseeker() == jobseeker_items()

    def test_reproduces_known_objective(self):
        problem = RankingProblem(
            items=load_jobseeker(), position_bias=PositionBias.log_discount(6)
        )
        report = solve_problem(problem, [])
        assert report.objective == pytest.approx(3.8193, abs=5e-4)


class TestSyntheticNewsFixture:
    def test_shape_and_groups(self):
        items = synthetic_news_items()
        assert len(items) == 25
        assert [it.group for it in items].count("A") == 15
        assert [it.group for it in items].count("B") == 10
        assert items[0].id == "n01" and items[24].id == "n25"
        assert all(0.0 <= it.utility <= 1.0 for it in items)

    def test_bundled_csv_matches_generator(self):
        assert load_synthetic_news() == synthetic_news_items()

    def test_generator_is_seed_deterministic(self):
        assert synthetic_news_items(NEWS_SEED) == synthetic_news_items(NEWS_SEED)
        assert synthetic_news_items(0) != synthetic_news_items(1)

    def test_matches_documented_recipe(self):
        rng = np.random.default_rng(NEWS_SEED)
        ratings = rng.integers(1, 6, size=25)
        noise = rng.normal(0.0, 0.05, size=25)
        expected = np.clip(ratings / 5.0 + noise, 0.0, 1.0)
        actual = [it.utility for it in synthetic_news_items()]
        np.testing.assert_allclose(actual, expected, rtol=0, atol=0)

    def test_prp_utility_positive(self):
        items = load_synthetic_news()
        problem = RankingProblem(
            items=items, position_bias=PositionBias.log_discount(25)
        )
        identity = np.eye(25)[np.argsort([-it.utility for it in items], kind="stable")]
        assert utility(identity.T, problem) > 0
