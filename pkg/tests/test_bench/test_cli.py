"""Tests for the benchmark command line."""

import csv
import filecmp
import os
import shutil
import tempfile

import pytest

from src.bench.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, UsageError, build_parser, main


SMALL = ["--products", "un:80:1", "--customers", "un:60:2", "--candidates", "un:6:3",
         "--d", "2", "--fanout", "4"]

TIMING_COLUMNS = ("wall_ms",)


def _rows(text):
    lines = [line for line in text.splitlines() if line and not line.startswith("#")]
    return list(csv.DictReader(lines))


def _read_rows(path):
    with open(path, encoding="utf-8") as f:
        return _rows(f.read())


def _strip_timing(rows):
    return [{k: v for k, v in row.items() if k not in TIMING_COLUMNS} for row in rows]


class TestParser:
    """Test argument parsing."""

    def test_usage_error_raised(self):
        with pytest.raises(UsageError):
            build_parser().parse_args(["gen", "--n", "10", "--d", "1", "--out", "x.csv"])

    def test_missing_command(self):
        with pytest.raises(UsageError):
            build_parser().parse_args([])

    def test_query_defaults(self):
        args = build_parser().parse_args(["query"] + SMALL)
        assert args.engine == "rsl"
        assert args.dimensions == 2
        assert not args.verify


class TestCommands:
    """Test the subcommands end to end on small workloads."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        shutil.rmtree(self.temp_dir)

    def _path(self, name):
        return os.path.join(self.temp_dir, name)

    def test_gen(self):
        out = self._path("p.csv")
        assert main(["gen", "--dist", "un", "--n", "1000", "--d", "3", "--seed", "1",
                     "--out", out]) == EXIT_OK
        with open(out, encoding="utf-8") as f:
            lines = [line for line in f.read().splitlines() if not line.startswith("#")]
        assert len(lines) == 1000
        assert len(lines[0].split(",")) == 4

    def test_gen_deterministic(self):
        a, b = self._path("a.csv"), self._path("b.csv")
        for out in (a, b):
            assert main(["gen", "--dist", "ac", "--n", "200", "--d", "2", "--seed", "4",
                         "--out", out]) == EXIT_OK
        assert filecmp.cmp(a, b, shallow=False)

    def test_gen_invalid_dimension(self):
        assert main(["gen", "--n", "10", "--d", "1", "--out", self._path("x.csv")]) == EXIT_USAGE

    def test_query_engines_agree(self, capsys):
        assert main(["query", "--engine", "rsl"] + SMALL) == EXIT_OK
        rsl_rows = _rows(capsys.readouterr().out)
        assert main(["query", "--engine", "brs"] + SMALL) == EXIT_OK
        brs_rows = _rows(capsys.readouterr().out)
        assert len(rsl_rows) == 7
        assert [r["influence"] for r in rsl_rows] == [r["influence"] for r in brs_rows]
        assert rsl_rows[-1]["candidate_id"] == "total"

    def test_query_verify(self, capsys):
        assert main(["query", "--verify"] + SMALL) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert rows and all(r["oracle_ok"] == "True" for r in rows)

    def test_query_empty_candidates(self, capsys):
        args = ["query", "--products", "un:50:1", "--customers", "un:50:2",
                "--candidates", "un:0", "--d", "2"]
        assert main(args) == EXIT_OK
        assert _rows(capsys.readouterr().out) == []

    def test_query_writes_progress(self):
        out = self._path("query.csv")
        assert main(["query", "--out", out] + SMALL) == EXIT_OK
        progress = _read_rows(self._path("query.progress.csv"))
        assert progress
        assert {r["engine"] for r in progress} == {"rsl"}
        with open(out, encoding="utf-8") as f:
            assert f.readline().strip() == "# rskyline-kit v1"

    def test_query_missing_file(self):
        args = ["query", "--products", self._path("missing.csv"), "--d", "2",
                "--customers", "un:10:2", "--candidates", "un:2:3"]
        assert main(args) == EXIT_RUNTIME

    def _raw_csv(self):
        path = self._path("raw.csv")
        with open(path, "w", encoding="utf-8") as f:
            f.write("price,size,rating\n1200,3.5,4\n800,2.0,5\n1500,4.2,3\n")
        return path

    def test_query_raw_csv(self, capsys):
        raw = self._raw_csv()
        args = ["query", "--products", raw, "--customers", raw, "--candidates", raw, "--d", "3"]
        assert main(args + ["--verify"]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert [r["candidate_id"] for r in rows] == ["0", "1", "2", "total"]
        assert all(r["oracle_ok"] == "True" for r in rows)
        assert main(args + ["--normalize", "--verify"]) == EXIT_OK
        assert all(r["oracle_ok"] == "True" for r in _rows(capsys.readouterr().out))

    def test_query_id_column_flag(self, capsys):
        raw = self._raw_csv()
        args = ["query", "--products", raw, "--customers", raw, "--candidates", raw, "--id-column"]
        assert main(args + ["--d", "3"]) == EXIT_RUNTIME
        assert main(args + ["--d", "2"]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert [r["candidate_id"] for r in rows] == ["1200", "800", "1500", "total"]

    def test_kmac_batch_matches_basic(self):
        results = {}
        for engine in ("basic-rsl", "batch", "basic-brs"):
            out = self._path(f"{engine}.csv")
            assert main(["kmac", "--engine", engine, "--k", "2", "--batch-size", "3",
                         "--out", out] + SMALL) == EXIT_OK
            results[engine] = _read_rows(out)[0]
        for engine in ("batch", "basic-brs"):
            assert results[engine]["chosen_ids"] == results["basic-rsl"]["chosen_ids"]
            assert results[engine]["joint_score"] == results["basic-rsl"]["joint_score"]
        assert int(results["batch"]["total_io"]) <= int(results["basic-rsl"]["total_io"])
        assert len(_read_rows(self._path("batch.candidates.csv"))) == 6

    def test_kmac_bb_top1(self, capsys):
        assert main(["kmac", "--engine", "basic-rsl", "--k", "1"] + SMALL) == EXIT_OK
        basic = _rows(capsys.readouterr().out)[0]
        assert main(["kmac", "--engine", "bb", "--k", "1"] + SMALL) == EXIT_OK
        bb = _rows(capsys.readouterr().out)[0]
        assert bb["chosen_ids"] == basic["chosen_ids"]
        assert bb["joint_score"] == basic["joint_score"]

    def test_kmac_verify(self, capsys):
        assert main(["kmac", "--engine", "batch", "--k", "2", "--verify"] + SMALL) == EXIT_OK
        row = _rows(capsys.readouterr().out)[0]
        assert row["oracle_ok"] == "True"
        assert int(row["opt_score"]) >= int(row["joint_score"])

    def test_kmac_k_too_large(self):
        assert main(["kmac", "--k", "7"] + SMALL) == EXIT_USAGE

    def test_kmac_deterministic(self):
        a, b = self._path("a.csv"), self._path("b.csv")
        for out in (a, b):
            assert main(["kmac", "--engine", "bb", "--k", "2", "--out", out] + SMALL) == EXIT_OK
        assert _strip_timing(_read_rows(a)) == _strip_timing(_read_rows(b))
        assert (_strip_timing(_read_rows(self._path("a.candidates.csv")))
                == _strip_timing(_read_rows(self._path("b.candidates.csv"))))

    def test_sweep_products(self, capsys):
        args = ["sweep", "--axis", "P", "--values", "40,80", "--engine", "basic-rsl,batch",
                "--k", "2"] + SMALL
        assert main(args) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert len(rows) == 4
        assert [(r["value"], r["engine"]) for r in rows] == [
            ("40", "basic-rsl"), ("40", "batch"), ("80", "basic-rsl"), ("80", "batch")
        ]

    def test_sweep_batch_size(self, capsys):
        args = ["sweep", "--axis", "B", "--values", "1,3,6", "--engine", "batch"] + SMALL
        assert main(args) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert [r["batch_size"] for r in rows] == ["1", "3", "6"]
        assert len({r["chosen_ids"] for r in rows}) == 1

    def test_sweep_unknown_axis(self):
        assert main(["sweep", "--axis", "Z", "--values", "1"] + SMALL) == EXIT_USAGE

    def test_sweep_unknown_engine(self):
        assert main(["sweep", "--axis", "k", "--values", "1", "--engine", "fast"] + SMALL) == EXIT_USAGE

    def test_sweep_path_axis(self):
        products = self._path("p.csv")
        assert main(["gen", "--n", "30", "--d", "2", "--out", products]) == EXIT_OK
        args = ["sweep", "--axis", "P", "--values", "10", "--products", products,
                "--customers", "un:20:2", "--candidates", "un:3:3", "--d", "2"]
        assert main(args) == EXIT_USAGE
