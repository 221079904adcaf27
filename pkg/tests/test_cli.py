from fractions import Fraction

import pytest

from mddmine.cli import SCENARIOS, _parse_min_support, _resolve_theta, main

from conftest import CLICK_ATTR_TSV, CLICK_SPMF


@pytest.fixture
def click_files(tmp_path):
    spmf = tmp_path / "clicks.spmf"
    attrs = tmp_path / "clicks.tsv"
    spmf.write_text(CLICK_SPMF)
    attrs.write_text(CLICK_ATTR_TSV)
    return spmf, attrs


def run_mine(click_files, tmp_path, *extra):
    spmf, attrs = click_files
    out = tmp_path / "patterns.txt"
    code = main([
        "mine", "--db", str(spmf), "--attrs", str(attrs),
        "--output", str(out), *extra,
    ])
    assert code == 0
    return out.read_text()


class TestMine:
    def test_gap_scenario_two_lines(self, click_files, tmp_path):
        text = run_mine(click_files, tmp_path,
                        "--min-sup", "2", "--constraint", "gap(time)>=3")
        assert text == "1\t#SUP: 2\n2\t#SUP: 2\n"

    def test_all_miners_identical(self, click_files, tmp_path):
        outputs = {
            miner: run_mine(click_files, tmp_path, "--min-sup", "1",
                            "--constraint", "gap(time)<=3", "--miner", miner)
            for miner in ("mpp", "ppcc", "brute")
        }
        assert outputs["mpp"] == outputs["ppcc"] == outputs["brute"]

    def test_fractional_support_uses_ceiling(self, click_files, tmp_path):
        # 0.5 of 3 sequences rounds up to 2
        frac = run_mine(click_files, tmp_path, "--min-sup", "0.5")
        abs2 = run_mine(click_files, tmp_path, "--min-sup", "2")
        assert frac == abs2

    def test_min_sup_zero_is_an_argument_error(self, click_files, tmp_path):
        spmf, attrs = click_files
        with pytest.raises(SystemExit) as err:
            main(["mine", "--db", str(spmf), "--attrs", str(attrs),
                  "--min-sup", "0"])
        assert err.value.code == 2

    def test_disable_prop5_identical_output(self, click_files, tmp_path):
        base = run_mine(click_files, tmp_path, "--min-sup", "1")
        off = run_mine(click_files, tmp_path, "--min-sup", "1", "--disable-prop5")
        assert base == off

    def test_threads_identical_output(self, click_files, tmp_path):
        base = run_mine(click_files, tmp_path, "--min-sup", "1")
        multi = run_mine(click_files, tmp_path, "--min-sup", "1", "--threads", "2")
        assert base == multi

    def test_emit_stats_report(self, click_files, tmp_path):
        report = tmp_path / "run.tsv"
        run_mine(click_files, tmp_path, "--min-sup", "2",
                 "--emit-stats", "--report", str(report))
        rows = dict(
            line.split("\t") for line in report.read_text().splitlines()
        )
        for key in ("mdd_build_seconds", "info_prop_seconds", "mining_seconds",
                    "scanned_sequences", "constraint_checks", "patterns_written"):
            assert key in rows
        assert rows["patterns_written"] == "3"

    def test_scenario_preset(self, click_files, tmp_path):
        # severe time constraints: nothing qualifies, but the preset must run
        text = run_mine(click_files, tmp_path, "--min-sup", "1", "--scenario", "1")
        assert text == ""

    def test_repeated_runs_byte_identical(self, click_files, tmp_path):
        first = run_mine(click_files, tmp_path, "--min-sup", "1",
                         "--constraint", "avg(price)<=3")
        second = run_mine(click_files, tmp_path, "--min-sup", "1",
                          "--constraint", "avg(price)<=3")
        assert first == second

    def test_median_pareto_flag_runs(self, click_files, tmp_path):
        base = run_mine(click_files, tmp_path, "--min-sup", "1",
                        "--constraint", "med(price)>=2")
        pareto = run_mine(click_files, tmp_path, "--min-sup", "1",
                          "--constraint", "med(price)>=2", "--median-pareto")
        assert base == pareto

    def test_missing_db_is_runtime_error(self, tmp_path, capsys):
        code = main(["mine", "--db", str(tmp_path / "nope.spmf"), "--min-sup", "1"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestMinSupportParsing:
    def test_absolute(self):
        assert _parse_min_support("2") == ("abs", 2)

    def test_fraction_is_exact(self):
        assert _resolve_theta("0.04", 50) == 2
        assert _resolve_theta("0.04", 49) == 2
        assert _resolve_theta("0.04", 51) == 3

    def test_fraction_bounds(self):
        with pytest.raises(ValueError):
            _parse_min_support("0.0")
        with pytest.raises(ValueError):
            _parse_min_support("1.5")
        assert _parse_min_support("1.0") == ("frac", Fraction(1))


class TestOtherCommands:
    def test_gen_attrs_deterministic(self, click_files, tmp_path):
        spmf, _ = click_files
        first = tmp_path / "a.tsv"
        second = tmp_path / "b.tsv"
        for path in (first, second):
            assert main(["gen-attrs", "--db", str(spmf), "--seed", "9",
                         "--output", str(path)]) == 0
        assert first.read_text() == second.read_text()
        header = first.read_text().splitlines()[0]
        assert header == "sid\tpos\ttime\tprice\tquality"

    def test_gen_attrs_feeds_mine(self, click_files, tmp_path):
        spmf, _ = click_files
        attrs = tmp_path / "gen.tsv"
        assert main(["gen-attrs", "--db", str(spmf), "--seed", "3",
                     "--output", str(attrs)]) == 0
        out = tmp_path / "p.txt"
        assert main(["mine", "--db", str(spmf), "--attrs", str(attrs),
                     "--min-sup", "2", "--output", str(out)]) == 0
        assert "2\t#SUP:" in out.read_text()

    def test_stats(self, click_files, tmp_path, capsys):
        spmf, attrs = click_files
        assert main(["stats", "--db", str(spmf), "--attrs", str(attrs)]) == 0
        text = capsys.readouterr().out
        assert "n_sequences\t3" in text
        assert "avg_len\t8/3" in text

    def test_export_dot(self, click_files, tmp_path):
        spmf, attrs = click_files
        out = tmp_path / "m.dot"
        assert main(["export-dot", "--db", str(spmf), "--attrs", str(attrs),
                     "--constraint", "gap(time)>=3", "--output", str(out)]) == 0
        text = out.read_text()
        assert text.startswith("digraph mdd {")
        assert 'n1_2 [label="2@1"];' in text

    def test_scenario_table(self):
        assert len(SCENARIOS[1]) == 4
        assert len(SCENARIOS[2]) == 8
        assert len(SCENARIOS[3]) == 12


def test_unknown_attribute_is_a_runtime_error(click_files, tmp_path, capsys):
    spmf, attrs = click_files
    code = main(["mine", "--db", str(spmf), "--attrs", str(attrs),
                 "--min-sup", "1", "--constraint", "gap(weight)>=3"])
    assert code == 1
    assert "weight" in capsys.readouterr().err
