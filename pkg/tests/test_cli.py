"""Command line behavior: pinned report lines, JSON determinism, exit codes,
and input diagnostics.

Frozen expectations:
  * rationalized units at level 6 on N: "H^0 = Q, H^1 = 0, H^2 = 0";
  * the henselian point with finite residue field: both kfl values are full
    divisible lines, "H1_kfl = Q/Z, H2_kfl = Q/Z";
  * level-12 degree-two torsion on the plane chart at char 3: the tame part
    of 12 is 4, two exponents of twisting, "Z/4 (twist -2)";
  * cyclic order 4 on Z/2+Z/4 has every degree equal to Z/2 (+) Z/4 (trivial
    action, even order: invariants, then alternating kernels and cokernels
    all coincide here).
"""

import json
import subprocess
import sys

import pytest

from kummercech.cli import (CliError, main, parse_coefficient, parse_module,
                            parse_monoid)
from kummercech.coefficients import ConstFinite, GmLogModGm, SplitTorus
from kummercech.fgab import FgAbGroup
from kummercech.monoid import FsMonoid


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPinnedLines:
    def test_cech_rationalized_units(self, capsys):
        code, out, _ = run_cli(capsys, "cech", "--monoid", "N", "--level",
                               "6", "--char", "0", "--coeff", "gmlog-bar",
                               "--max-degree", "3")
        assert code == 0
        assert out == "H^0 = Q, H^1 = 0, H^2 = 0\n"

    def test_example_dvr_finite(self, capsys):
        code, out, _ = run_cli(capsys, "example-dvr", "--residue", "finite")
        assert code == 0
        assert out == "H1_kfl = Q/Z, H2_kfl = Q/Z\n"

    def test_example_dvr_separably_closed(self, capsys):
        code, out, _ = run_cli(capsys, "example-dvr", "--residue",
                               "separably-closed")
        assert code == 0
        assert out == "H1_kfl = Q/Z, H2_kfl = 0\n"

    def test_formula_h2_torsion(self, capsys):
        code, out, _ = run_cli(capsys, "formula", "h2-torsion",
                               "--torus-dim", "1", "--n", "12", "--char",
                               "3", "--monoid", "N2")
        assert code == 0
        assert out == "Z/4 (twist -2)\n"


class TestInputGrammars:
    def test_monoid_shorthands(self):
        assert parse_monoid("N") == FsMonoid.natural(1)
        assert parse_monoid("N2") == FsMonoid.natural(2)
        assert parse_monoid("N3") == FsMonoid.natural(3)

    def test_monoid_inline_generators(self):
        P = parse_monoid("1,0;1,1;1,2")
        assert P == FsMonoid(2, [(1, 0), (1, 1), (1, 2)])

    def test_monoid_errors_name_the_field(self):
        with pytest.raises(CliError) as err:
            parse_monoid("1,0;2")
        assert err.value.field == "--monoid"
        with pytest.raises(CliError):
            parse_monoid("a,b")
        with pytest.raises(CliError):
            parse_monoid(";")

    def test_coefficient_grammar(self):
        assert parse_coefficient("gmlog-bar") == GmLogModGm()
        assert parse_coefficient("const:6") == ConstFinite(6)
        assert parse_coefficient("torus:2") == SplitTorus(2)
        with pytest.raises(CliError) as err:
            parse_coefficient("bogus")
        assert err.value.field == "--coeff"
        with pytest.raises(CliError):
            parse_coefficient("const:zero")

    def test_module_grammar(self):
        assert parse_module("Z").is_isomorphic(FgAbGroup.free(1))
        assert parse_module("Z^2+Z/6").is_isomorphic(
            FgAbGroup.from_invariants(2, [6]))
        assert parse_module("Z/2+Z/4").is_isomorphic(
            FgAbGroup.from_invariants(0, [2, 4]))
        # summands that are not a divisibility chain still make a group
        assert parse_module("Z/2+Z/3").is_isomorphic(FgAbGroup.cyclic(6))
        with pytest.raises(CliError) as err:
            parse_module("Q")
        assert err.value.field == "--module"


class TestExitCodes:
    def test_engine_validation_is_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "cech", "--monoid", "N", "--level",
                               "0")
        assert code == 2
        assert "level" in err

    def test_bad_monoid_is_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "cech", "--monoid", "1,0;2",
                               "--level", "4")
        assert code == 2
        assert "--monoid" in err

    def test_budget_diagnostic_names_sizes(self, capsys, monkeypatch):
        monkeypatch.setenv("KUMMERCECH_BAR_BUDGET", "10")
        code, _, err = run_cli(capsys, "groupcoh", "--order", "12",
                               "--module", "Z/4", "--degrees", "2")
        assert code == 2
        assert "budget" in err and "12^3" in err

    def test_unknown_suite_is_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "verify", "nosuch")
        assert code == 2
        assert "nosuch" in err and "suite" in err


class TestReports:
    def test_cech_json_shape(self, capsys):
        code, out, _ = run_cli(capsys, "cech", "--monoid", "N2", "--level",
                               "3", "--coeff", "const:3", "--max-degree",
                               "3", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == 1
        assert payload["command"] == "cech"
        assert [v["value"] for v in payload["values"]] == [
            "Z/3", "Z/3 (+) Z/3", "Z/3 (+) Z/3 (+) Z/3"]

    def test_json_runs_are_byte_identical(self, capsys):
        argv = ("cech", "--monoid", "N", "--level", "6", "--coeff",
                "gmlog-bar", "--json")
        _, first, _ = run_cli(capsys, *argv)
        _, second, _ = run_cli(capsys, *argv)
        assert first == second

    def test_monoid_info_cover_block(self, capsys):
        code, out, _ = run_cli(capsys, "monoid-info", "--monoid",
                               "1,0;1,1;1,2", "--level", "6", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["envelope_rank"] == 2
        assert payload["fine"] and payload["saturated"] and payload["sharp"]
        assert payload["cover"]["points"] == 36
        assert payload["cover"]["deck_render"] == "Z/6 (+) Z/6"

    def test_groupcoh_cross_check_agrees(self, capsys):
        code, out, _ = run_cli(capsys, "groupcoh", "--order", "4",
                               "--module", "Z/2+Z/4", "--degrees", "0,1,2")
        assert code == 0
        assert out.splitlines() == [
            "H^0 = Z/2 (+) Z/4, H^1 = Z/2 (+) Z/4, H^2 = Z/2 (+) Z/4",
            "closed form agrees"]

    def test_formula_r1_tame_mode(self, capsys):
        code, out, _ = run_cli(capsys, "formula", "r1", "--char", "5",
                               "--mode", "ket", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["mode"] == "ket"
        assert payload["group"]["divisible_torsion"]["deviations"] == [[5, 0]]

    def test_formula_kn_stalk(self, capsys):
        code, out, _ = run_cli(capsys, "formula", "kn-stalk", "--m", "3",
                               "--n", "12", "--q", "1", "--monoid", "N2")
        assert code == 0
        assert out == "Z/3 (+) Z/3 (twist -1)\n"

    def test_colimit_certificate(self, capsys):
        code, out, _ = run_cli(capsys, "colimit", "--coeff", "const:2",
                               "--degree", "1", "--window", "8", "--deaths",
                               "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["value"] == "Z/2"
        assert payload["certificate"]["grade"] == "certified"
        assert payload["deaths"]["verdict"] is True
        assert payload["deaths"]["witnesses"]

    def test_dedekind_default_configuration(self, capsys):
        code, out, _ = run_cli(capsys, "example-dedekind")
        assert code == 0
        assert "degree one: 0 -> 0 -> (Q/Z)^2 -> (Q/Z)^2 -> 0" in out
        assert "log Picard value: (Q/Z)^2" in out
        assert "right end surjective: permitted, H2_kfl = Q/Z" in out
        assert "right end zero: permitted, H2_kfl = (Q/Z)^2" in out
        assert "8 of 8 generator squares commute" in out

    def test_dedekind_config_file(self, capsys, tmp_path):
        config = tmp_path / "curve.json"
        config.write_text(json.dumps({
            "pic": {"free_rank": 0, "invariant_factors": [5]},
            "real_places": 0,
            "S": [{"residue": "finite"}]}))
        code, out, _ = run_cli(capsys, "example-dedekind", "--config",
                               str(config), "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == 1
        assert payload["h2_fl"] == "0"

    def test_dedekind_config_missing_key(self, capsys, tmp_path):
        config = tmp_path / "curve.json"
        config.write_text(json.dumps({"pic": {"free_rank": 0}}))
        code, _, err = run_cli(capsys, "example-dedekind", "--config",
                               str(config))
        assert code == 2
        assert "config.real_places" in err


class TestVerifySubcommand:
    def test_fast_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "dvr")
        assert code == 0
        assert "[dvr]" in out
        assert "expected" in out and "computed" in out
        assert "overall: ok" in out

    def test_multiple_suites_keep_canonical_order(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "dvr", "thm14")
        assert code == 0
        assert out.index("suite thm14") < out.index("suite dvr")

    def test_json_determinism(self, capsys):
        _, first, _ = run_cli(capsys, "verify", "cor19", "--json")
        _, second, _ = run_cli(capsys, "verify", "cor19", "--json")
        assert first == second
        payload = json.loads(first)
        assert payload["schema"] == 1
        assert payload["ok"] is True
        suite = payload["suites"][0]
        assert suite["anchor"] == "cor19"
        assert all(row["anchor"] == "cor19" for row in suite["cases"])

    def test_strict_flag_on_passing_suite(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "prop13", "--strict")
        assert code == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kummercech.cli", "example-dvr",
         "--residue", "finite"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert proc.stdout == "H1_kfl = Q/Z, H2_kfl = Q/Z\n"
