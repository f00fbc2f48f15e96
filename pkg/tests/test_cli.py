from __future__ import annotations

import json
import shutil
import subprocess
import sys
from fractions import Fraction

import pytest

from wallforge.cli import _merge_negative_values, main, verify_replay
from wallforge.groupalg import AlgebraPresentation
from wallforge.lie import LieAlgebra
from wallforge.linalg import RationalMatrix


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _run_json(capsys, argv):
    code, out, err = _run(capsys, argv)
    assert code == 0, err
    return json.loads(out)


def _sl2_file(tmp_path):
    path = tmp_path / "sl2.json"
    path.write_text(json.dumps(LieAlgebra.sl2().to_json()))
    return str(path)


def _bad_lie_file(tmp_path):
    bad = {"dim": 3, "brackets": [[0, 1, [[2, "1"]]], [0, 2, [[0, "1"]]]]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    return str(path)


class TestParsing:
    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()

    def test_no_subcommand_is_a_usage_error(self, capsys):
        code, _, _ = _run(capsys, [])
        assert code == 1

    def test_unknown_subcommand(self, capsys):
        code, _, err = _run(capsys, ["frobnicate"])
        assert code == 1

    def test_missing_required_flag(self, capsys):
        code, _, err = _run(capsys, ["radius", "--p", "3"])
        assert code == 1
        assert "usage error" in err

    def test_merge_negative_values(self):
        assert _merge_negative_values(["radius", "--r", "-1/4"]) == ["radius", "--r=-1/4"]
        assert _merge_negative_values(["--radius", "-1/3", "x"]) == ["--radius=-1/3", "x"]
        # non-numeric and flag-like strings pass through untouched
        assert _merge_negative_values(["--r", "--p"]) == ["--r", "--p"]
        assert _merge_negative_values(["--r"]) == ["--r"]
        assert _merge_negative_values(["--copies", "-1"]) == ["--copies", "-1"]


class TestRadius:
    def test_documented_example(self, capsys):
        dump = _run_json(capsys, ["radius", "--p", "3", "--r", "-1/4", "--e", "1", "--q", "3"])
        assert dump["h"] == 1
        assert dump["ell"] == 1
        assert dump["in_sR"] is True
        assert dump["m"] == 1

    def test_out_flag_writes_the_same_dump(self, capsys, tmp_path):
        argv = ["radius", "--p", "3", "--r", "-1/4", "--e", "1", "--q", "3"]
        dump = _run_json(capsys, argv)
        out = tmp_path / "radius.json"
        code, stdout, _ = _run(capsys, argv + ["--out", str(out)])
        assert code == 0
        assert stdout == ""
        assert json.loads(out.read_text()) == dump

    def test_residue_cardinality_defaults_to_p(self, capsys):
        dump = _run_json(capsys, ["radius", "--p", "2", "--r", "-1/2"])
        assert dump["inputs"]["q"] == 2

    def test_composite_p_rejected(self, capsys):
        code, _, err = _run(capsys, ["radius", "--p", "4", "--r", "-1/2"])
        assert code == 1
        assert "invalid input" in err

    def test_positive_exponent_rejected(self, capsys):
        code, _, _ = _run(capsys, ["radius", "--p", "3", "--r", "1/4"])
        assert code == 1


class TestCeHomology:
    def test_sl2_betti(self, capsys, tmp_path):
        dump = _run_json(capsys, ["ce-homology", "--lie", _sl2_file(tmp_path)])
        assert dump["betti"] == [1, 0, 0, 1]
        assert dump["certificates"]["d_squared"] == "zero"

    def test_two_dimensional_trivial_module_doubles_betti(self, capsys, tmp_path):
        lie = tmp_path / "heis.json"
        lie.write_text(json.dumps(LieAlgebra.heisenberg().to_json()))
        zeros = RationalMatrix.zeros(2, 2).to_json()
        mod = tmp_path / "mod.json"
        mod.write_text(json.dumps({"actions": [zeros, zeros, zeros]}))
        dump = _run_json(
            capsys, ["ce-homology", "--lie", str(lie), "--module", str(mod)]
        )
        assert dump["betti"] == [2, 4, 4, 2]

    def test_jacobi_violation_rejected(self, capsys, tmp_path):
        code, _, err = _run(capsys, ["ce-homology", "--lie", _bad_lie_file(tmp_path)])
        assert code == 1
        assert "rejected" in err

    def test_incompatible_module_rejected(self, capsys, tmp_path):
        lie = tmp_path / "heis.json"
        lie.write_text(json.dumps(LieAlgebra.heisenberg().to_json()))
        mod = tmp_path / "mod.json"
        mod.write_text(
            json.dumps(
                {
                    "actions": [
                        RationalMatrix([[0, 1], [0, 0]]).to_json(),
                        RationalMatrix([[0, 0], [1, 0]]).to_json(),
                        RationalMatrix.zeros(2, 2).to_json(),
                    ]
                }
            )
        )
        code, _, _ = _run(capsys, ["ce-homology", "--lie", str(lie), "--module", str(mod)])
        assert code == 1

    def test_missing_file(self, capsys):
        code, _, err = _run(capsys, ["ce-homology", "--lie", "/nonexistent.json"])
        assert code == 1
        assert "cannot read" in err


class TestWallDemo:
    def test_cyclic_demo_certifies(self, capsys):
        dump = _run_json(capsys, ["wall-demo", "--group", "Z2", "--degrees", "3"])
        assert dump["certificates"]["delta_squared"] == "zero"
        assert dump["certificates"]["induction_identities"] == "verified"
        section = dump["truncated"]
        assert section["certificates"]["betti_match"] is True
        assert section["certificates"]["betti_total"] == section["certificates"]["betti_base"]

    def test_symmetric_group_demo(self, capsys):
        dump = _run_json(capsys, ["wall-demo", "--group", "S3", "--degrees", "2"])
        assert dump["group_order"] == 6
        assert dump["truncated"]["certificates"]["betti_match"] is True

    def test_trivial_group_rejected(self, capsys):
        code, _, _ = _run(capsys, ["wall-demo", "--group", "Z1", "--degrees", "2"])
        assert code == 1

    def test_unknown_group(self, capsys):
        code, _, err = _run(capsys, ["wall-demo", "--group", "K4", "--degrees", "2"])
        assert code == 1
        assert "unknown group" in err


def _wall_job_file(tmp_path, **overrides):
    A = AlgebraPresentation.exterior_algebra(1)
    regular = {
        "actions": [
            RationalMatrix.identity(2).to_json(),
            RationalMatrix([[0, 0], [1, 0]]).to_json(),
        ]
    }
    trivial = {
        "actions": [
            RationalMatrix.identity(1).to_json(),
            RationalMatrix.zeros(1, 1).to_json(),
        ]
    }
    job = {
        "algebra": A.to_json(),
        "modules": [regular, trivial],
        "maps": [RationalMatrix([[0], [1]]).to_json()],
        "lengths": [3, 2],
        "truncate": 1,
    }
    job.update(overrides)
    path = tmp_path / "job.json"
    path.write_text(json.dumps(job))
    return str(path)


class TestWallBuild:
    def test_two_column_job(self, capsys, tmp_path):
        dump = _run_json(capsys, ["wall-build", "--input", _wall_job_file(tmp_path)])
        assert dump["certificates"]["delta_squared"] == "zero"
        assert dump["truncated"]["certificates"]["betti_match"] is True

    def test_wrong_map_count(self, capsys, tmp_path):
        path = _wall_job_file(tmp_path, maps=[])
        code, _, err = _run(capsys, ["wall-build", "--input", path])
        assert code == 1
        assert "maps" in err

    def test_bad_schema_tag(self, capsys, tmp_path):
        path = _wall_job_file(tmp_path, schema="other/9")
        code, _, _ = _run(capsys, ["wall-build", "--input", path])
        assert code == 1

    def test_lengths_must_match_columns(self, capsys, tmp_path):
        path = _wall_job_file(tmp_path, lengths=[3])
        code, _, _ = _run(capsys, ["wall-build", "--input", path])
        assert code == 1


class TestTreeSS:
    def test_ball_complex(self, capsys):
        dump = _run_json(capsys, ["tree-ss", "--p", "2", "--radius", "1"])
        assert dump["certificates"]["homology"] == [1, 0]
        assert dump["certificates"]["vertex_count"] == 4
        assert dump["certificates"]["augmentation_square"] == "zero"

    def test_fiber_dimension_scales_h0(self, capsys):
        dump = _run_json(capsys, ["tree-ss", "--p", "3", "--radius", "1", "--fiber-dim", "2"])
        assert dump["certificates"]["homology"] == [2, 0]

    def test_composite_p_rejected(self, capsys):
        code, _, _ = _run(capsys, ["tree-ss", "--p", "6", "--radius", "1"])
        assert code == 1

    def test_negative_radius_rejected(self, capsys):
        code, _, _ = _run(capsys, ["tree-ss", "--p", "2", "--radius", "-1"])
        assert code == 1


class TestPushoutCheck:
    def test_convex_gluing(self, capsys):
        dump = _run_json(
            capsys,
            ["pushout-check", "--p", "2", "--radius", "2", "--shared-radius", "1", "--copies", "3"],
        )
        assert dump["certificates"]["verdict"] == "contractible"
        assert dump["certificates"]["reduced_homology"] == [0, 0]

    def test_non_convex_control(self, capsys):
        dump = _run_json(capsys, ["pushout-check", "--p", "2", "--radius", "1", "--non-convex"])
        assert dump["certificates"]["verdict"] == "cycle-detected"
        assert dump["certificates"]["homology"][1] >= 1

    def test_shared_ball_must_fit(self, capsys):
        code, _, _ = _run(
            capsys, ["pushout-check", "--p", "2", "--radius", "1", "--shared-radius", "2"]
        )
        assert code == 1

    def test_copies_must_be_positive(self, capsys):
        code, _, _ = _run(
            capsys, ["pushout-check", "--p", "2", "--radius", "1", "--copies", "0"]
        )
        assert code == 1


class TestCosimplicialCheck:
    def test_both_rows_certify(self, capsys):
        for q in ("0", "1"):
            dump = _run_json(
                capsys,
                ["cosimplicial-check", "--p", "2", "--radius", "1", "--q", q, "--j-max", "2"],
            )
            assert dump["certificates"]["alternation"] == "verified"
            coh = dump["certificates"]["cohomology"]
            assert coh[0] == dump["certificates"]["degree_zero"]
            assert all(h == 0 for h in coh[1:])

    def test_q_is_restricted(self, capsys):
        code, _, _ = _run(capsys, ["cosimplicial-check", "--p", "2", "--radius", "1", "--q", "2"])
        assert code == 1


class TestBchVerify:
    def test_builtin_pairs(self, capsys):
        dump = _run_json(capsys, ["bch-verify", "--p", "2", "--n-max", "4", "--size", "4"])
        assert dump["kappa"] == 2
        assert dump["certificates"]["valuation_bounds"] == "hold"
        assert len(dump["results"]) == 2
        for result in dump["results"]:
            for row in result["components"]:
                mv = row["min_valuation"]
                assert mv is None or Fraction(mv) >= Fraction(row["bound"])

    def test_custom_pairs_file(self, capsys, tmp_path):
        x = RationalMatrix([[0, 4, 0], [0, 0, 4], [0, 0, 0]])
        y = RationalMatrix([[0, 0, 8], [0, 0, 0], [0, 0, 0]])
        path = tmp_path / "pairs.json"
        path.write_text(json.dumps({"pairs": [{"name": "t", "x": x.to_json(), "y": y.to_json()}]}))
        dump = _run_json(
            capsys, ["bch-verify", "--p", "2", "--n-max", "3", "--input", str(path)]
        )
        assert dump["results"][0]["name"] == "t"

    def test_rejects_non_powerful_pair(self, capsys, tmp_path):
        x = RationalMatrix([[0, 1], [0, 0]])
        path = tmp_path / "pairs.json"
        path.write_text(json.dumps({"pairs": [{"x": x.to_json(), "y": x.to_json()}]}))
        code, _, err = _run(capsys, ["bch-verify", "--p", "2", "--input", str(path)])
        assert code == 1
        assert "valuation" in err


class TestGroupLaw:
    def test_default_lattice(self, capsys):
        dump = _run_json(capsys, ["group-law", "--p", "2", "--N", "3"])
        assert dump["certificates"] == {"valuations": "bounded", "associativity": "holds"}
        assert dump["report"]["associativity_ok"] is True

    def test_custom_abelian_lattice(self, capsys, tmp_path):
        path = tmp_path / "ab.json"
        path.write_text(json.dumps(LieAlgebra.abelian(2).to_json()))
        dump = _run_json(capsys, ["group-law", "--p", "3", "--N", "2", "--lie", str(path)])
        assert dump["report"]["valuation_ok"] is True

    def test_non_powerful_lattice_rejected(self, capsys, tmp_path):
        path = tmp_path / "heis.json"
        path.write_text(json.dumps(LieAlgebra.heisenberg().to_json()))
        code, _, _ = _run(capsys, ["group-law", "--p", "2", "--lie", str(path)])
        assert code == 1


class TestNorms:
    ARGS = [
        "norms", "--p", "2", "--seed", "9", "--pairs", "3",
        "--nu-count", "2", "--degree", "3", "--expansion-degree", "3",
    ]

    def test_seeded_run(self, capsys):
        dump = _run_json(capsys, self.ARGS)
        assert dump["certificates"]["pair_count"] == 3
        assert dump["certificates"]["expansion_count"] == 2
        assert all(row["within_bound"] for row in dump["expansions"])

    def test_runs_are_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(self.ARGS + ["--out", str(a)]) == 0
        assert main(self.ARGS + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_radius_must_be_below_one(self, capsys):
        code, _, _ = _run(capsys, ["norms", "--p", "2", "--radius", "1/3"])
        assert code == 1


class TestExtCrossed:
    def test_rank_one_flip_action(self, capsys):
        dump = _run_json(capsys, ["ext-crossed", "--rank", "1", "--group", "Z2"])
        by_label = {rep["module"]: rep for rep in dump["reports"]}
        assert by_label["trivial"]["crossed_ext_dims"] == [1, 0, 1, 0, 1]
        assert by_label["determinant"]["crossed_ext_dims"] == [0, 1, 0, 1, 0]
        assert by_label["nilpotent"]["crossed_ext_dims"] == [1, 0, 0, 0, 0]
        for rep in dump["reports"]:
            assert rep["ok"] is True
            assert rep["crossed_ext_dims"] == rep["invariant_dims"]

    def test_module_filter(self, capsys):
        dump = _run_json(
            capsys,
            ["ext-crossed", "--rank", "1", "--group", "Z4", "--n-max", "2", "--modules", "trivial"],
        )
        assert [rep["module"] for rep in dump["reports"]] == ["trivial"]
        assert dump["reports"][0]["crossed_ext_dims"] == [1, 0, 1]

    def test_unconfigured_group_rejected(self, capsys):
        code, _, err = _run(capsys, ["ext-crossed", "--rank", "2", "--group", "Q8"])
        assert code == 1
        assert "no configured action" in err

    def test_unknown_module_label(self, capsys):
        code, _, _ = _run(
            capsys, ["ext-crossed", "--rank", "1", "--group", "Z2", "--modules", "bogus"]
        )
        assert code == 1


def _make_dumps(tmp_path, capsys):
    jobs = {
        "radius": ["radius", "--p", "3", "--r", "-1/4", "--e", "1", "--q", "3"],
        "tree": ["tree-ss", "--p", "2", "--radius", "1"],
        "demo": ["wall-demo", "--group", "Z2", "--degrees", "2"],
        "norms": ["norms", "--p", "2", "--seed", "4", "--pairs", "2", "--nu-count", "1"],
    }
    paths = {}
    for name, argv in jobs.items():
        out = tmp_path / f"{name}.json"
        assert main(argv + ["--out", str(out)]) == 0
        paths[name] = out
    capsys.readouterr()
    return paths


class TestVerifyReplay:
    def test_clean_dumps_pass(self, capsys, tmp_path):
        paths = _make_dumps(tmp_path, capsys)
        code, out, _ = _run(capsys, ["verify-replay"] + [str(p) for p in paths.values()])
        assert code == 0
        assert out.count("ok ") == len(paths)

    def test_direct_call_matches_subcommand(self, capsys, tmp_path):
        paths = _make_dumps(tmp_path, capsys)
        assert verify_replay([str(paths["radius"])]) == 0
        capsys.readouterr()

    def test_tampered_certificate_fails(self, capsys, tmp_path):
        paths = _make_dumps(tmp_path, capsys)
        data = json.loads(paths["tree"].read_text())
        data["certificates"]["homology"] = [1, 1]
        paths["tree"].write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
        code, out, _ = _run(capsys, ["verify-replay", str(paths["tree"])])
        assert code == 2
        assert "FAIL" in out

    def test_tampered_matrix_entry_fails(self, capsys, tmp_path):
        paths = _make_dumps(tmp_path, capsys)
        text = paths["demo"].read_text()
        data = json.loads(text)
        # flip one structural matrix entry inside the stored assembly
        entries = next(
            diff["entries"]
            for col in data["assembly"]["columns"]
            for diff in col["diffs"]
            if diff["entries"]
        )
        entries[0][2] = str(Fraction(entries[0][2]) + 1)
        paths["demo"].write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
        code, out, _ = _run(capsys, ["verify-replay", str(paths["demo"])])
        assert code == 2
        assert "FAIL" in out

    def test_tampered_scalar_fails_via_recompute(self, capsys, tmp_path):
        paths = _make_dumps(tmp_path, capsys)
        data = json.loads(paths["radius"].read_text())
        data["m"] = data["m"] + 1
        paths["radius"].write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
        code, out, _ = _run(capsys, ["verify-replay", str(paths["radius"])])
        assert code == 2

    def test_empty_and_junk_dumps_are_invalid(self, capsys, tmp_path):
        empty = tmp_path / "empty.json"
        empty.write_text("{}")
        junk = tmp_path / "junk.json"
        junk.write_text("not json at all")
        missing = tmp_path / "missing.json"
        for path in (empty, junk, missing):
            code, out, _ = _run(capsys, ["verify-replay", str(path)])
            assert code == 1
            assert "INVALID" in out

    def test_mixed_batch_reports_every_file(self, capsys, tmp_path):
        paths = _make_dumps(tmp_path, capsys)
        bad = tmp_path / "bad.json"
        data = json.loads(paths["tree"].read_text())
        data["certificates"]["homology"] = [2, 0]
        bad.write_text(json.dumps(data))
        empty = tmp_path / "empty.json"
        empty.write_text("{}")
        code, out, _ = _run(
            capsys, ["verify-replay", str(paths["radius"]), str(bad), str(empty)]
        )
        assert code == 2
        assert "ok " in out and "FAIL" in out and "INVALID" in out

    def test_threaded_replay_keeps_order_and_verdict(self, capsys, tmp_path, monkeypatch):
        paths = _make_dumps(tmp_path, capsys)
        argv = ["verify-replay"] + [str(p) for p in paths.values()]
        code_serial, out_serial, _ = _run(capsys, argv)
        monkeypatch.setenv("WALLFORGE_THREADS", "3")
        code_pool, out_pool, _ = _run(capsys, argv)
        assert (code_serial, out_serial) == (code_pool, out_pool) == (0, out_serial)


class TestDeterminism:
    CASES = [
        ["radius", "--p", "3", "--r", "-1/4"],
        ["tree-ss", "--p", "2", "--radius", "2"],
        ["wall-demo", "--group", "Z3", "--degrees", "2"],
        ["ext-crossed", "--rank", "1", "--group", "Z2", "--n-max", "2", "--modules", "trivial"],
    ]

    def test_reruns_are_byte_identical(self, capsys, tmp_path):
        for i, argv in enumerate(self.CASES):
            a = tmp_path / f"{i}a.json"
            b = tmp_path / f"{i}b.json"
            assert main(argv + ["--out", str(a)]) == 0
            assert main(argv + ["--out", str(b)]) == 0
            assert a.read_bytes() == b.read_bytes(), argv
        capsys.readouterr()

    def test_stdout_matches_file_output(self, capsys, tmp_path):
        argv = ["radius", "--p", "2", "--r", "-1/2"]
        code, out, _ = _run(capsys, argv)
        assert code == 0
        path = tmp_path / "dump.json"
        assert main(argv + ["--out", str(path)]) == 0
        capsys.readouterr()
        assert path.read_text() == out


def test_console_script_is_installed():
    exe = shutil.which("wallforge")
    assert exe, "console script not found on PATH"
    proc = subprocess.run(
        [exe, "radius", "--p", "3", "--r", "-1/4", "--e", "1", "--q", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["h"] == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wallforge.cli", "tree-ss", "--p", "2", "--radius", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kind"] == "tree-ss"
