"""Command-line behaviour: exit codes, outputs, determinism."""

from __future__ import annotations

import pytest

from lstaq.cli import bench_sources, main
from lstaq.parser import parse_many


def spec_file(tmp_path, text: str, name: str = "in.spec"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# ---------------------------------------------------------------------------
# Exit codes.
# ---------------------------------------------------------------------------


def test_translate_succeeds(tmp_path, capsys):
    f = spec_file(tmp_path, "{ (1/sqrt2)|0 0> + (1/sqrt2)|1 1> }")
    assert main(["translate", f]) == 0
    out = capsys.readouterr().out
    assert out.startswith("lsta v1")
    assert "qubits 2" in out


def test_syntax_errors_exit_1(tmp_path, capsys):
    f = spec_file(tmp_path, "{ |0> ")
    assert main(["translate", f]) == 1
    assert "error:" in capsys.readouterr().err


def test_well_formedness_errors_exit_2(tmp_path, capsys):
    f = spec_file(tmp_path, "{ sum[ i != j ] |i j> }")
    assert main(["translate", f]) == 2
    assert "error:" in capsys.readouterr().err


def test_alignment_errors_exit_3(tmp_path, capsys):
    f = spec_file(tmp_path, "{ |0> } ;; { |0> } (x) { |0> }")
    assert main(["translate", f]) == 3
    assert "error:" in capsys.readouterr().err


def test_resource_caps_exit_4(tmp_path, capsys):
    f = spec_file(tmp_path, "{ sum[ |i| = 3 ] |i> }")
    assert main(["oracle", f, "--cap", "2"]) == 4
    assert "error:" in capsys.readouterr().err


def test_malformed_theta_exits_1(tmp_path, capsys):
    f = spec_file(tmp_path, "{ a |0> + a |1> }")
    assert main(["translate", f, "--check-oracle", "--theta", "a=@@"]) == 1
    capsys.readouterr()


# ---------------------------------------------------------------------------
# Output determinism and file emission.
# ---------------------------------------------------------------------------


def test_translate_output_is_byte_deterministic(tmp_path, capsys):
    f = spec_file(tmp_path, "{ sum[ |i| = 2, i != 01 ] |i j> : |j| = 1 }"
                            " ;; { |1 1 0> }")
    assert main(["translate", f, "--order-report", "--stats"]) == 0
    first = capsys.readouterr().out
    assert main(["translate", f, "--order-report", "--stats"]) == 0
    second = capsys.readouterr().out
    strip = lambda s: "\n".join(  # noqa: E731 - wall-clock lines vary
        ln for ln in s.splitlines() if "seconds" not in ln)
    assert strip(first) == strip(second)


def test_translate_writes_one_automaton_per_assertion(tmp_path, capsys):
    f = spec_file(tmp_path, "{ |0> } ;; { |1> }", "pair.spec")
    out = tmp_path / "out"
    out.mkdir()
    assert main(["translate", f, "-o", str(out), "--stats"]) == 0
    capsys.readouterr()
    assert (out / "pair_0.lsta").exists()
    assert (out / "pair_1.lsta").exists()
    assert (out / "pair.perm").exists()
    assert (out / "pair.stats").exists()
    assert (out / "pair_0.lsta").read_text().startswith("lsta v1")


def test_debug_dumps_have_markers(tmp_path, capsys):
    f = spec_file(tmp_path, "{ sum[ |i| = 1, i != j ] |i j 0> : |j| = 1 }")
    assert main(["translate", f, "--dump-aligned", "--dump-slices",
                 "--order-report"]) == 0
    out = capsys.readouterr().out
    assert "segment 1" in out
    assert "new_to_old" in out
    assert "slice" in out


def test_constraint_rides_along_with_the_automaton(tmp_path, capsys):
    f = spec_file(tmp_path, "bigU[ re(a) = 0 ] { a |0> + a |1> }")
    assert main(["translate", f]) == 0
    assert "constraint" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# Oracle and differential subcommands.
# ---------------------------------------------------------------------------


def test_oracle_lists_members(tmp_path, capsys):
    f = spec_file(tmp_path, "{ |i 0> : |i| = 1 }")
    assert main(["oracle", f]) == 0
    out = capsys.readouterr().out
    assert "2 members" in out
    assert "|00>" in out and "|10>" in out


def test_check_oracle_passes_on_sound_translations(tmp_path, capsys):
    f = spec_file(tmp_path,
                  "bigU[ |a|^2 = 1/2 ] { a |0 0> + a |1 1> } ;; { |0 1> }")
    assert main(["translate", f, "--check-oracle"]) == 0
    out = capsys.readouterr().out
    assert "ok" in out


def test_check_oracle_accepts_explicit_valuations(tmp_path, capsys):
    f = spec_file(tmp_path, "{ a |0> - a |1> }")
    assert main(["translate", f, "--check-oracle",
                 "--theta", "a=i/sqrt2"]) == 0
    capsys.readouterr()


# ---------------------------------------------------------------------------
# Formatting and benchmarks.
# ---------------------------------------------------------------------------


def test_fmt_round_trips(tmp_path, capsys):
    src = ("{ |i 0 0> : |i| = 2 } (x) { |0> } \\/ { |1> } ^ 2 ;;"
           " bigU[ re(a) > 1/2 ] { a sum[ |j| = 1 ] |j j 0 0 1 ~j> }")
    f = spec_file(tmp_path, src)
    assert main(["fmt", f]) == 0
    pretty = capsys.readouterr().out
    assert parse_many(pretty) == parse_many(src)


def test_bench_smoke(capsys):
    assert main(["bench", "bv", "2,3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == ["n", "qubits", "pre", "post", "seconds"]
    assert len(out) == 3


def test_bench_families_all_generate_parseable_sources():
    for family in ("bv", "ghz", "grover", "groveriter", "mctoffoli"):
        for pre, post, _joint in bench_sources(family, 3):
            parse_many(pre)
            parse_many(post)


def test_bench_rejects_unknown_families(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bench", "nope", "2"])
    assert exc.value.code == 2
    assert "invalid choice" in capsys.readouterr().err
