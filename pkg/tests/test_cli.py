from __future__ import annotations

import pytest

from regaff.cli import main
from regaff.construct import hegedus_agl32
from regaff.errors import FormatError
from regaff.field import make_field
from regaff.formats import parse_group, read_group, write_group
from regaff.verify import full_suite, verify_elements


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_f2_n3(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "--p", 2, "--ell", 1, "--n", 3, "--W-none")
    assert code == 0
    assert "order: 8" in out and "|R meet Tr|: 1" in out


def test_construct_gf4_n6(capsys):
    code, out, _ = run(capsys, "construct", "--p", 2, "--ell", 2, "--n", 6, "--W-none")
    assert code == 0
    assert "order: 4096" in out and "|R meet Tr|: 1" in out and "example3" in out


def test_construct_inadmissible(capsys):
    code, _, err = run(capsys, "construct", "--p", 3, "--ell", 1, "--n", 2)
    assert code == 2
    assert "n = 2 <= 2" in err and "nontrivial translation" in err


def test_construct_with_w(capsys):
    code, out, _ = run(capsys, "construct", "--p", 2, "--ell", 3, "--n", 5, "--W", "1.0.0,0.1.0")
    assert code == 0 and "|R meet Tr|: 4" in out


def test_round_trip_f3_n4(capsys, tmp_path):
    path = tmp_path / "g.txt"
    assert run(capsys, "construct", "--p", 3, "--n", 4, "--out", path)[0] == 0
    gf = read_group(path)
    assert len(gf.elems) == 81 and gf.desc is not None
    mem = full_suite(gf.desc)
    disk = verify_elements(gf.elems, gf.field, gf.n, desc=gf.desc)
    assert mem.ok == disk.ok and mem.order == disk.order and mem.translations == disk.translations
    code, out, _ = run(capsys, "verify", "--in", path)
    assert code == 0 and out.rstrip().endswith("verdict: PASS")


def test_verify_corrupted_entry(capsys, tmp_path):
    path = tmp_path / "g.txt"
    run(capsys, "construct", "--p", 3, "--n", 4, "--out", path)
    lines = path.read_text().splitlines()
    i = [k for k, line in enumerate(lines) if line.startswith("ELEM")][10]
    head, last = lines[i].rsplit(";", 1)
    entries = last.split(",")
    entries[1] = str((int(entries[1]) + 1) % 3)  # break a zero below the diagonal
    lines[i] = head + ";" + ",".join(entries)
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "verify", "--in", path)
    assert code == 1
    assert "FAIL" in out and "witness:" in out


def test_verify_hegedus_closure(capsys, tmp_path):
    path = tmp_path / "h.txt"
    write_group(path, make_field(2), 3, gens=hegedus_agl32())
    code, out, _ = run(capsys, "verify", "--in", path)
    assert code == 0 and "order: 8" in out and "translations found: 1" in out


def test_verify_desc_flags(capsys):
    code, out, _ = run(capsys, "verify", "--rational", "--n", 4, "--seed", 3)
    assert code == 0 and "sampled(seed=3" in out


def test_parse_errors_carry_line_numbers(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("REGAFF v1\nFIELD 3 1 0,1\nDIM 2\nELEM 1,0,0;0,1,0\n")
    code, _, err = run(capsys, "verify", "--in", path)
    assert code == 2 and "line 4" in err
    with pytest.raises(FormatError, match="line 1"):
        parse_group("REGAFF v2\n")
    with pytest.raises(FormatError, match="line 3"):
        parse_group("REGAFF v1\nFIELD 2 1 0,1\nBOGUS 1\n")
    with pytest.raises(FormatError, match="line 4"):
        parse_group("REGAFF v1\nFIELD 2 2 1,1,1\nDIM 1\nELEM 1,0;0,1.0\n")


def test_search_command(capsys, tmp_path):
    out_path = tmp_path / "w.txt"
    code, out, _ = run(capsys, "search", "--n", 3, "--p", 2, "--mode", "find_translation_free",
                       "--out", out_path)
    assert code == 0 and "4 translation-free" in out
    assert run(capsys, "verify", "--in", out_path)[0] == 0


def test_search_budget_exit_code(capsys, tmp_path):
    ck = tmp_path / "ck.txt"
    code, out, _ = run(capsys, "search", "--n", 4, "--p", 2, "--budget-nodes", 100, "--checkpoint", ck)
    assert code == 3 and "INCOMPLETE" in out and ck.exists()
    code, out, _ = run(capsys, "search", "--n", 4, "--p", 2, "--resume", ck)
    assert code == 0 and "complete" in out


def test_report_rows_stable(capsys):
    argv = ["report", "--max-n", 4, "--fields", "2,3", "--max-points", 27]
    code, first, _ = run(capsys, *argv)
    assert code == 0
    _, second, _ = run(capsys, *argv)
    rows = [line for line in first.splitlines() if line.startswith("ROW")]
    assert rows == [line for line in second.splitlines() if line.startswith("ROW")]
    verdicts = {(r.split("\t")[1], r.split("\t")[2]): r.split("\t")[3] for r in rows}
    assert verdicts[("3", "2")].startswith("EXISTS")
    assert verdicts[("3", "3")].startswith("NONE")
    assert verdicts[("4", "3")].startswith("EXISTS")
    assert verdicts[("4", "2")] == "NONE(exhaustive)"
    assert verdicts[("2", "2")].startswith("NONE") and verdicts[("2", "3")].startswith("NONE")


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--n", "3"])
    assert exc.value.code == 2
