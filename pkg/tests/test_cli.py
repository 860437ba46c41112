"""Command-line surface: outputs, exit codes, and file round trips."""

import pytest

from addmds import catalog, cli, fileio


@pytest.fixture(scope="module")
def code_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("codes")
    paths = {}
    for name in sorted(catalog.CATALOG):
        p = d / f"{name}.code"
        fileio.save_code(str(p), catalog.get(name).code())
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_verify_reports_and_certifies_mds(code_files, capsys):
    rc, out, _ = run(capsys, "verify", "--porcelain",
                     code_files["nonlinear-8-over-9"])
    assert rc == cli.EXIT_OK
    got = dict(line.split(None, 1) for line in out.splitlines())
    assert got == {"n": "8", "k": "3", "q": "3", "h": "2", "d": "6",
                   "mds": "yes", "bush": "11", "linear-over-top": "no"}


def test_verify_human_mode_mentions_the_parameters(code_files, capsys):
    rc, out, _ = run(capsys, "verify", code_files["nonlinear-11-over-16"])
    assert rc == cli.EXIT_OK
    assert "(11, 4^6, 9)" in out and "MDS" in out


def test_verify_fails_on_non_mds(tmp_path, capsys):
    # repeat a column: two equal blocks can never be an arc
    code = catalog.get("nonlinear-8-over-9").code()
    from addmds.codes import AdditiveCode
    bent = AdditiveCode(code.tower, code.G[:, [0, 0, 1, 2]])
    p = tmp_path / "bent.code"
    fileio.save_code(str(p), bent)
    rc, out, _ = run(capsys, "verify", "--porcelain", str(p))
    assert rc == cli.EXIT_PROPERTY
    assert "mds no" in out.splitlines()


def test_dual_output_parses_and_involutes(code_files, tmp_path, capsys):
    rc, out, _ = run(capsys, "dual", code_files["nonlinear-8-over-9"])
    assert rc == cli.EXIT_OK
    dual = fileio.code_from_text(out)
    assert (dual.n, dual.k) == (8, 5)
    p = tmp_path / "dual.code"
    fileio.save_code(str(p), dual)
    rc, out2, _ = run(capsys, "dual", str(p))
    assert rc == cli.EXIT_OK
    assert fileio.code_from_text(out2) == catalog.get("nonlinear-8-over-9").code()


def test_project_drops_a_block(code_files, capsys):
    rc, out, _ = run(capsys, "project", "--at", "7",
                     code_files["nonlinear-8-over-9"])
    assert rc == cli.EXIT_OK
    proj = fileio.code_from_text(out)
    assert (proj.n, proj.k) == (7, 2)
    assert proj.is_mds()


def test_truncate_then_verify(code_files, tmp_path, capsys):
    rc, out, _ = run(capsys, "truncate", "--drop", "7",
                     code_files["nonlinear-8-over-9"],
                     "-o", str(tmp_path / "t.code"))
    assert rc == cli.EXIT_OK and out == ""
    rc, out, _ = run(capsys, "verify", "--porcelain", str(tmp_path / "t.code"))
    assert rc == cli.EXIT_OK
    assert "d 5" in out.splitlines()


def test_quantum_check_passes_only_the_nine_code(code_files, capsys):
    rc, out, _ = run(capsys, "quantum-check", code_files["nonlinear-8-over-9"])
    assert rc == cli.EXIT_OK
    assert "[[8, 2, 4]]_3" in out
    rc, out, _ = run(capsys, "quantum-check", "--porcelain",
                     code_files["nonlinear-11-over-16"])
    assert rc == cli.EXIT_PROPERTY
    assert "self-orthogonal no" in out
    rc, _, err = run(capsys, "quantum-check", code_files["nonlinear-6-over-8"])
    assert rc == cli.EXIT_PROPERTY
    assert "degree-2" in err


def test_is_linear_verdicts(code_files, capsys):
    for name in sorted(catalog.CATALOG):
        rc, out, _ = run(capsys, "is-linear", "--porcelain", code_files[name])
        assert rc == cli.EXIT_PROPERTY
        assert "desarguesian no" in out


def test_is_linear_accepts_a_linear_code(tmp_path, capsys):
    code = catalog.get("nonlinear-8-over-9").code()
    lin = code.project(7).project(6)  # down to k = 1: a repetition-like code
    p = tmp_path / "lin.code"
    fileio.save_code(str(p), lin)
    rc, out, _ = run(capsys, "is-linear", "--porcelain", str(p))
    assert rc == cli.EXIT_OK
    assert "linear-over-top yes" in out


def test_parse_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.code"
    bad.write_text("not a code file\n")
    rc, _, err = run(capsys, "verify", str(bad))
    assert rc == cli.EXIT_PARSE and "format tag" in err
    rc, _, err = run(capsys, "verify", str(tmp_path / "missing.code"))
    assert rc == cli.EXIT_PARSE
    rc, _, err = run(capsys, "classify", "--space", "3,6", "--dim", "1")
    assert rc == cli.EXIT_PARSE and "prime power" in err


def test_classify_porcelain_and_resume(tmp_path, capsys):
    db = str(tmp_path / "db.jsonl")
    rc, out, _ = run(capsys, "classify", "--space", "3,3", "--dim", "1",
                     "--max-size", "5", "--db", db, "--porcelain")
    assert rc == cli.EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("header p 3 m 1 n_vec 4 r 2 group_order ")
    assert "size 4 classes 3 desarguesian 2" in lines
    assert "size 5 classes 4 desarguesian 2" in lines
    # refuses to overwrite without --resume
    rc, _, err = run(capsys, "classify", "--space", "3,3", "--dim", "1",
                     "--max-size", "5", "--db", db)
    assert rc == cli.EXIT_PARSE and "resume" in err
    # resume extends the same file
    rc, out, _ = run(capsys, "classify", "--space", "3,3", "--dim", "1",
                     "--max-size", "7", "--db", db, "--resume", "--porcelain")
    assert rc == cli.EXIT_OK
    assert "size 7 classes 4 desarguesian 1" in out.splitlines()


def test_classify_points_table(capsys):
    rc, out, _ = run(capsys, "classify", "--space", "1,9", "--dim", "0",
                     "--max-size", "10", "--porcelain")
    assert rc == cli.EXIT_OK
    assert "size 6 classes 2 desarguesian 2" in out.splitlines()
    assert "size 10 classes 1 desarguesian 1" in out.splitlines()


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["classify", "--dim", "1"])
    capsys.readouterr()
    assert exc.value.code == cli.EXIT_PARSE
