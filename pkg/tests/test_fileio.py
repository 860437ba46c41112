"""Round trips and error reporting for the code and arc file formats."""

import numpy as np
import pytest

from addmds import catalog, fileio
from addmds import linalg as la
from addmds.codes import AdditiveCode
from addmds.gf import make_field, make_tower


@pytest.mark.parametrize("name", sorted(catalog.CATALOG))
def test_code_round_trip(name):
    code = catalog.get(name).code()
    text = fileio.code_to_text(code)
    back = fileio.code_from_text(text)
    assert back == code
    assert fileio.code_to_text(back) == text


def test_explicit_default_polynomials_share_the_tower():
    # a parsed file always states its polynomials; the tower cache must not
    # distinguish them from the defaults, or parsed codes compare unequal
    assert make_tower(3, 1, 2, qpoly=(0, 1), top_poly=(2, 2, 1)) is make_tower(3, 1, 2)


def test_dual_twice_serializes_byte_identically():
    code = catalog.get("nonlinear-8-over-9").code()
    twice = code.dual().dual()
    canon = fileio.code_to_text(AdditiveCode(code.tower, code.canonical_generator()))
    canon2 = fileio.code_to_text(AdditiveCode(twice.tower, twice.canonical_generator()))
    assert canon == canon2


def test_arc_round_trip():
    uni = la.subspace_universe(make_field(3, 1), 4, 2)
    text = fileio.arc_to_text(uni, (19, 0, 10))
    u2, ids = fileio.arc_from_text(text)
    assert u2 is uni
    assert ids == (0, 10, 19)
    assert fileio.arc_to_text(u2, ids) == text


def test_arc_rejects_out_of_range_ids():
    uni = la.subspace_universe(make_field(3, 1), 4, 2)
    text = fileio.arc_to_text(uni, (0, uni.count - 1))
    with pytest.raises(fileio.FileFormatError):
        fileio.arc_from_text(text.replace(str(uni.count - 1), str(uni.count)))


@pytest.mark.parametrize("mangle,expect_line", [
    (lambda t: "addmds-code v2\n" + t.partition("\n")[2], 1),
    (lambda t: t.replace("p 3", "p 4"), 2),
    (lambda t: t.replace("top-poly 2 2 1", "top-poly 1 1"), 2),
    (lambda t: t.replace("q-degree 1", "h 1"), 3),
    (lambda t: t[:-3] + "x\n", 13),
])
def test_parse_errors_carry_line_numbers(mangle, expect_line):
    text = fileio.code_to_text(catalog.get("nonlinear-8-over-9").code())
    with pytest.raises(fileio.FileFormatError) as err:
        fileio.code_from_text(mangle(text))
    assert err.value.line == expect_line


def test_entry_out_of_field_range_is_a_format_error():
    text = fileio.code_to_text(catalog.get("nonlinear-8-over-9").code())
    with pytest.raises(fileio.FileFormatError, match="out of range"):
        fileio.code_from_text(text.replace("\n1 0 0 1 1 1 1 1\n",
                                           "\n1 0 0 1 1 1 1 9\n"))


def test_save_and_load_files(tmp_path):
    code = catalog.get("nonlinear-6-over-8").code()
    p = tmp_path / "c.code"
    fileio.save_code(str(p), code)
    assert fileio.load_code(str(p)) == code
    uni, ids = code.to_arc()
    a = tmp_path / "c.arc"
    fileio.save_arc(str(a), uni, ids)
    u2, back = fileio.load_arc(str(a))
    assert u2 is uni and back == tuple(sorted(ids))
