import subprocess
import sys
from pathlib import Path

import pytest

from dioprefix.cli import elide, kind_family, run

DATA = Path(__file__).resolve().parent.parent / "data"
SQUARES = str(DATA / "squares.sexp")
NATURALS = str(DATA / "naturals.sexp")
LEMMA23 = str(DATA / "lemma23.sexp")


def cli(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


GOLDEN = [
    (["gadget", "pell", "--D", "61"], 0, "1766319049 226153980\n"),
    (["gadget", "three-squares", "--C", "7"], 0, "1 0 2\n"),
    (["gadget", "tung", "--C", "0"], 1, "none\n"),
    (["gadget", "tung", "--C", "10"], 0, "0 3\n"),
    (["gadget", "oh-sun", "--a", "9"], 0, "0 0 1\n"),
    (["gadget", "oh-sun", "--a", "7"], 1, "none\n"),
    (["jk", "--k", "1"], 0, "(+ (^ x 2) (* -1 x1))\n"),
    (
        ["jk", "--k", "2", "--eval", "4,9"],
        0,
        "poly: (+ (^ x 4) (* -172880 (^ x 2)) 7470490624)\n"
        "integer roots: -296 -292 292 296\n"
        "verdict: true\n",
    ),
    (
        ["jk", "--k", "2", "--eval", "4,8"],
        1,
        "poly: (+ (^ x 4) (* -104984 (^ x 2)) 2754570256)\ninteger roots: none\nverdict: false\n",
    ),
    (
        ["jk", "--k", "1", "--eval", "1", "--shift", "2,4"],
        0,
        "poly: (+ (* 4 (^ x 2)) (* 16 x) 12)\ninteger roots: -3 -1\nverdict: true\n",
    ),
    (
        ["jk", "--k", "1", "--eval", "1", "--shift", "2,3"],
        1,
        "poly: (+ (* 4 (^ x 2)) (* 12 x) 5)\ninteger roots: none\nverdict: false\n",
    ),
    (
        ["lemma21", "--b", "2", "--B", "3", "--n", "1,2", "--c", "12"],
        0,
        "interval 0: [4/1, 4/1]\ninterval 1: [7/9, 4/3]\ninterval 2: [-5/1332, 1/111]\n"
        "decode: 1 1\nverdict: true\n",
    ),
    (
        ["lemma21", "--b", "2", "--B", "3", "--n", "1,2", "--c", "6"],
        1,
        "interval 0: [2/1, 2/1]\ninterval 1: [1/9, 2/3]\ninterval 2: [-11/360, 1/60]\n"
        "decode: none\nverdict: false\n",
    ),
    (["lemma22", "--sigmas", "1/5", "--taus", "1/2"], 1, "system: [1/5, 1/2]\nW: 1\nverdict: false\n"),
    (["lemma22", "--sigmas", "1,0", "--taus", "2,0"], 0, "system: [1/1, 2/1] [0/1, 0/1]\nW: 3\nverdict: true\n"),
    (
        ["reduce", "build", "--p0", NATURALS],
        0,
        "P: (+ (^ a 2) (* -2 a z1) (^ z0 2) (^ z1 2) (* -2 z0) 1)\ndelta: 2\nnu: 1\nn_j: 1 3 9\n"
        "L: (+ (^ a 4) (* 6 (^ a 2)) 7)\nk0: 8\nk1: 1\nk2: 6\nn: 12\nfamily: sq2\n",
    ),
    (
        ["reduce", "scan", "--p0", SQUARES, "--a", "2", "--c-max", "50"],
        0,
        "b: 36102\naccepted c in [0, 50]: none\nall rejected: true\n",
    ),
]


@pytest.mark.parametrize("argv,code,expected", GOLDEN, ids=[" ".join(g[0][:3]) for g in GOLDEN])
def test_golden(capsys, argv, code, expected):
    got_code, out, err = cli(capsys, *argv)
    assert (got_code, out, err) == (code, expected, "")


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["gadget", "pell", "--D", "4"],
        ["gadget", "pell", "--D", "x"],
        ["gadget", "oh-sun", "--a", "-1"],
        ["jk", "--k", "0"],
        ["jk", "--k", "2", "--eval", "1"],
        ["jk", "--k", "1", "--eval", "1", "--shift", "0,1"],
        ["jk", "--k", "1", "--shift", "1,1"],
        ["lemma21", "--b", "3", "--B", "2", "--n", "1", "--c", "0"],
        ["lemma22", "--sigmas", "0,1", "--taus", "0"],
        ["lemma22", "--sigmas", "0", "--taus", "3"],
        ["lemma23", "--poly", LEMMA23, "--z", "2,1", "--B", "5"],
        ["lemma23", "--poly", "/nonexistent.sexp", "--z", "1"],
        ["reduce", "certify", "--p0", SQUARES, "--a", "4", "--z", "3"],
        ["reduce", "scan", "--p0", SQUARES, "--a", "2", "--c-max", "-1"],
        ["repr", "build", "--kind", "E9", "--p0", SQUARES],
        ["eval", "--formula", "/nonexistent.sexp"],
        ["--digits-cap", "0", "gadget", "pell", "--D", "2"],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = cli(capsys, *argv)
    assert code == 2
    assert err.strip()


def test_extraction_transcript(capsys):
    code, out, _ = cli(capsys, "lemma23", "--poly", LEMMA23, "--z", "2,1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "threshold: 192"
    assert lines[1] == "B: 193"
    assert lines[-1] == "P(z) = 0: true"
    code, _, _ = cli(capsys, "lemma23", "--poly", LEMMA23, "--z", "2,2")
    assert code == 1


def test_certify_and_digits_cap(capsys):
    code, out, _ = cli(capsys, "reduce", "certify", "--p0", SQUARES, "--a", "4", "--z", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[:2] == ["a 4", "b 276678"]
    assert lines[-1] == "certificate accepted: true"
    c_full = lines[2].split()[1]
    assert len(c_full) == 137 and c_full.isdigit()
    code, capped, _ = cli(capsys, "reduce", "certify", "--p0", SQUARES, "--a", "4", "--z", "2", "--digits-cap", "12")
    assert code == 0
    assert f"c {c_full[:6]}(...137 digits...){c_full[-6:]}" in capped.splitlines()


def test_elide():
    assert elide("x 1234567890 y", None) == "x 1234567890 y"
    assert elide("x 1234567890 y", 4) == "x 12(...10 digits...)90 y"
    assert elide("-1234567890", 4) == "-12(...10 digits...)90"
    assert elide("123", 4) == "123"


def test_eval_formula_file(capsys, tmp_path):
    f = tmp_path / "f.sexp"
    f.write_text("(exists x (= (- (^ x 2) 4) 0))\n")
    assert cli(capsys, "eval", "--formula", f, "--box", "x=-5..5")[:2] == (0, "verdict: true\n")
    assert cli(capsys, "eval", "--formula", f, "--box", "x=-1..1")[0] == 1
    assert cli(capsys, "eval", "--formula", f)[0] == 2
    g = tmp_path / "g.sexp"
    g.write_text("(exists (x 0 a) (= (- (^ x 2) a) 0))\n")
    assert cli(capsys, "eval", "--formula", g, "--free", "a=9")[0] == 0
    assert cli(capsys, "eval", "--formula", g, "--free", "a=8")[0] == 1
    code, _, err = cli(capsys, "eval", "--formula", g)
    assert code == 2 and "unbound" in err
    h = tmp_path / "h.sexp"
    h.write_text("(free (a) (>= a 0))\n")
    assert cli(capsys, "eval", "--formula", h, "--free", "a=1")[0] == 0
    code, _, err = cli(capsys, "eval", "--formula", h)
    assert code == 2 and "--free" in err


def test_repr_build_then_eval(capsys, tmp_path):
    out_file = tmp_path / "r.sexp"
    code, out, _ = cli(capsys, "repr", "build", "--kind", "E2A1E3", "--p0", SQUARES, "-o", out_file)
    assert code == 0 and out.startswith(f"wrote {out_file}")
    box = "b=0..0,c=0..0,t=0..0,x=-2..2,y=-2..2,z=-2..2"
    code, out, err = cli(capsys, "eval", "--formula", out_file, "--box", box, "--p0", SQUARES, "--free", "a=4")
    assert code in (0, 1) and out.startswith("verdict: ") and err == ""
    # the atoms need M, which only --p0 supplies
    assert cli(capsys, "eval", "--formula", out_file, "--box", box, "--free", "a=4")[0] == 2


def test_repr_stdout(capsys):
    code, out, _ = cli(capsys, "repr", "build", "--kind", "A2E4", "--p0", SQUARES)
    assert code == 0
    assert out.startswith("(free (a) (forall b (forall c (exists t")


def test_kind_family():
    assert kind_family("E2A1E3") == "sq2"
    assert kind_family("E1A1E4_bounded") == "4sq3"
    assert kind_family("E1A6E2") == "evensq4"


def test_suite_deterministic(capsys):
    code1, out1, _ = cli(capsys, "verify", "suite", "--name", "lemma52", "--seed", "3")
    code2, out2, _ = cli(capsys, "verify", "suite", "--name", "lemma52", "--seed", "3")
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.splitlines()[-1].startswith("SUMMARY suite=lemma52 seed=3 ")
    assert out1.splitlines()[-1].endswith("status=PASS")


def test_suite_digit_form_summary(capsys):
    code, out, _ = cli(capsys, "verify", "suite", "--name", "lemma21")
    assert code == 0
    assert any(line.startswith("grid ") and line.endswith("100% agree") for line in out.splitlines())


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dioprefix", "gadget", "pell", "--D", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "3 2\n"
