import subprocess
import sys

import numpy as np
import pytest

from recsd.cli import main
from recsd.generators import hadamard_n
from recsd.matrix_core import read_cmat, write_cmat
from recsd.seo import read_seo


@pytest.fixture
def h4(tmp_path):
    path = tmp_path / "h4.cmat"
    assert main(["gen", "hadamard", "--nbits", "4", "-o", str(path)]) == 0
    return path


def test_gen_hadamard_entries(tmp_path):
    path = tmp_path / "h2.cmat"
    main(["gen", "hadamard", "--nbits", "2", "-o", str(path)])
    assert np.allclose(np.abs(read_cmat(path)), 0.5)


def test_gen_dft_one_bit_is_h(tmp_path):
    path = tmp_path / "f1.cmat"
    main(["gen", "dft", "--nbits", "1", "-o", str(path)])
    assert np.allclose(read_cmat(path), hadamard_n(1))


def test_gen_random_is_deterministic(tmp_path):
    a, b = tmp_path / "a.cmat", tmp_path / "b.cmat"
    for p in (a, b):
        main(["gen", "random-unitary", "--nbits", "2", "--seed", "42", "-o", str(p)])
    assert a.read_text() == b.read_text()


def test_compile_verify_stats(h4, tmp_path, capsys):
    seo = tmp_path / "h4.seo"
    assert main(["compile", str(h4), "-o", str(seo), "--dump-tree"]) == 0
    out = capsys.readouterr().out
    assert "ops          8" in out
    assert "cnots        0" in out
    assert "kind=black" in out
    assert len(read_seo(seo)) == 8
    assert main(["verify", str(h4), str(seo)]) == 0
    assert main(["stats", str(seo)]) == 0
    assert "total=8" in capsys.readouterr().out


def test_compile_dft4(tmp_path, capsys):
    cm, seo = tmp_path / "f4.cmat", tmp_path / "f4.seo"
    main(["gen", "dft", "--nbits", "4", "-o", str(cm)])
    assert main(["compile", str(cm), "-o", str(seo), "--permute", "root"]) == 0
    out = capsys.readouterr().out
    assert "cnots        6" in out
    assert main(["verify", str(cm), str(seo)]) == 0


@pytest.mark.parametrize("flags", [["--direction", "uphill"], ["--permute", "none"], ["--no-peephole"],
                                   ["--permute", "all", "--permute-side", "either"], ["--tol", "1e-9"]])
def test_compile_flags(h4, tmp_path, flags):
    seo = tmp_path / "out.seo"
    assert main(["compile", str(h4), "-o", str(seo), *flags]) == 0
    assert main(["verify", str(h4), str(seo)]) == 0


def test_verify_empty_program_fails(h4, tmp_path, capsys):
    empty = tmp_path / "empty.seo"
    empty.write_text("NB 4\n")
    assert main(["verify", str(h4), str(empty)]) == 1
    err = float(capsys.readouterr().out.split()[1])
    assert err == pytest.approx(np.linalg.norm(hadamard_n(4) - np.eye(16)), rel=1e-3)


def test_identity(tmp_path, capsys):
    eye, empty = tmp_path / "i.cmat", tmp_path / "e.seo"
    write_cmat(np.eye(4), eye)
    empty.write_text("NB 2\n")
    assert main(["verify", str(eye), str(empty)]) == 0
    seo = tmp_path / "i.seo"
    main(["compile", str(eye), "-o", str(seo)])
    assert len(read_seo(seo)) == 0


def test_non_unitary_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.cmat"
    write_cmat(2 * np.eye(2), bad)
    assert main(["compile", str(bad)]) == 3
    assert "not unitary" in capsys.readouterr().err


def test_parse_failures_exit_3(tmp_path, h4):
    junk = tmp_path / "junk.cmat"
    junk.write_text("2 1 2 3\n")
    assert main(["compile", str(junk)]) == 3
    seo = tmp_path / "junk.seo"
    seo.write_text("NB 4\nROTY x 1\n")
    assert main(["verify", str(h4), str(seo)]) == 3
    assert main(["stats", str(tmp_path / "missing.seo")]) == 3


def test_dimension_mismatch_exits_3(tmp_path, h4):
    seo = tmp_path / "two.seo"
    seo.write_text("NB 2\n")
    assert main(["verify", str(h4), str(seo)]) == 3


@pytest.mark.parametrize("argv", [[], ["bogus"], ["gen", "nope", "--nbits", "2"], ["demo", "--nbits", "5"],
                                  ["compile", "x.cmat", "--permute", "some"], ["compile", "x.cmat", "--tol", "-1"]])
def test_usage_errors_exit_2(argv):
    assert main(argv) == 2


def test_demo(capsys):
    assert main(["demo", "--nbits", "4"]) == 0
    out = capsys.readouterr().out
    for n, total in zip(range(1, 5), (2, 4, 6, 8)):
        assert f"hadamard n={n} ops={total} cnots=0" in out
    assert "fourier n=1 ops=2 cnots=0" in out
    assert "downhill: D4 (A3+B3) D3^2 (A2+B2)^2 D2^4 (A1+B1)^4 D1^8 sz^8 R(3,2,1,0)" in out
    assert "uphill:   R(3,2,1,0) sz^8 DT1^8" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "recsd.cli", "demo", "--nbits", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "hadamard n=1" in proc.stdout
