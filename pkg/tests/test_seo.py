import io

import numpy as np
import pytest

from recsd.generators import embed, exchange, hadamard1, pauli
from recsd.seo import (
    SeoOp,
    SeoParseError,
    SeoProgram,
    apply_state,
    dumps,
    loads,
    op_matrix,
    read_seo,
    reconstruct,
    roty_matrix,
    stats,
    write_seo,
)


def test_op_validation():
    with pytest.raises(ValueError):
        SeoOp.cnot(1, 1)
    with pytest.raises(ValueError):
        SeoOp.pha(0.1, [2, 2])
    with pytest.raises(ValueError):
        SeoProgram(2, (SeoOp.roty(2, 0.1),))
    with pytest.raises(ValueError):
        SeoProgram(2, (SeoOp.mroty(0, [0.1, 0.2, 0.3]),))


def test_pha_bits_are_sorted_descending():
    op = SeoOp.pha(0.5, [0, 3, 1])
    assert op.bits == (3, 1, 0)
    assert op.target == 3


def test_dense_matrices_by_hand():
    assert np.allclose(op_matrix(SeoOp.roty(0, 0.2), 1), roty_matrix(0.2))
    assert np.allclose(op_matrix(SeoOp("HAD", 1), 2), embed(hadamard1(), 2, 1))
    assert np.allclose(op_matrix(SeoOp("SIGZ", 0), 2), embed(pauli("z"), 2, 0))
    assert np.allclose(op_matrix(SeoOp.exch(0, 2), 3), exchange(3, 0, 2))
    # CNOT control 0 target 1 maps |01> to |11>
    assert op_matrix(SeoOp.cnot(0, 1), 2)[3, 1] == 1
    assert np.allclose(np.diag(op_matrix(SeoOp.pha(np.pi, [0, 1]), 2)), [1, 1, 1, -1])
    assert np.allclose(op_matrix(SeoOp.gph(np.pi / 2), 1), 1j * np.eye(2))


def test_mroty_angle_order():
    # target bit 1 of 2: angle index is the value of bit 0
    m = op_matrix(SeoOp.mroty(1, [0.1, 0.7]), 2)
    assert m[0, 2] == pytest.approx(np.sin(0.1))
    assert m[1, 3] == pytest.approx(np.sin(0.7))


def test_exch_weighs_three_cnots():
    st = stats(SeoProgram(3, (SeoOp.exch(0, 2), SeoOp.cnot(0, 1))))
    assert st.cnots == 4
    assert st.total == 4


def test_mroty_weight_is_flagged():
    st = stats(SeoProgram(3, (SeoOp.mroty(0, [0.1, 0.2, 0.3, 0.4]),)))
    assert st.total == 4
    assert "MROTY weighted" in st.as_text()


def mixed_program():
    return SeoProgram(
        3,
        (
            SeoOp.roty(2, -0.3),
            SeoOp.mroty(1, [0.1, 0.2, 0.3, 0.4]),
            SeoOp.pha(1.25, [2, 0]),
            SeoOp.gph(0.5),
            SeoOp.cnot(2, 0),
            SeoOp("SIGX", 1),
            SeoOp("SIGZ", 0),
            SeoOp("HAD", 2),
            SeoOp.exch(0, 1),
        ),
        {"direction": "downhill"},
    )


def test_text_roundtrip():
    p = mixed_program()
    q = loads(dumps(p))
    assert q == p
    assert q.metadata == p.metadata
    buf = io.StringIO()
    write_seo(p, buf)
    assert read_seo(io.StringIO(buf.getvalue())) == p


def test_apply_state_matches_dense():
    p = mixed_program()
    psi = np.random.default_rng(0).standard_normal(8) + 0j
    assert np.allclose(apply_state(p, psi), reconstruct(p) @ psi)


def test_transpose_and_inverse():
    p = mixed_program()
    u = reconstruct(p)
    assert np.allclose(reconstruct(p.transposed()), u.T)
    assert np.allclose(reconstruct(p.inverse()), u.conj().T)


@pytest.mark.parametrize(
    "text",
    [
        "ROTY 0 0.1\n",
        "NB 2\nROTY 0\n",
        "NB 2\nFOO 1\n",
        "NB 2\nCNOT 0 XX 1\n",
        "NB 2\nPHA 0.1 0 1\n",
        "NB 2\nROTY 5 0.1\n",
        "NB 2\nROTY a 0.1\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(SeoParseError):
        loads(text)


def test_parse_error_reports_line():
    with pytest.raises(SeoParseError) as info:
        loads("NB 2\nROTY 0 0.1\nROTY 0 zz\n")
    assert info.value.lineno == 3
