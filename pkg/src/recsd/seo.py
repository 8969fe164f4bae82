"""Sequences of elementary operations (SEO programs).

The leftmost op in ``SeoProgram.ops`` is the leftmost matrix factor, so it
acts last on a ket.

Text form, one op per line (angles in radians)::

    NB 4
    ROTY 3 -7.85398163397448279e-1
    MROTY 1 <2**(nb-1) angles>
    PHA 3.14159265358979312e0 BITS 3 0
    GPH 1.57079632679489656e0
    CNOT 2 CTRL 0
    SIGX 1 | SIGZ 1 | HAD 1
    EXCH 0 3
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .generators import embed, exchange, hadamard1, pauli
from .matrix_core import format_real

KINDS = ("ROTY", "MROTY", "SIGX", "SIGZ", "HAD", "CNOT", "PHA", "GPH", "EXCH")
_ONE_QUBIT = ("SIGX", "SIGZ", "HAD")


class SeoParseError(ValueError):
    def __init__(self, lineno: int, token: str, msg: str):
        super().__init__(f"line {lineno}: {msg} (token {token!r})")
        self.lineno = lineno
        self.token = token


@dataclass(frozen=True)
class SeoOp:
    kind: str
    target: int | None = None
    controls: tuple[int, ...] = ()
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown op kind {self.kind!r}")
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind == "CNOT" and (len(self.controls) != 1 or self.controls[0] == self.target):
            raise ValueError("CNOT needs exactly one control distinct from the target")
        if len(set(self.bits)) != len(self.bits):
            raise ValueError(f"{self.kind} lists bit(s) more than once: {self.bits}")

    @property
    def bits(self) -> tuple[int, ...]:
        """Every bit the op touches (PHA bits are symmetric)."""
        head = () if self.target is None else (self.target,)
        return head + self.controls

    @classmethod
    def roty(cls, target: int, angle: float) -> "SeoOp":
        return cls("ROTY", target, (), (angle,))

    @classmethod
    def mroty(cls, target: int, angles) -> "SeoOp":
        return cls("MROTY", target, (), tuple(angles))

    @classmethod
    def pha(cls, angle: float, bits) -> "SeoOp":
        bits = sorted(bits, reverse=True)
        return cls("PHA", bits[0], tuple(bits[1:]), (angle,))

    @classmethod
    def gph(cls, angle: float) -> "SeoOp":
        return cls("GPH", None, (), (angle,))

    @classmethod
    def cnot(cls, control: int, target: int) -> "SeoOp":
        return cls("CNOT", target, (control,))

    @classmethod
    def exch(cls, i: int, j: int) -> "SeoOp":
        return cls("EXCH", i, (j,))

    def weight(self, nb: int) -> int:
        if self.kind == "MROTY":
            return 2 ** (nb - 1)
        if self.kind == "EXCH":
            return 3
        return 1

    def transposed(self) -> "SeoOp":
        if self.kind in ("ROTY", "MROTY"):
            return SeoOp(self.kind, self.target, self.controls, tuple(-p for p in self.params))
        return self

    def inverse(self) -> "SeoOp":
        if self.kind in ("ROTY", "MROTY", "PHA", "GPH"):
            return SeoOp(self.kind, self.target, self.controls, tuple(-p for p in self.params))
        return self


@dataclass(frozen=True)
class SeoProgram:
    nb: int
    ops: tuple[SeoOp, ...] = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            for b in op.bits:
                if not 0 <= b < self.nb:
                    raise ValueError(f"{op.kind} uses bit {b} outside a {self.nb}-bit register")
            if op.kind == "MROTY" and len(op.params) != 2 ** (self.nb - 1):
                raise ValueError(f"MROTY needs {2 ** (self.nb - 1)} angles, got {len(op.params)}")

    def __len__(self):
        return len(self.ops)

    def transposed(self) -> "SeoProgram":
        return SeoProgram(self.nb, tuple(op.transposed() for op in reversed(self.ops)), dict(self.metadata))

    def inverse(self) -> "SeoProgram":
        return SeoProgram(self.nb, tuple(op.inverse() for op in reversed(self.ops)), dict(self.metadata))


# -- dense matrices -----------------------------------------------------------


def roty_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]], dtype=complex)


def _pair_index(x0, target: int):
    """Index into MROTY angles: the other bits of ``x0`` in descending significance."""
    low = x0 & ((1 << target) - 1)
    return ((x0 >> (target + 1)) << target) | low


def op_matrix(op: SeoOp, nb: int) -> np.ndarray:
    ns = 2**nb
    if op.kind == "ROTY":
        return embed(roty_matrix(op.params[0]), nb, op.target)
    if op.kind in _ONE_QUBIT:
        gate = {"SIGX": pauli("x"), "SIGZ": pauli("z"), "HAD": hadamard1()}[op.kind]
        return embed(gate, nb, op.target)
    if op.kind == "GPH":
        return np.exp(1j * op.params[0]) * np.eye(ns, dtype=complex)
    x = np.arange(ns)
    if op.kind == "PHA":
        on = np.ones(ns, dtype=int)
        for b in op.bits:
            on &= (x >> b) & 1
        return np.diag(np.exp(1j * op.params[0] * on))
    if op.kind == "CNOT":
        m = np.zeros((ns, ns), dtype=complex)
        flip = ((x >> op.controls[0]) & 1) << op.target
        m[x ^ flip, x] = 1
        return m
    if op.kind == "EXCH":
        return exchange(nb, op.target, op.controls[0])
    if op.kind == "MROTY":
        t = op.target
        m = np.zeros((ns, ns), dtype=complex)
        angles = np.asarray(op.params)
        for x0 in x[((x >> t) & 1) == 0]:
            x1 = x0 | (1 << t)
            th = angles[_pair_index(x0, t)]
            m[np.ix_([x0, x1], [x0, x1])] = roty_matrix(th)
        return m
    raise ValueError(op.kind)


def reconstruct(program: SeoProgram) -> np.ndarray:
    """Product of op matrices in list order."""
    out = np.eye(2**program.nb, dtype=complex)
    for op in program.ops:
        out = out @ op_matrix(op, program.nb)
    return out


# -- state vectors ------------------------------------------------------------


def _apply_op(op: SeoOp, psi: np.ndarray, nb: int) -> np.ndarray:
    x = np.arange(2**nb)
    if op.kind == "GPH":
        return psi * np.exp(1j * op.params[0])
    if op.kind in ("PHA", "SIGZ"):
        mask = sum(1 << b for b in op.bits)
        on = (x & mask) == mask
        angle = np.pi if op.kind == "SIGZ" else op.params[0]
        out = psi.copy()
        out[on] *= np.exp(1j * angle)
        return out
    if op.kind in ("CNOT", "SIGX"):
        flip = (1 << op.target) if op.kind == "SIGX" else (((x >> op.controls[0]) & 1) << op.target)
        out = np.empty_like(psi)
        out[x ^ flip] = psi
        return out
    if op.kind == "EXCH":
        i, j = op.target, op.controls[0]
        differ = ((x >> i) ^ (x >> j)) & 1
        out = np.empty_like(psi)
        out[x ^ (differ << i) ^ (differ << j)] = psi
        return out
    # two-level rotations on the target bit
    t = op.target
    x0 = x[((x >> t) & 1) == 0]
    x1 = x0 | (1 << t)
    a, b = psi[x0], psi[x1]
    out = psi.copy()
    if op.kind == "HAD":
        out[x0], out[x1] = (a + b) / np.sqrt(2), (a - b) / np.sqrt(2)
        return out
    if op.kind == "ROTY":
        th = np.full(len(x0), op.params[0])
    else:
        th = np.asarray(op.params)[_pair_index(x0, t)]
    c, s = np.cos(th), np.sin(th)
    out[x0], out[x1] = c * a + s * b, -s * a + c * b
    return out


def apply_state(program: SeoProgram, psi) -> np.ndarray:
    """Apply the program to a ket, rightmost op first, without dense matrices."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2**program.nb,):
        raise ValueError(f"state has shape {psi.shape}, expected ({2**program.nb},)")
    for op in reversed(program.ops):
        psi = _apply_op(op, psi, program.nb)
    return psi


# -- text format ----------------------------------------------------------------


def format_op(op: SeoOp) -> str:
    if op.kind == "ROTY":
        return f"ROTY {op.target} {format_real(op.params[0])}"
    if op.kind == "MROTY":
        return f"MROTY {op.target} " + " ".join(format_real(p) for p in op.params)
    if op.kind == "PHA":
        return f"PHA {format_real(op.params[0])} BITS " + " ".join(str(b) for b in op.bits)
    if op.kind == "GPH":
        return f"GPH {format_real(op.params[0])}"
    if op.kind == "CNOT":
        return f"CNOT {op.target} CTRL {op.controls[0]}"
    if op.kind == "EXCH":
        return f"EXCH {op.target} {op.controls[0]}"
    return f"{op.kind} {op.target}"


def dumps(program: SeoProgram) -> str:
    lines = [
        "# leftmost op = leftmost matrix factor (applied last to a ket)",
    ]
    for key, value in program.metadata.items():
        lines.append(f"# meta {key} {value}")
    lines.append(f"NB {program.nb}")
    lines += [format_op(op) for op in program.ops]
    return "\n".join(lines) + "\n"


def write_seo(program: SeoProgram, sink) -> None:
    text = dumps(program)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w") as fh:
            fh.write(text)


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise SeoParseError(lineno, tok, "expected an integer") from None


def _float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise SeoParseError(lineno, tok, "expected a number") from None


def _parse_op(toks: list[str], lineno: int) -> SeoOp:
    kind = toks[0]

    def need(n):
        if len(toks) != n:
            raise SeoParseError(lineno, toks[-1], f"{kind} takes {n - 1} fields")

    if kind == "ROTY":
        need(3)
        return SeoOp.roty(_int(toks[1], lineno), _float(toks[2], lineno))
    if kind == "MROTY":
        if len(toks) < 3:
            raise SeoParseError(lineno, toks[-1], "MROTY needs a target and angles")
        return SeoOp.mroty(_int(toks[1], lineno), [_float(t, lineno) for t in toks[2:]])
    if kind == "PHA":
        if len(toks) < 4 or toks[2] != "BITS":
            raise SeoParseError(lineno, toks[2] if len(toks) > 2 else kind, "expected 'PHA <angle> BITS <bits...>'")
        return SeoOp.pha(_float(toks[1], lineno), [_int(t, lineno) for t in toks[3:]])
    if kind == "GPH":
        need(2)
        return SeoOp.gph(_float(toks[1], lineno))
    if kind == "CNOT":
        need(4)
        if toks[2] != "CTRL":
            raise SeoParseError(lineno, toks[2], "expected 'CTRL'")
        return SeoOp.cnot(_int(toks[3], lineno), _int(toks[1], lineno))
    if kind == "EXCH":
        need(3)
        return SeoOp.exch(_int(toks[1], lineno), _int(toks[2], lineno))
    if kind in _ONE_QUBIT:
        need(2)
        return SeoOp(kind, _int(toks[1], lineno))
    raise SeoParseError(lineno, kind, "unknown op")


def loads(text: str) -> SeoProgram:
    nb = None
    ops = []
    metadata = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split(None, 2)
            if len(parts) >= 2 and parts[0] == "meta":
                metadata[parts[1]] = parts[2] if len(parts) > 2 else ""
            continue
        toks = line.split()
        if nb is None:
            if toks[0] != "NB" or len(toks) != 2:
                raise SeoParseError(lineno, toks[0], "first statement must be 'NB <n>'")
            nb = _int(toks[1], lineno)
            if nb < 1:
                raise SeoParseError(lineno, toks[1], "NB must be positive")
            continue
        try:
            op = _parse_op(toks, lineno)
        except SeoParseError:
            raise
        except ValueError as exc:  # invariant violations from SeoOp itself
            raise SeoParseError(lineno, toks[0], str(exc)) from None
        for b in op.bits:
            if b >= nb:
                raise SeoParseError(lineno, str(b), f"bit outside the {nb}-bit register")
        ops.append(op)
    if nb is None:
        raise SeoParseError(0, "", "missing 'NB <n>' header")
    try:
        return SeoProgram(nb, tuple(ops), metadata)
    except ValueError as exc:
        raise SeoParseError(0, "", str(exc)) from None


def read_seo(source) -> SeoProgram:
    if hasattr(source, "read"):
        return loads(source.read())
    with open(source) as fh:
        return loads(fh.read())


# -- statistics -------------------------------------------------------------------


@dataclass(frozen=True)
class SeoStats:
    nb: int
    counts: dict
    total: int
    cnots: int
    has_mroty: bool

    def as_text(self) -> str:
        kinds = " ".join(f"{k}={v}" for k, v in sorted(self.counts.items()))
        flag = " (MROTY weighted 2^(nb-1))" if self.has_mroty else ""
        return f"nb={self.nb} total={self.total}{flag} cnots={self.cnots} {kinds}".rstrip()


def stats(program: SeoProgram) -> SeoStats:
    counts = Counter(op.kind for op in program.ops)
    total = sum(op.weight(program.nb) for op in program.ops)
    cnots = counts.get("CNOT", 0) + 3 * counts.get("EXCH", 0)
    return SeoStats(program.nb, dict(counts), total, cnots, counts.get("MROTY", 0) > 0)
