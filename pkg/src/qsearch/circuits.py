"""Three-qubit circuits realizing optimal plans for 'half-half' priors.

A half-half prior puts weight 1/8 + sigma on four locations and 1/8 - sigma
on the other four.  Its single-query optimal plan needs only one rotation
angle: state preparation is H on qubits 0 and 1 plus RY(theta) on qubit 2,
so basis states with qubit-2 bit 0 (the high block, outcomes 0-3) carry
squared amplitude cos^2(theta/2)/4 = q_hi and the rest carry
sin^2(theta/2)/4 = q_lo.  One Grover iteration is then:

    A | oracle (X-conjugated CCZ) | A-dagger | reflection about |000> | A

Solution labels read left to right from qubit 2 down to qubit 0, so label
"b2b1b0" names outcome index int(label, 2).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NumericalFailure, ResourceLimit
from .optimizer import OptimizerConfig, optimize
from .prior import Prior, new_prior
from .simulator import MAX_QUBITS, Gate, GateCircuit

__all__ = [
    "REFERENCE_THETA",
    "HalfHalfSpec",
    "halfhalf_prior",
    "halfhalf_spec",
    "theta_for_sigma",
    "build_halfhalf_circuit",
    "emit_qasm",
    "parse_qasm",
    "block_amplitude",
    "solution_outcome",
    "in_high_block",
]

#: Reference rotation angles for the eight benchmark deviations sigma = j/80,
#: j = 1..8; independently recomputed values must land within 1e-3 of these.
REFERENCE_THETA = (
    (1.0 / 80.0, 1.48725065),
    (2.0 / 80.0, 1.40239865),
    (3.0 / 80.0, 1.31480465),
    (4.0 / 80.0, 1.22272065),
    (5.0 / 80.0, 1.12383265),
    (6.0 / 80.0, 1.01471265),
    (7.0 / 80.0, 0.88979265),
    (8.0 / 80.0, 0.73831265),
)

_BLOCK_TOL = 1e-10


@dataclass(frozen=True)
class HalfHalfSpec:
    """Deviation, marked solution, and the derived preparation angle."""

    sigma: float
    solution: str
    theta: float

    def __post_init__(self):
        _check_sigma(self.sigma)
        if len(self.solution) != 3 or any(ch not in "01" for ch in self.solution):
            raise InvalidInput(f"solution must be 3 bits, got {self.solution!r}")
        if not 0.0 < self.theta <= math.pi:
            raise InvalidInput(f"theta must lie in (0, pi], got {self.theta!r}")


def _check_sigma(sigma: float) -> None:
    if not 0.0 <= sigma < 0.125:
        raise InvalidInput(f"sigma must lie in [0, 1/8), got {sigma!r}")


def halfhalf_prior(sigma: float) -> Prior:
    """The prior (1/8+sigma) x4, (1/8-sigma) x4."""
    _check_sigma(sigma)
    return new_prior([0.125 + sigma] * 4 + [0.125 - sigma] * 4)


def theta_for_sigma(sigma: float) -> float:
    """Preparation angle of the optimal single-query half-half plan.

    Solves the 8-item problem with the general optimizer, checks that the
    four high-block (and four low-block) amplitudes agree, and maps the
    common high value through theta = 2 acos(2 sqrt(q_hi)).  The low block
    must satisfy the complementary identity sin^2(theta/2)/4 = q_lo; a
    violation means the solver output is not realizable by one rotation.
    """
    p = halfhalf_prior(sigma)
    q = optimize(p, 1, OptimizerConfig()).q
    q_hi = q[:4]
    q_lo = q[4:]
    spread_hi = float(np.ptp(q_hi))
    spread_lo = float(np.ptp(q_lo))
    if spread_hi > _BLOCK_TOL or spread_lo > _BLOCK_TOL:
        raise NumericalFailure(
            f"block amplitudes not constant: spread {spread_hi!r}/{spread_lo!r}"
        )
    hi = float(q_hi.mean())
    lo = float(q_lo.mean())
    theta = 2.0 * math.acos(2.0 * math.sqrt(hi))
    if abs(math.sin(0.5 * theta) ** 2 / 4.0 - lo) > _BLOCK_TOL:
        raise NumericalFailure(
            f"theta = {theta!r} does not reproduce the low block {lo!r}"
        )
    return theta


def halfhalf_spec(sigma: float, solution: str) -> HalfHalfSpec:
    """Bundle sigma and a solution label with the derived angle."""
    return HalfHalfSpec(sigma=sigma, solution=solution, theta=theta_for_sigma(sigma))


def _prep(theta: float) -> list:
    return [Gate("h", (0,)), Gate("h", (1,)), Gate("ry", (2,), theta)]


def _oracle(solution: str) -> list:
    # X on every qubit whose solution bit is 0 turns the bare CCZ (which
    # tags |111>) into a phase flip on exactly the marked basis state.
    flips = [Gate("x", (qb,)) for qb in range(3) if solution[2 - qb] == "0"]
    return flips + [Gate("ccz", (0, 1, 2))] + flips


def build_halfhalf_circuit(spec: HalfHalfSpec) -> GateCircuit:
    """One full Grover iteration for the half-half plan.

    The diffusion block A (reflect about |000>) A-dagger equals the
    reflection about the prepared state, so the whole gate list implements
    exactly one optimal query.  Exactly two CCZs appear: one inside the
    oracle, one inside the reflection.
    """
    all_x = [Gate("x", (qb,)) for qb in range(3)]
    gates = (
        _prep(spec.theta)
        + _oracle(spec.solution)
        + [Gate("h", (0,)), Gate("h", (1,)), Gate("ry", (2,), -spec.theta)]
        + all_x
        + [Gate("ccz", (0, 1, 2))]
        + all_x
        + _prep(spec.theta)
    )
    return GateCircuit(qubit_count=3, gates=tuple(gates), solution_label=spec.solution)


def emit_qasm(circuit: GateCircuit) -> str:
    """OpenQASM 2.0 text for a circuit; byte-deterministic.

    CCZ is lowered to the qelib1-standard h/ccx/h sandwich on its last qubit.
    Angles carry 17 significant digits so they round-trip losslessly.
    """
    if circuit.qubit_count > MAX_QUBITS:
        raise ResourceLimit(f"refusing to emit beyond the {MAX_QUBITS}-qubit cap")
    k = circuit.qubit_count
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    if circuit.solution_label:
        lines.append(f"// solution: {circuit.solution_label}")
    lines.append(f"qreg q[{k}];")
    lines.append(f"creg c[{k}];")
    for g in circuit.gates:
        if g.kind in ("h", "x", "z"):
            lines.append(f"{g.kind} q[{g.qubits[0]}];")
        elif g.kind == "ry":
            lines.append(f"ry({g.angle:.17g}) q[{g.qubits[0]}];")
        elif g.kind == "ccz":
            qa, qb, qc = g.qubits
            lines.append(f"h q[{qc}];")
            lines.append(f"ccx q[{qa}],q[{qb}],q[{qc}];")
            lines.append(f"h q[{qc}];")
        else:
            raise InvalidInput(f"cannot emit gate kind {g.kind!r}")
    lines.append("measure q -> c;")
    return "\n".join(lines) + "\n"


_QASM_LINE = re.compile(
    r"^(?:(?P<plain>h|x|z)\s+q\[(?P<pq>\d+)\]"
    r"|ry\((?P<angle>[^)]+)\)\s+q\[(?P<rq>\d+)\]"
    r"|ccx\s+q\[(?P<ca>\d+)\],\s*q\[(?P<cb>\d+)\],\s*q\[(?P<cc>\d+)\])\s*;$"
)


def parse_qasm(text: str) -> GateCircuit:
    """Minimal reader for files produced by :func:`emit_qasm`.

    Understands exactly the emitted dialect: header lines, one qreg/creg,
    h/x/z/ry gates, and ccx — an h/ccx/h sandwich on the ccx target is fused
    back into the CCZ it came from.  Anything else is rejected.
    """
    qubit_count = None
    solution = ""
    gates: list = []
    pending_ccx = None  # (a, b, c) awaiting its closing h
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line in ("OPENQASM 2.0;", 'include "qelib1.inc";'):
            continue
        if line.startswith("// solution: "):
            solution = line[len("// solution: "):].strip()
            continue
        if line.startswith("//"):
            continue
        m = re.match(r"^qreg\s+q\[(\d+)\];$", line)
        if m:
            qubit_count = int(m.group(1))
            continue
        if re.match(r"^creg\s+c\[\d+\];$", line) or re.match(
            r"^measure\s+q\s*->\s*c;$", line
        ):
            continue
        m = _QASM_LINE.match(line)
        if m is None:
            raise InvalidInput(f"cannot parse QASM line: {raw!r}")
        if m.group("ca") is not None:
            if pending_ccx is not None:
                raise InvalidInput("ccx without the expected h sandwich")
            qa, qb, qc = (int(m.group(g)) for g in ("ca", "cb", "cc"))
            last = gates[-1] if gates else None
            if not (last and last.kind == "h" and last.qubits == (qc,)):
                raise InvalidInput("ccx without the expected h sandwich")
            gates.pop()
            pending_ccx = (qa, qb, qc)
            continue
        if m.group("plain") is not None:
            kind, target = m.group("plain"), int(m.group("pq"))
            if pending_ccx is not None:
                if kind == "h" and target == pending_ccx[2]:
                    gates.append(Gate("ccz", pending_ccx))
                    pending_ccx = None
                    continue
                raise InvalidInput("ccx without the expected h sandwich")
            gates.append(Gate(kind, (target,)))
            continue
        if pending_ccx is not None:
            raise InvalidInput("ccx without the expected h sandwich")
        try:
            angle = float(m.group("angle"))
        except ValueError as exc:
            raise InvalidInput(f"bad ry angle in QASM line: {raw!r}") from exc
        gates.append(Gate("ry", (int(m.group("rq")),), angle))
    if pending_ccx is not None:
        raise InvalidInput("ccx without the expected h sandwich")
    if qubit_count is None:
        raise InvalidInput("no qreg declaration found")
    return GateCircuit(
        qubit_count=qubit_count, gates=tuple(gates), solution_label=solution
    )


def block_amplitude(theta: float, high: bool) -> float:
    """Squared per-item amplitude of the high or low block for a given theta."""
    half = 0.5 * theta
    return (math.cos(half) ** 2 if high else math.sin(half) ** 2) / 4.0


def solution_outcome(solution: str) -> int:
    """Basis index named by a 'b2b1b0' label (qubit 0 is the LSB)."""
    if len(solution) != 3 or any(ch not in "01" for ch in solution):
        raise InvalidInput(f"solution must be 3 bits, got {solution!r}")
    return int(solution, 2)


def in_high_block(solution: str) -> bool:
    """True when the labelled outcome lies in the heavier (qubit-2 = 0) block."""
    return solution_outcome(solution) < 4
