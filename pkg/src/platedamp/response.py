"""Steady-state harmonic response of the shunted electromechanical plate.

For a separated topology each patch feeds its own load; eliminating the
modal coordinates leaves a dense K x K complex system in the patch
voltages whose off-diagonals carry the structure-mediated interaction
between patches. For a connected topology all patches share one node
and one load, collapsing the unknown to a single voltage. The two paths
are coded independently and must agree for a single patch.

Open and short circuits are numerical surrogates (1e9 and 1e-3 ohm)
rather than separate code paths; their adequacy is covered by tests.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SolverError
from .ritz import ModalModel

OPEN_OHMS = 1e9
SHORT_OHMS = 1e-3

MIN_RETAINED_MODES = 25
RETAIN_BAND_FACTOR = 4.0


@dataclass(frozen=True)
class ImpedanceLaw:
    """One shunt branch: resistor, series RL, open or short.

    Open and short evaluate as fixed resistances (surrogates above), so
    a single solver covers every variant.
    """

    kind: str
    ohms: float = 0.0
    henries: float = 0.0

    _KINDS = ("resistor", "series_rl", "open", "short")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise DomainError(f"unknown impedance kind '{self.kind}'")
        if self.ohms < 0.0 or self.henries < 0.0:
            raise DomainError("impedance R and L must be non-negative")

    @classmethod
    def resistor(cls, ohms: float) -> "ImpedanceLaw":
        return cls("resistor", ohms=ohms)

    @classmethod
    def series_rl(cls, ohms: float, henries: float) -> "ImpedanceLaw":
        return cls("series_rl", ohms=ohms, henries=henries)

    @classmethod
    def open(cls) -> "ImpedanceLaw":
        return cls("open", ohms=OPEN_OHMS)

    @classmethod
    def short(cls) -> "ImpedanceLaw":
        return cls("short", ohms=SHORT_OHMS)

    def impedance(self, omega: float) -> complex:
        if self.kind == "resistor":
            return complex(self.ohms)
        if self.kind == "series_rl":
            return self.ohms + 1j * omega * self.henries
        if self.kind == "open":
            return complex(OPEN_OHMS)
        return complex(SHORT_OHMS)


@dataclass(frozen=True)
class ShuntTopology:
    """Circuit wiring: one load per patch, or one common load for all."""

    mode: str
    loads: tuple[ImpedanceLaw, ...]

    def __post_init__(self):
        if self.mode not in ("separated", "connected"):
            raise DomainError(f"unknown topology mode '{self.mode}'")
        if self.mode == "connected" and len(self.loads) != 1:
            raise DomainError("connected topology takes exactly one load")

    @classmethod
    def separated(cls, loads) -> "ShuntTopology":
        return cls("separated", tuple(loads))

    @classmethod
    def connected(cls, load: ImpedanceLaw) -> "ShuntTopology":
        return cls("connected", (load,))


@dataclass(frozen=True)
class HarmonicForce:
    """Transverse point force: amplitude in newtons at (x, y)."""

    amplitude: float
    x: float
    y: float


@dataclass(frozen=True)
class FrfResult:
    """Complex response per unit force over a frequency grid.

    displacement is m/N at the target point, velocity is (m/s)/N and
    equals j*omega*displacement identically; voltages is V/N with one
    column per patch.
    """

    frequencies_hz: np.ndarray
    displacement: np.ndarray
    velocity: np.ndarray
    voltages: np.ndarray

    def __post_init__(self):
        for arr in (self.frequencies_hz, self.displacement, self.velocity, self.voltages):
            arr.setflags(write=False)


def retained_mode_count(model: ModalModel, grid_hz) -> int:
    """Modes kept in FRF sums: everything up to four times the band top,
    but never fewer than 25 (capped at the model size)."""
    omega_top = 2.0 * np.pi * float(np.max(grid_hz)) * RETAIN_BAND_FACTOR
    count = int(np.searchsorted(model.frequencies, omega_top, side="right"))
    return min(model.n_modes, max(MIN_RETAINED_MODES, count))


def _check_coupled(model: ModalModel):
    if model.coupling is None or model.capacitances is None:
        raise DomainError("model has no coupling data; run electromech.with_coupling first")


def assemble_circuit_system(omega: float, model: ModalModel, loads, force: HarmonicForce,
                            n_modes: int | None = None):
    """Voltage-space system (A, b) for a separated topology at one frequency.

    A's diagonal carries the branch admittance 1/Z_k + j*omega*C_k plus
    the self term of the structure-mediated interaction; off-diagonals
    are symmetric in the two patch indices. b is linear in the force.
    """
    _check_coupled(model)
    k = len(model.patches)
    if len(loads) != k:
        raise DomainError(f"expected {k} loads, got {len(loads)}")
    n = model.n_modes if n_modes is None else min(n_modes, model.n_modes)
    theta = model.coupling[:n, :]
    omega_n = model.frequencies[:n]
    zeta = model.damping_ratios[:n]
    phi0 = model.mode_shapes_at(force.x, force.y)[:n]

    denom = omega_n**2 - omega**2 + 2j * zeta * omega_n * omega
    inv = 1.0 / denom
    jw = 1j * omega

    A = jw * (theta * inv[:, None]).T @ theta
    for i, law in enumerate(loads):
        z = law.impedance(omega)
        if z == 0:
            raise SolverError("zero branch impedance; use the short surrogate instead")
        A[i, i] += 1.0 / z + jw * model.capacitances[i]
    b = -jw * force.amplitude * (theta.T @ (phi0 * inv))
    return A, b


def solve_voltages(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense complex solve with a residual guard (no explicit inverse)."""
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        v = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SolverError("singular circuit system (topology/frequency degeneracy)") from exc
    resid = np.linalg.norm(A @ v - b)
    if resid > 1e-10 * max(np.linalg.norm(b), 1e-300):
        raise SolverError("circuit solve residual exceeds tolerance")
    return v


def _modal_pieces(model: ModalModel, force: HarmonicForce, target, n: int):
    phi0 = model.mode_shapes_at(force.x, force.y)[:n]
    phit = model.mode_shapes_at(target[0], target[1])[:n]
    return model.frequencies[:n], model.damping_ratios[:n], phi0, phit


def _chunked(worker, grid_hz: np.ndarray, shapes, threads: int):
    """Run ``worker(indices)`` over the grid, optionally across threads.

    Each frequency is computed by the identical fixed-size code path, so
    results are bitwise independent of the chunking.
    """
    out = [np.zeros((grid_hz.size, *s), dtype=complex) for s in shapes]

    def run(idx):
        for i in idx:
            for arr, val in zip(out, worker(i)):
                arr[i] = val

    indices = np.arange(grid_hz.size)
    if threads <= 1:
        run(indices)
    else:
        chunks = np.array_split(indices, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, chunks))
    return out


def frf_separated(model: ModalModel, topology: ShuntTopology, force: HarmonicForce,
                  target, grid_hz, threads: int = 1, n_modes: int | None = None) -> FrfResult:
    """FRF with each patch on its own load."""
    if topology.mode != "separated":
        raise DomainError("frf_separated requires a separated topology")
    _check_coupled(model)
    if len(topology.loads) != len(model.patches):
        raise DomainError(f"expected {len(model.patches)} loads, got {len(topology.loads)}")
    grid_hz = np.asarray(grid_hz, dtype=float)
    n = retained_mode_count(model, grid_hz) if n_modes is None else min(n_modes, model.n_modes)
    omega_n, zeta, phi0, phit = _modal_pieces(model, force, target, n)
    theta = model.coupling[:n, :]
    k = len(model.patches)
    f0 = force.amplitude

    def worker(i):
        omega = 2.0 * np.pi * grid_hz[i]
        denom = omega_n**2 - omega**2 + 2j * zeta * omega_n * omega
        inv = 1.0 / denom
        if k:
            A, b = assemble_circuit_system(omega, model, topology.loads, force, n)
            v = solve_voltages(A, b)
            modal = (f0 * phi0 + theta @ v) * inv
        else:
            v = np.zeros(0, dtype=complex)
            modal = f0 * phi0 * inv
        disp = phit @ modal
        return disp / f0, v / f0

    disp, volts = _chunked(worker, grid_hz, [(), (k,)], threads)
    vel = 1j * 2.0 * np.pi * grid_hz * disp
    return FrfResult(grid_hz.copy(), disp, vel, volts)


def frf_connected(model: ModalModel, topology: ShuntTopology, force: HarmonicForce,
                  target, grid_hz, threads: int = 1, n_modes: int | None = None) -> FrfResult:
    """FRF with all patches wired to one common node and a single load.

    The shared node sums capacitances and couplings, so the voltage
    solve is scalar. Coded independently of the separated path.
    """
    if topology.mode != "connected":
        raise DomainError("frf_connected requires a connected topology")
    _check_coupled(model)
    if not model.patches:
        raise DomainError("connected topology requires at least one patch")
    grid_hz = np.asarray(grid_hz, dtype=float)
    n = retained_mode_count(model, grid_hz) if n_modes is None else min(n_modes, model.n_modes)
    omega_n, zeta, phi0, phit = _modal_pieces(model, force, target, n)
    theta_sum = model.coupling[:n, :].sum(axis=1)
    cap_sum = float(model.capacitances.sum())
    law = topology.loads[0]
    k = len(model.patches)
    f0 = force.amplitude

    def worker(i):
        omega = 2.0 * np.pi * grid_hz[i]
        denom = omega_n**2 - omega**2 + 2j * zeta * omega_n * omega
        inv = 1.0 / denom
        jw = 1j * omega
        z = law.impedance(omega)
        if z == 0:
            raise SolverError("zero branch impedance; use the short surrogate instead")
        gain = 1.0 / z + jw * cap_sum + jw * np.sum(theta_sum**2 * inv)
        v = -jw * f0 * np.sum(theta_sum * phi0 * inv) / gain
        modal = (f0 * phi0 + v * theta_sum) * inv
        disp = phit @ modal
        return disp / f0, np.full(k, v) / f0

    disp, volts = _chunked(worker, grid_hz, [(), (k,)], threads)
    vel = 1j * 2.0 * np.pi * grid_hz * disp
    return FrfResult(grid_hz.copy(), disp, vel, volts)


def frf_mechanical(model: ModalModel, force: HarmonicForce, target, grid_hz,
                   threads: int = 1, n_modes: int | None = None) -> FrfResult:
    """Purely mechanical FRF with all electromechanical feedback dropped."""
    grid_hz = np.asarray(grid_hz, dtype=float)
    n = retained_mode_count(model, grid_hz) if n_modes is None else min(n_modes, model.n_modes)
    omega_n, zeta, phi0, phit = _modal_pieces(model, force, target, n)
    k = len(model.patches)
    f0 = force.amplitude

    def worker(i):
        omega = 2.0 * np.pi * grid_hz[i]
        denom = omega_n**2 - omega**2 + 2j * zeta * omega_n * omega
        disp = phit @ (f0 * phi0 * (1.0 / denom))
        return disp / f0, np.zeros(k, dtype=complex)

    disp, volts = _chunked(worker, grid_hz, [(), (k,)], threads)
    vel = 1j * 2.0 * np.pi * grid_hz * disp
    return FrfResult(grid_hz.copy(), disp, vel, volts)


def frf(model: ModalModel, topology: ShuntTopology, force: HarmonicForce,
        target, grid_hz, threads: int = 1, n_modes: int | None = None) -> FrfResult:
    """Dispatch on topology mode."""
    if topology.mode == "connected":
        return frf_connected(model, topology, force, target, grid_hz, threads, n_modes)
    return frf_separated(model, topology, force, target, grid_hz, threads, n_modes)
