"""Rayleigh-Ritz discretization of the patched plate.

Trial functions are tensor products of clamped-clamped beam mode
functions. Mass and stiffness matrices are assembled by Gauss-Legendre
quadrature on a rectilinear mesh whose cell edges include every patch
footprint edge, so the piecewise-constant coefficient fields (mass per
area and rigidities) never jump inside a cell and the quadrature sees
only smooth integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import basis
from .errors import AssemblyError, DomainError
from .plate import PatchSpec, PlateSpec, rigidities, validate_layout


@dataclass(frozen=True)
class BasisSpec:
    """Trial-function counts per axis and quadrature points per panel."""

    n_x: int
    n_y: int
    quadrature_order: int = 10

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise DomainError("basis.n_x and basis.n_y must be >= 1")
        if self.quadrature_order < 2:
            raise DomainError("basis.quadrature_order must be >= 2")

    @property
    def n_dof(self) -> int:
        return self.n_x * self.n_y


@dataclass(frozen=True)
class ModalModel:
    """Mass-normalized modes of the patched plate.

    ``mode_coeffs`` holds one coefficient vector per column; the
    physical mode shape is the coefficient-weighted sum of the trial
    functions. ``coupling`` (modes x patches) and ``capacitances`` are
    filled by the electromechanics layer and are None until then.
    """

    plate: PlateSpec
    patches: tuple[PatchSpec, ...]
    basis: BasisSpec
    frequencies: np.ndarray          # rad/s, ascending
    mode_coeffs: np.ndarray          # (n_dof, n_modes)
    damping_ratios: np.ndarray       # (n_modes,)
    coupling: np.ndarray | None = None      # (n_modes, n_patches)
    capacitances: np.ndarray | None = None  # (n_patches,)

    def __post_init__(self):
        # point-evaluation memo; FRF runs hit the same force/target points
        # for every frequency, so this stays tiny
        object.__setattr__(self, "_shape_cache", {})

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    @property
    def frequencies_hz(self) -> np.ndarray:
        return self.frequencies / (2.0 * np.pi)

    def mode_shapes_at(self, x: float, y: float) -> np.ndarray:
        """Values of every mass-normalized mode shape at one point."""
        cached = self._shape_cache.get((x, y))
        if cached is not None:
            return cached
        bx = basis.eval_matrix(self.basis.n_x, self.plate.length_a, [x])[0]
        by = basis.eval_matrix(self.basis.n_y, self.plate.width_b, [y])[0]
        w = np.outer(bx, by).reshape(-1)
        values = w @ self.mode_coeffs
        values.setflags(write=False)
        self._shape_cache[(x, y)] = values
        return values


@lru_cache(maxsize=None)
def _gauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def _axis_breakpoints(length: float, edges) -> np.ndarray:
    pts = np.array(sorted({0.0, length, *edges}))
    return pts


def _axis_cell_integrals(length: float, n: int, lo: float, hi: float, order: int):
    """1D Gram matrices of the trial functions over one interval.

    Returns (X0, X1, X2, X20) with X0 = int f_i f_k, X1 = int f_i' f_k',
    X2 = int f_i'' f_k'', X20[i, k] = int f_i'' f_k. Composite
    Gauss-Legendre: the interval is split into panels so the number of
    panels across the whole axis scales with the mode count, keeping the
    oscillatory integrands resolved to machine precision.
    """
    n_panels = max(1, math.ceil(n * (hi - lo) / length))
    nodes, weights = _gauss(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    wts = (half[:, None] * weights[None, :]).ravel()
    b0 = basis.eval_matrix(n, length, pts, 0)
    b1 = basis.eval_matrix(n, length, pts, 1)
    b2 = basis.eval_matrix(n, length, pts, 2)
    w0 = b0 * wts[:, None]
    X0 = w0.T @ b0
    X1 = (b1 * wts[:, None]).T @ b1
    X2 = (b2 * wts[:, None]).T @ b2
    X20 = (b2 * wts[:, None]).T @ b0
    return X0, X1, X2, X20


def assemble_system(plate: PlateSpec, patches, spec: BasisSpec):
    """Mass and stiffness matrices of the patched plate.

    The stiffness bilinear form per region is

        A11 u_xx v_xx + A22 u_yy v_yy + A12 (u_xx v_yy + u_yy v_xx)
            + A66 u_xy v_xy

    with host coefficients A11 = A22 = Dh, A12 = nu_s Dh and
    A66 = 2 (1 - nu_s) Dh, where Dh is the bare rigidity away from
    patches and the shifted-neutral-surface rigidity underneath them.
    Under a patch the patch layer adds A11 = A22 = D11p, A12 = D12p and
    A66 = 4 D66p (the twist rigidity enters the energy with the usual
    factor of four).
    """
    patches = tuple(patches)
    validate_layout(plate, patches)
    nx, ny = spec.n_x, spec.n_y
    a, b = plate.length_a, plate.width_b

    x_breaks = _axis_breakpoints(a, [e for p in patches for e in (p.x1, p.x2)])
    y_breaks = _axis_breakpoints(b, [e for p in patches for e in (p.y1, p.y2)])

    x_cells = [
        _axis_cell_integrals(a, nx, x_breaks[i], x_breaks[i + 1], spec.quadrature_order)
        for i in range(len(x_breaks) - 1)
    ]
    y_cells = [
        _axis_cell_integrals(b, ny, y_breaks[j], y_breaks[j + 1], spec.quadrature_order)
        for j in range(len(y_breaks) - 1)
    ]

    rig = [rigidities(plate, p) for p in patches]
    m_bare = plate.density_rhos * plate.thickness_hs
    Ds = plate.youngs_Ys * plate.thickness_hs**3 / (12.0 * (1.0 - plate.poisson_nus**2))

    M4 = np.zeros((nx, ny, nx, ny))
    K4 = np.zeros((nx, ny, nx, ny))

    for ix in range(len(x_breaks) - 1):
        X0, X1, X2, X20 = x_cells[ix]
        xm = 0.5 * (x_breaks[ix] + x_breaks[ix + 1])
        for iy in range(len(y_breaks) - 1):
            Y0, Y1, Y2, Y20 = y_cells[iy]
            ym = 0.5 * (y_breaks[iy] + y_breaks[iy + 1])

            cover = None
            for k, p in enumerate(patches):
                if p.covers(xm, ym):
                    cover = k
                    break

            if cover is None:
                m_c = m_bare
                A11 = A22 = Ds
                A12 = plate.poisson_nus * Ds
                A66 = 2.0 * (1.0 - plate.poisson_nus) * Ds
            else:
                p, r = patches[cover], rig[cover]
                m_c = m_bare + p.density_rhop * p.thickness_hp
                A11 = A22 = r.Dsp + r.D11p
                A12 = plate.poisson_nus * r.Dsp + r.D12p
                A66 = 2.0 * (1.0 - plate.poisson_nus) * r.Dsp + 4.0 * r.D66p

            M4 += m_c * np.einsum("ik,jl->ijkl", X0, Y0)
            K4 += A11 * np.einsum("ik,jl->ijkl", X2, Y0)
            K4 += A22 * np.einsum("ik,jl->ijkl", X0, Y2)
            K4 += A12 * (np.einsum("ik,lj->ijkl", X20, Y20)
                         + np.einsum("ki,jl->ijkl", X20, Y20))
            K4 += A66 * np.einsum("ik,jl->ijkl", X1, Y1)

    n = nx * ny
    M = M4.reshape(n, n)
    K = K4.reshape(n, n)
    M = 0.5 * (M + M.T)
    K = 0.5 * (K + K.T)

    if not np.all(np.isfinite(M)) or not np.all(np.isfinite(K)):
        raise AssemblyError("non-finite entries in assembled matrices")
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise AssemblyError("mass matrix is singular or indefinite") from exc
    return M, K


def solve_modes(M, K, modal_damping_xi: float, *, plate, patches, spec) -> ModalModel:
    """Generalized symmetric eigensolve; returns the full mode set.

    Eigenvectors come back mass-normalized; a uniform modal damping
    ratio is attached. Coupling and capacitance stay unset here.
    """
    try:
        evals, vecs = scipy.linalg.eigh(K, M)
    except scipy.linalg.LinAlgError as exc:
        raise AssemblyError("ill-conditioned mass matrix") from exc
    omega = np.sqrt(np.clip(evals, 0.0, None))
    for arr in (omega, vecs):
        arr.setflags(write=False)
    xi = np.full(omega.size, modal_damping_xi)
    xi.setflags(write=False)
    return ModalModel(
        plate=plate,
        patches=tuple(patches),
        basis=spec,
        frequencies=omega,
        mode_coeffs=vecs,
        damping_ratios=xi,
    )


def build_model(plate: PlateSpec, patches, spec: BasisSpec) -> ModalModel:
    """Assemble and solve in one step (coupling still unset)."""
    M, K = assemble_system(plate, patches, spec)
    return solve_modes(M, K, plate.modal_damping_xi, plate=plate, patches=patches, spec=spec)
