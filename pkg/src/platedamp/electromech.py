"""Blocked capacitance and modal electromechanical coupling of the patches.

The coupling coefficient of mode r and patch k is the footprint integral
of the mode-shape Laplacian, scaled by the signed piezoelectric constant
and the lever arm between the patch mid-plane and the (shifted) neutral
surface:

    theta[r, k] = -e31 * ((hp + hs)/2 - z0) * integral(lap(shape_r), footprint_k)

Two evaluation paths exist. The closed form exploits the separable
basis: the Laplacian integral reduces to first-derivative differences
across the footprint times 1D integrals of the opposite-axis functions,
both available exactly. The quadrature path integrates the Laplacian
numerically and exists as an independent cross-check.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import basis
from .plate import PatchSpec, PlateSpec, neutral_axis_offset
from .ritz import ModalModel


def patch_capacitance(patch: PatchSpec) -> float:
    """Blocked capacitance in farads: permittivity times area over thickness."""
    return patch.eps33_s * patch.area / patch.thickness_hp


def _lever_arm(plate: PlateSpec, patch: PatchSpec) -> float:
    return (patch.thickness_hp + plate.thickness_hs) / 2.0 - neutral_axis_offset(plate, patch)


def _laplacian_footprint_integrals(model: ModalModel, patch: PatchSpec) -> np.ndarray:
    """Exact footprint integral of the Laplacian of every trial function.

    Separability turns the area integral of fx''*fy + fx*fy'' into
    (fx'(x2) - fx'(x1)) * int(fy) + int(fx) * (fy'(y2) - fy'(y1)).
    Returned flattened to match the assembly ordering.
    """
    spec, plate = model.basis, model.plate
    dx1 = basis.eval_matrix(spec.n_x, plate.length_a, [patch.x1, patch.x2], 1)
    dphi = dx1[1] - dx1[0]
    dy1 = basis.eval_matrix(spec.n_y, plate.width_b, [patch.y1, patch.y2], 1)
    dpsi = dy1[1] - dy1[0]
    int_phi = np.array([basis.integral(i + 1, plate.length_a, patch.x1, patch.x2)
                        for i in range(spec.n_x)])
    int_psi = np.array([basis.integral(j + 1, plate.width_b, patch.y1, patch.y2)
                        for j in range(spec.n_y)])
    return (np.outer(dphi, int_psi) + np.outer(int_phi, dpsi)).reshape(-1)


def coupling_vector(model: ModalModel, patch: PatchSpec) -> np.ndarray:
    """Per-mode coupling coefficients for one patch (closed form)."""
    lap = _laplacian_footprint_integrals(model, patch)
    return -patch.e31_bar * _lever_arm(model.plate, patch) * (lap @ model.mode_coeffs)


def coupling_matrix(model: ModalModel) -> np.ndarray:
    """Coupling coefficients for every (mode, patch) pair, shape (n_modes, K)."""
    if not model.patches:
        return np.zeros((model.n_modes, 0))
    return np.column_stack([coupling_vector(model, p) for p in model.patches])


def coupling_matrix_quadrature(model: ModalModel, order: int = 24) -> np.ndarray:
    """Quadrature evaluation of the coupling matrix (independent cross-check)."""
    spec, plate = model.basis, model.plate
    nodes, weights = np.polynomial.legendre.leggauss(order)
    cols = []
    for patch in model.patches:
        xm, xh = 0.5 * (patch.x2 + patch.x1), 0.5 * (patch.x2 - patch.x1)
        ym, yh = 0.5 * (patch.y2 + patch.y1), 0.5 * (patch.y2 - patch.y1)
        xs = xm + xh * nodes
        ys = ym + yh * nodes
        bx0 = basis.eval_matrix(spec.n_x, plate.length_a, xs, 0)
        bx2 = basis.eval_matrix(spec.n_x, plate.length_a, xs, 2)
        by0 = basis.eval_matrix(spec.n_y, plate.width_b, ys, 0)
        by2 = basis.eval_matrix(spec.n_y, plate.width_b, ys, 2)
        wx = weights * xh
        wy = weights * yh
        lap = (np.einsum("q,qi,p,pj->ij", wx, bx2, wy, by0)
               + np.einsum("q,qi,p,pj->ij", wx, bx0, wy, by2)).reshape(-1)
        cols.append(-patch.e31_bar * _lever_arm(plate, patch) * (lap @ model.mode_coeffs))
    if not cols:
        return np.zeros((model.n_modes, 0))
    return np.column_stack(cols)


def with_coupling(model: ModalModel) -> ModalModel:
    """New model with coupling and capacitance fields populated."""
    theta = coupling_matrix(model)
    caps = np.array([patch_capacitance(p) for p in model.patches])
    theta.setflags(write=False)
    caps.setflags(write=False)
    return dataclasses.replace(model, coupling=theta, capacitances=caps)
