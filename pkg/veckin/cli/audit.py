"""
`audit` subcommand: randomized sweeps of the entropy and moment identities.
"""

from typing import List, Optional, Tuple
import logging

import numpy as np

from ..models import AuditCheck, RunManifest, SchemeKind
from ..services.cases import build_case, step_config
from ..services.conservation_laws import ModelSpec, ShallowWater, make_model
from ..services.diagnostics import dissipation_audit, ec_residual_audit
from ..services.fluxes import FluxRequest, ec_flux, ec_residual, interface_flux, reconstruct_scaled_jump
from ..services.integrator import initial_state
from ..services.kinetic import (
    VelocitySet,
    build_velocity_set,
    chi_potential,
    kinetic_entropy,
    maxwellian,
    positivity_margin,
)
from ..settings import Settings
from .reports import write_reports

logger = logging.getLogger(__name__)

PAIR_SAMPLES = 10_000
SIGN_SAMPLES = 100_000
SEED = 20240611

EC_RTOL = 1e-11
MOMENT_TOL = 1e-13
ENTROPY_SUM_TOL = 1e-14
CONSISTENCY_RTOL = 1e-13


def sample_states(model: ModelSpec, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Random admissible states and positions.

    Shallow water: depth in [0.5, 3], velocities in [-2, 2]. Scalar laws:
    values in [-2, 2]; the rotation model also gets positions in its domain.
    """
    if isinstance(model, ShallowWater):
        rho = rng.uniform(0.5, 3.0, size)
        u = rng.uniform(-2.0, 2.0, (size, model.dim))
        U = np.concatenate([rho[:, None], rho[:, None] * u], axis=-1)
    else:
        U = rng.uniform(-2.0, 2.0, (size, 1))
    x = None
    if model.position_dependent:
        x = np.stack([rng.uniform(-1.0, 1.0, size), rng.uniform(-0.5, 1.5, size)], axis=-1)
    return U, x


def velocity_set_for(model: ModelSpec, U: np.ndarray, x: Optional[np.ndarray], safety: float = 1.1) -> VelocitySet:
    factor = 1.0 if model.dim == 1 else 2.0
    return build_velocity_set(model.dim, safety * factor * float(np.max(model.max_wave_speed(U, x))))


def _check(name: str, value: float, threshold: float, upper: bool = True) -> AuditCheck:
    passed = value <= threshold if upper else value >= threshold
    return AuditCheck(name=name, value=float(value), threshold=threshold, passed=bool(passed))


def moment_checks(model: ModelSpec, rng: np.random.Generator) -> List[AuditCheck]:
    U, x = sample_states(model, rng, PAIR_SAMPLES)
    vset = velocity_set_for(model, U, x)
    eye = np.eye(model.dim)
    ulps = max(
        abs(np.sum(vset.a) - 1.0),
        float(np.max(np.abs(np.sum(vset.b, axis=0)))),
        float(np.max(np.abs(vset.v.T @ vset.a))),
        float(np.max(np.abs(vset.v.T @ vset.b - eye))),
    ) / np.finfo(float).eps

    F = maxwellian(model, vset, U, x)
    scale = 1.0 + np.abs(U)
    moment = float(np.max(np.abs(np.sum(F, axis=0) - U) / scale))
    for d in range(model.dim):
        G = model.flux(U, x, d)
        flux_moment = np.tensordot(vset.v[:, d], F, axes=1)
        moment = max(moment, float(np.max(np.abs(flux_moment - G) / (1.0 + np.abs(G)))))

    H = kinetic_entropy(model, vset, U, x)
    eta = model.entropy(U)
    entropy_sum = float(np.max(np.abs(np.sum(H, axis=0) - eta) / (1.0 + np.abs(eta))))

    return [
        _check("velocity_set_moments_ulps", ulps, 4.0),
        _check("maxwellian_moments", moment, MOMENT_TOL),
        _check("kinetic_entropy_sum", entropy_sum, ENTROPY_SUM_TOL),
        _check("positivity_margin", positivity_margin(model, vset, U, x), 0.0, upper=False),
    ]


def ec_checks(model: ModelSpec, rng: np.random.Generator) -> List[AuditCheck]:
    U_L, x = sample_states(model, rng, PAIR_SAMPLES)
    U_R, _ = sample_states(model, rng, PAIR_SAMPLES)
    vset = velocity_set_for(model, np.concatenate([U_L, U_R]), None if x is None else np.concatenate([x, x]))
    kinetic = macroscopic = consistency = 0.0
    for d in range(model.dim):
        req = FluxRequest.from_states(model, d, U_L, U_R, x)
        flux = ec_flux(model, vset, req)
        chi_jump = chi_potential(model, vset, U_R, x)[:, d] - chi_potential(model, vset, U_L, x)[:, d]
        residual = ec_residual(model, vset, req, flux)
        kinetic = max(kinetic, float(np.max(np.abs(residual) / (1.0 + np.abs(chi_jump)))))

        psi_jump = model.entropy_potential(U_R, x, d) - model.entropy_potential(U_L, x, d)
        summed = np.sum(req.jump * np.sum(flux, axis=0), axis=-1)
        macroscopic = max(macroscopic, float(np.max(np.abs(summed - psi_jump) / (1.0 + np.abs(psi_jump)))))

        same = FluxRequest.from_states(model, d, U_L, U_L, x, jump_prev=np.zeros_like(U_L), jump_next=np.zeros_like(U_L))
        expected = vset.per_velocity(vset.v[:, d], U_L.ndim) * maxwellian(model, vset, U_L, x)
        for scheme in SchemeKind:
            diff = np.abs(interface_flux(scheme, model, vset, same) - expected) / (1.0 + np.abs(expected))
            consistency = max(consistency, float(np.max(diff)))

    return [
        _check("kinetic_ec_residual", kinetic, EC_RTOL),
        _check("macroscopic_ec_residual", macroscopic, EC_RTOL),
        _check("flux_consistency", consistency, CONSISTENCY_RTOL),
    ]


def sign_property_check(model: ModelSpec, rng: np.random.Generator) -> AuditCheck:
    """Count reconstructed characteristic jumps that leave [0, w]"""
    p = model.p
    jumps = rng.normal(size=(3, SIGN_SAMPLES, p))
    # zero jumps make the minmod branches reachable
    jumps[rng.random(jumps.shape) < 0.05] = 0.0
    R = np.broadcast_to(np.eye(p), (SIGN_SAMPLES, p, p))
    w = jumps[1]
    W = reconstruct_scaled_jump(R, jumps[0], w, jumps[2])
    violations = np.count_nonzero((W * w < 0.0) | (np.abs(W) > np.abs(w)))
    return _check("sign_property_violations", float(violations), 0.0)


def case_checks(manifest: RunManifest, model: ModelSpec) -> List[AuditCheck]:
    """Entropy-condition audits on the case's initial state"""
    case = build_case(manifest.case)
    config = step_config(case, scheme=manifest.scheme, lambda_safety=manifest.lambda_safety)
    state = initial_state(case, model, config)
    scale = 1.0 + float(np.max(np.abs(chi_potential(model, state.vset, state.U.interior,
                                                     state.U.grid.cell_centers() if model.position_dependent else None))))
    residual = max(ec_residual_audit(model, state.vset, state.U, d) for d in range(model.dim))
    checks = [_check("initial_state_ec_residual", residual / scale, EC_RTOL)]
    if SchemeKind(config.scheme) != SchemeKind.EC:
        production = min(dissipation_audit(model, state.vset, state.U, d, config.scheme) for d in range(model.dim))
        checks.append(_check("initial_state_dissipation", production, 0.0, upper=False))
    return checks


def execute(manifest: RunManifest, settings: Settings) -> bool:
    case = build_case(manifest.case)
    model = make_model(case.model_kind)
    rng = np.random.default_rng(SEED)
    checks = moment_checks(model, rng) + ec_checks(model, rng)
    checks.append(sign_property_check(model, rng))
    checks.extend(case_checks(manifest, model))

    for check in checks:
        log = logger.info if check.passed else logger.warning
        log(f"Audit {check.name}: {check.value:.3e} (threshold {check.threshold:.1e})")
    write_reports(manifest, checks=checks)
    return all(check.passed for check in checks)
