"""Dynamics tests: generators, cycle maps, effective-parameter reduction.

Expected numbers here are either hand-derived closed forms or frozen
outputs of independent prototype calculations noted inline.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catpump import analysis as an
from catpump import dynamics as dy
from catpump import fock
from catpump.errors import (
    IntegratorError,
    InvalidParameterError,
    ShapeMismatchError,
    TruncationError,
)

RNG = np.random.default_rng(20260822)


def vacuum(dim):
    v = np.zeros((dim, dim), dtype=complex)
    v[0, 0] = 1.0
    return fock.DensityMatrix(v, (dim,))


def random_density(dim, rng, even_only=False, levels=None):
    """Random state; ``levels`` caps the occupied Fock levels, keeping the
    state well inside the truncation as any valid simulation input must be."""
    s = dim if levels is None else min(levels, dim)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m[s:, :] = 0.0
    r = m @ m.conj().T
    if even_only:
        mask = np.arange(dim) % 2 == 0
        r = r * np.outer(mask, mask)
    r = r / np.trace(r).real
    return fock.DensityMatrix(r, (dim,))


# ---------------------------------------------------------------------------
# parameter containers


def test_adiabatic_params_reject_negative_loss():
    with pytest.raises(InvalidParameterError):
        dy.AdiabaticParams(two_photon_pump=0.1, two_photon_loss=-0.1)


def test_steady_amplitude_value():
    p = dy.AdiabaticParams(two_photon_pump=0.2, two_photon_loss=0.1)
    assert p.steady_amplitude() == pytest.approx(2j, abs=1e-12)


def test_cycle_config_validation():
    with pytest.raises(InvalidParameterError):
        dy.CycleConfig(phase=0.0, pump_amplitude=-1j)
    with pytest.raises(InvalidParameterError):
        dy.CycleConfig(phase=0.5, pump_amplitude=-1j, cycle_ratio=0.5)
    with pytest.raises(InvalidParameterError):
        dy.CycleConfig(phase=0.5, pump_amplitude=-1j, signal_loss=-0.1)
    with pytest.raises(InvalidParameterError):
        dy.CycleConfig(phase=0.5, pump_amplitude=-1j, n_cycles=0)


def test_cycle_config_default_cycle_count():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j)
    assert cfg.n_cycles == 60
    cfg = dy.CycleConfig(phase=0.4, pump_amplitude=-1j)
    assert cfg.n_cycles == 75


def test_channel_rejects_negative_rate():
    a = fock.annihilation(4)
    with pytest.raises(InvalidParameterError):
        dy.LindbladChannel(rate=-1.0, operator=a)


# ---------------------------------------------------------------------------
# lindblad_rhs


def test_rhs_zero_for_no_generators():
    rho = random_density(6, RNG)
    h0 = fock.Operator(np.zeros((6, 6), dtype=complex), (6,))
    out = dy.lindblad_rhs(rho, h0, [])
    assert np.abs(out).max() == 0.0


def test_rhs_single_photon_decay_hand_value():
    # rate 2, operator a, on |1><1|: rhs = 2(|0><0| - |1><1|), by direct
    # evaluation of 2 a rho a' - a'a rho - rho a'a
    dim = 4
    rho = np.zeros((dim, dim), dtype=complex)
    rho[1, 1] = 1.0
    rho = fock.DensityMatrix(rho, (dim,))
    h0 = fock.Operator(np.zeros((dim, dim), dtype=complex), (dim,))
    ch = dy.LindbladChannel(rate=2.0, operator=fock.annihilation(dim))
    out = dy.lindblad_rhs(rho, h0, [ch])
    expect = np.zeros((dim, dim), dtype=complex)
    expect[0, 0] = 2.0
    expect[1, 1] = -2.0
    assert np.abs(out - expect).max() < 1e-14


def test_rhs_traceless_random():
    for _ in range(5):
        rho = random_density(7, RNG)
        hm = RNG.normal(size=(7, 7)) + 1j * RNG.normal(size=(7, 7))
        h = fock.Operator(hm + hm.conj().T, (7,))
        chans = [
            dy.LindbladChannel(rate=0.7, operator=fock.annihilation(7)),
            dy.LindbladChannel(rate=0.3, operator=fock.number(7)),
        ]
        out = dy.lindblad_rhs(rho, h, chans)
        assert abs(np.trace(out)) < 1e-10


def test_rhs_shape_mismatch():
    rho = random_density(6, RNG)
    with pytest.raises(ShapeMismatchError):
        dy.lindblad_rhs(rho, fock.Operator(np.zeros((4, 4), dtype=complex), (4,)), [])


# ---------------------------------------------------------------------------
# adiabatic evolution


def test_adiabatic_vacuum_stationary_without_drive():
    p = dy.AdiabaticParams(two_photon_pump=0.0, two_photon_loss=0.2)
    out = dy.evolve_adiabatic(vacuum(12), p, t_final=5.0)
    assert abs(out.data[0, 0] - 1.0) < 1e-10


def test_adiabatic_reaches_steady_cat():
    # relaxation rate is |alpha|^2 * two_photon_loss = 0.4, so t = 80 is
    # deep in the steady regime
    p = dy.AdiabaticParams(two_photon_pump=0.2, two_photon_loss=0.1)
    out = dy.evolve_adiabatic(vacuum(30), p, t_final=80.0)
    assert an.fidelity(out, 2j) > 0.99


def test_adiabatic_conserves_parity_and_trace():
    p = dy.AdiabaticParams(two_photon_pump=0.15, two_photon_loss=0.1)
    final, samples = dy.evolve_adiabatic(
        vacuum(20), p, t_final=6.0, sample_times=[0.0, 2.0, 4.0, 6.0]
    )
    assert len(samples) == 4
    for t, s in samples:
        assert abs(np.trace(s.data).real - 1.0) < 1e-8
        assert abs(an.parity_expectation(s) - 1.0) < 1e-8
    assert abs(an.parity_expectation(final) - 1.0) < 1e-8


def test_adiabatic_rejects_unstable_step():
    p = dy.AdiabaticParams(two_photon_pump=0.2, two_photon_loss=0.1)
    with pytest.raises(IntegratorError) as e:
        dy.evolve_adiabatic(vacuum(25), p, t_final=1.0, dt=0.5)
    assert "stable_dt" in e.value.diagnostics


def test_adiabatic_complex_pump_rotates_cat_axis():
    # pump phase e^{i phi} rotates the steady cat amplitude by phi/2
    p = dy.AdiabaticParams(two_photon_pump=0.2 * np.exp(0.6j), two_photon_loss=0.1)
    out = dy.evolve_adiabatic(vacuum(30), p, t_final=80.0)
    alpha = p.steady_amplitude()
    assert an.fidelity(out, alpha) > 0.99


def test_params_from_pump_closed_forms():
    p = dy.adiabatic_params_from_pump(omega_p=0.0, g_nl=1.0, gamma_p=60.0)
    assert p.two_photon_pump == 0.0
    p = dy.adiabatic_params_from_pump(omega_p=2.0, g_nl=1.0, gamma_p=60.0)
    assert p.two_photon_loss == pytest.approx(1.0 / 15.0, rel=1e-12)
    assert p.two_photon_pump == pytest.approx(4.0 / 60.0, rel=1e-12)
    p2 = dy.adiabatic_params_from_pump(omega_p=2.0, g_nl=2.0, gamma_p=60.0)
    assert p2.two_photon_loss == pytest.approx(4.0 * p.two_photon_loss, rel=1e-12)
    with pytest.raises(InvalidParameterError):
        dy.adiabatic_params_from_pump(omega_p=1.0, g_nl=1.0, gamma_p=0.0)


# ---------------------------------------------------------------------------
# joint propagator


def test_pair_exchange_conserves_combined_excitation():
    da, db = 10, 6
    h = dy.pair_exchange_hamiltonian(da, db).data
    na = np.kron(np.diag(np.arange(da)), np.eye(db))
    nb = np.kron(np.eye(da), np.diag(np.arange(db)))
    q = na + 2 * nb
    assert np.abs(h @ q - q @ h).max() == 0.0


def test_propagator_matches_dense_exponential():
    from scipy.linalg import expm

    da, db, phase = 12, 7, 0.7
    h = dy.pair_exchange_hamiltonian(da, db).data
    u_ref = expm(-1j * phase * h)
    u_exp = dy.cycle_propagator(phase, da, db, method="expm").data
    assert np.abs(u_exp - u_ref).max() < 1e-12
    # fixed-step RK4 converges to the exponential as steps refine; the
    # fastest (highest-excitation) sectors set the matrix-level error
    u_rk4 = dy.cycle_propagator(phase, da, db, method="rk4", n_steps=6000).data
    assert np.abs(u_rk4 - u_ref).max() < 1e-9


def test_rk4_and_exponential_cycles_agree_on_states():
    # at the default step count the integrator error lives in high
    # excitation sectors the state never reaches
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j)
    rho = fock.cat_state(1.4, 24).density()
    out_rk4 = dy.unitary_cycle(rho, cfg, pump_dim=14, method="rk4")
    out_exp = dy.unitary_cycle(rho, cfg, pump_dim=14, method="expm")
    assert np.abs(out_rk4.data - out_exp.data).max() < 1e-8


def test_propagator_unitary():
    u = dy.cycle_propagator(0.5, 14, 8, method="expm").data
    assert np.abs(u.conj().T @ u - np.eye(14 * 8)).max() < 1e-10
    u2 = dy.cycle_propagator(0.5, 14, 8).data
    assert np.abs(u2.conj().T @ u2 - np.eye(14 * 8)).max() < 1e-3


def test_propagator_rejects_unknown_method():
    with pytest.raises(InvalidParameterError):
        dy.cycle_propagator(0.5, 8, 6, method="euler")


# ---------------------------------------------------------------------------
# cycle maps


def test_unitary_cycle_requires_lossless_config():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j, signal_loss=0.1)
    with pytest.raises(InvalidParameterError):
        dy.unitary_cycle(vacuum(10), cfg)


def test_unitary_cycle_identity_without_pump():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=0.0)
    out = dy.unitary_cycle(vacuum(12), cfg)
    assert abs(out.data[0, 0] - 1.0) < 1e-12


def test_unitary_cycle_preserves_parity():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j)
    rho = random_density(16, RNG, even_only=True, levels=10)
    out = dy.unitary_cycle(rho, cfg)
    assert abs(an.parity_expectation(out) - an.parity_expectation(rho)) < 1e-7


def test_unitary_cycle_pump_truncation_guard():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=3.0)
    with pytest.raises(TruncationError) as e:
        dy.unitary_cycle(vacuum(10), cfg, pump_dim=20)
    assert e.value.required_dim >= 36


# frozen one-cycle results, prototype run with dense-exponential propagation
# at several dims (stable to shown digits): best cat fit with the magnitude
# search floored at 1.2, and the unfloored fit for comparison
ONE_CYCLE_F_FLOORED = 0.8944284804
ONE_CYCLE_F_FREE = 0.934986
ONE_CYCLE_R_FREE = 0.975


def test_one_cycle_half_phase_fit():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j)
    out = dy.unitary_cycle(vacuum(30), cfg)
    fit = an.optimal_cat(out)
    assert fit.hit_lower_bound
    assert fit.f_max == pytest.approx(ONE_CYCLE_F_FLOORED, abs=5e-5)
    free = an.optimal_cat(out, alpha_min=0.5)
    assert not free.hit_lower_bound
    assert free.f_max == pytest.approx(ONE_CYCLE_F_FREE, abs=1e-3)
    assert abs(free.alpha_opt) == pytest.approx(ONE_CYCLE_R_FREE, abs=2e-2)


def test_lossless_lossy_cycle_matches_unitary():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j)
    rho = random_density(14, RNG, even_only=True, levels=8)
    # exact-exponential reference; the joint integrator's O(h^4) error at
    # this refinement sits below the tolerance for states this size
    ref = dy.unitary_cycle(rho, cfg, pump_dim=12, method="expm")
    out = dy.lossy_cycle(rho, cfg, pump_dim=12, use_jit=False, n_steps=800)
    assert np.abs(out.data - ref.data).max() < 1e-8
    # physical trajectory state at default resolution
    vac = vacuum(14)
    ref_v = dy.unitary_cycle(vac, cfg, pump_dim=12)
    out_v = dy.lossy_cycle(vac, cfg, pump_dim=12, use_jit=False)
    assert np.abs(out_v.data - ref_v.data).max() < 1e-8


@pytest.mark.skipif(not dy._HAVE_JIT, reason="numba unavailable")
def test_jit_and_numpy_joint_integrators_agree():
    da, db = 9, 6
    rho = random_density(da, RNG)
    c = fock.coherent_amplitudes(-0.8j, db)
    r4 = np.einsum("ij,mn->imjn", rho.data, np.outer(c, c.conj()))
    a = dy.evolve_joint_lossy(r4, 0.4, da, db, 0.3, 0.2, n_steps=64, use_jit=True)
    b = dy.evolve_joint_lossy(r4, 0.4, da, db, 0.3, 0.2, n_steps=64, use_jit=False)
    assert np.abs(a - b).max() < 1e-12


def test_lossy_cycle_decays_photons():
    cfg_hi = dy.CycleConfig(phase=0.5, pump_amplitude=-1j, signal_loss=1.0)
    cfg_no = dy.CycleConfig(phase=0.5, pump_amplitude=-1j)
    rho = fock.cat_state(1.5, 14).density()
    lossy = dy.lossy_cycle(rho, cfg_hi, pump_dim=10, use_jit=False)
    clean = dy.unitary_cycle(rho, cfg_no, pump_dim=10)
    assert an.mean_photons(lossy) < an.mean_photons(clean)


def test_lossy_cycle_preserves_trace():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j, signal_loss=0.2, pump_loss=0.1)
    rho = random_density(10, RNG)
    out = dy.lossy_cycle(rho, cfg, pump_dim=8, use_jit=False)
    assert abs(np.trace(out.data).real - 1.0) < 1e-9


# ---------------------------------------------------------------------------
# effective parameters and generator equivalence


def test_second_order_params_worked_example():
    cfg = dy.CycleConfig(phase=0.1, pump_amplitude=-0.2j, cycle_ratio=1.0)
    p = dy.second_order_params(cfg)
    assert p.two_photon_pump == pytest.approx(0.2, abs=1e-14)
    assert p.two_photon_loss == pytest.approx(0.1, abs=1e-14)
    assert p.steady_amplitude() == pytest.approx(2j, abs=1e-12)


def test_second_order_params_zero_pump():
    cfg = dy.CycleConfig(phase=0.1, pump_amplitude=0.0)
    p = dy.second_order_params(cfg)
    assert p.two_photon_pump == 0.0
    assert p.two_photon_loss == pytest.approx(0.1, abs=1e-14)


def test_second_order_params_cycle_ratio_scaling():
    c1 = dy.CycleConfig(phase=0.1, pump_amplitude=-0.2j, cycle_ratio=1.0)
    c2 = dy.CycleConfig(phase=0.1, pump_amplitude=-0.2j, cycle_ratio=2.0)
    p1, p2 = dy.second_order_params(c1), dy.second_order_params(c2)
    assert p2.two_photon_pump == pytest.approx(p1.two_photon_pump / 2, abs=1e-14)
    assert p2.two_photon_loss == pytest.approx(p1.two_photon_loss / 2, abs=1e-14)


def _effective_generator(rho, cfg):
    p = dy.second_order_params(cfg)
    dim = rho.dims[0]
    a2 = (fock.annihilation(dim) @ fock.annihilation(dim)).data
    # -S[a'^2 - a^2, rho] written as -i[H, rho] with H = -iS(a'^2 - a^2),
    # Hermitian for the purely real S this configuration produces
    h = fock.Operator(-1j * p.two_photon_pump * (a2.conj().T - a2), (dim,))
    ch = dy.LindbladChannel(rate=p.two_photon_loss, operator=fock.Operator(a2, (dim,)))
    return dy.lindblad_rhs(rho, h, [ch])


def _equivalence_error(rho, phase):
    cfg = dy.CycleConfig(phase=phase, pump_amplitude=-2j * phase, cycle_ratio=1.0)
    out = dy.unitary_cycle(rho, cfg, pump_dim=16)
    fd = (out.data - rho.data) / cfg.cycle_time
    gen = _effective_generator(rho, cfg)
    return np.linalg.norm(fd - gen) / np.linalg.norm(gen)


def test_cycle_map_matches_effective_generator_at_small_phase():
    rho = random_density(14, RNG, even_only=True)
    e1 = _equivalence_error(rho, 0.01)
    e2 = _equivalence_error(rho, 0.005)
    assert e1 < 1e-2
    assert e1 / e2 > 1.8


def test_correction_channel_tightens_the_generator():
    # at fixed finite pump amplitude and small phase, the dropped-term
    # contribution dominates the two-term residual, so keeping it must
    # shrink the error by a clear factor
    rho = random_density(14, RNG, even_only=True)
    cfg = dy.CycleConfig(phase=0.005, pump_amplitude=-0.5j, cycle_ratio=1.0)
    out = dy.unitary_cycle(rho, cfg, pump_dim=18)
    fd = (out.data - rho.data) / cfg.cycle_time
    gen = _effective_generator(rho, cfg)
    corr = dy.second_order_correction_channel(cfg, 14)
    h0 = fock.Operator(np.zeros((14, 14), dtype=complex), (14,))
    gen_corr = gen + dy.lindblad_rhs(rho, h0, [corr])
    scale = np.linalg.norm(gen)
    assert np.linalg.norm(fd - gen_corr) < 0.5 * np.linalg.norm(fd - gen)
    assert np.linalg.norm(fd - gen_corr) / scale < 2e-2


# ---------------------------------------------------------------------------
# trajectories


def test_synchronous_states_start_at_vacuum():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j, n_cycles=3)
    states = list(dy.synchronous_states(cfg, signal_dim=20))
    assert len(states) == 4
    n0, rho0 = states[0]
    assert n0 == 0 and abs(rho0.data[0, 0] - 1.0) < 1e-12


def test_run_synchronous_records():
    cfg = dy.CycleConfig(phase=0.5, pump_amplitude=-1j, n_cycles=6)
    recs = dy.run_synchronous(cfg, signal_dim=30)
    assert len(recs) == 6
    assert [r.time for r in recs] == pytest.approx([0.5 * n for n in range(1, 7)])
    assert recs[0].f_max == pytest.approx(ONE_CYCLE_F_FLOORED, abs=5e-5)
    assert recs[-1].f_max > recs[0].f_max
    for r in recs:
        assert 0.0 <= r.f_max <= 1.0 + 1e-10
        assert r.purity <= 1.0 + 1e-9


def test_run_synchronous_lossy_path_smoke():
    cfg = dy.CycleConfig(
        phase=0.5, pump_amplitude=-1j, signal_loss=0.1, n_cycles=2
    )
    recs = dy.run_synchronous(cfg, signal_dim=16, pump_dim=10, n_steps=60)
    assert len(recs) == 2
    assert recs[0].f_max > 0.5


# ---------------------------------------------------------------------------
# property-based invariants


@settings(max_examples=60, deadline=None)
@given(
    phase=st.sampled_from([0.1, 0.25, 0.5]),
    amp=st.complex_numbers(max_magnitude=1.2, allow_nan=False, allow_infinity=False),
    seed=st.integers(0, 2**31 - 1),
)
def test_unitary_cycle_invariants(phase, amp, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(12, rng, even_only=True, levels=6)
    cfg = dy.CycleConfig(phase=phase, pump_amplitude=amp)
    out = dy.unitary_cycle(rho, cfg, pump_dim=12)
    assert abs(np.trace(out.data).real - 1.0) < 1e-7
    assert np.abs(out.data - out.data.conj().T).max() < 1e-10
    assert np.linalg.eigvalsh(out.data).min() > -1e-6
    assert abs(an.parity_expectation(out) - an.parity_expectation(rho)) < 1e-7


@settings(max_examples=25, deadline=None)
@given(
    gs=st.floats(0.0, 0.5),
    gp=st.floats(0.0, 0.5),
    seed=st.integers(0, 2**31 - 1),
)
def test_lossy_cycle_invariants(gs, gp, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(9, rng)
    cfg = dy.CycleConfig(phase=0.3, pump_amplitude=-0.6j, signal_loss=gs, pump_loss=gp)
    out = dy.lossy_cycle(rho, cfg, pump_dim=7, n_steps=60, use_jit=False)
    assert abs(np.trace(out.data).real - 1.0) < 1e-8
    assert np.abs(out.data - out.data.conj().T).max() < 1e-9
    assert np.linalg.eigvalsh(out.data).min() > -1e-6
