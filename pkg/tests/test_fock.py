import numpy as np
import pytest
from scipy.stats import poisson as sp_poisson

from ncdist.errors import DimensionTooLarge, NumericalInconsistency, TruncationTooSmall
from ncdist.fock import (
    DensityMatrix,
    FockVector,
    TruncationSpec,
    beam_splitter,
    coherent_amps,
    displacement,
    mean_total_energy,
    minimal_cutoff_for_tail,
    mode_means,
    number_basis_vector,
    outer,
    overlap,
    partial_trace,
    passive_unitary,
    poisson_pmf,
    poisson_tail,
    tensor,
)


def test_trunc_basic():
    t = TruncationSpec((3, 5))
    assert t.dim == 24
    assert t.shape == (4, 6)
    assert t.index((3, 5)) == 23
    assert t.index((1, 0)) == 6  # mode 1 varies slowest
    assert t.unravel(6) == (1, 0)


def test_trunc_rejects_zero_cutoff():
    with pytest.raises(ValueError):
        TruncationSpec((0, 3))


def test_trunc_dimension_cap():
    with pytest.raises(DimensionTooLarge):
        TruncationSpec((2000, 2000))


def test_totals():
    t = TruncationSpec((2, 1))
    assert list(t.totals()) == [0, 1, 1, 2, 2, 3]


def test_coherent_single_mode_values():
    # direct-formula references: a^n e^{-|a|^2/2} / sqrt(n!) at a = 1
    t = TruncationSpec((6,), tail_tol=1e-4)
    v = coherent_amps(1.0, t)
    assert v.amps[0] == pytest.approx(0.60653065971263342, abs=1e-15)
    assert v.amps[1] == pytest.approx(0.60653065971263342, abs=1e-15)
    assert v.amps[2] == pytest.approx(0.42888194248035338, abs=1e-15)
    assert v.amps[3] == pytest.approx(0.24761510494160166, abs=1e-15)
    assert v.amps[6] == pytest.approx(0.022604063092587359, abs=1e-15)


def test_coherent_norm_defect_is_exact_poisson_tail():
    t = TruncationSpec((6,), tail_tol=1e-3)
    v = coherent_amps(1.0, t)
    assert v.norm_defect() == pytest.approx(8.3241149288038052e-05, abs=1e-12)
    # and the gammainc route agrees with scipy.stats.poisson
    assert poisson_tail(6, 1.0) == pytest.approx(
        1.0 - float(sp_poisson.cdf(6, 1.0)), abs=1e-15
    )


def test_coherent_two_mode_value_and_defect():
    t = TruncationSpec((6, 6), tail_tol=1e-3)
    v = coherent_amps([1.0, 1.0j], t)
    assert v.amps[1, 1] == pytest.approx(0.36787944117144233j, abs=1e-15)
    assert v.norm_defect() == pytest.approx(0.00016647536948710684, abs=1e-12)


def test_coherent_raises_with_sufficient_cutoffs():
    t = TruncationSpec((3,), tail_tol=1e-12)
    with pytest.raises(TruncationTooSmall) as exc:
        coherent_amps(2.0, t)
    sugg = exc.value.suggested_cutoffs
    assert sugg is not None and len(sugg) == 1
    assert poisson_tail(sugg[0], 4.0) <= 1e-12
    # suggested cutoff is minimal
    assert poisson_tail(sugg[0] - 1, 4.0) > 1e-12


def test_minimal_cutoff_for_tail_bisection():
    for energy in [0.3, 1.0, 4.0, 17.2]:
        n = minimal_cutoff_for_tail(energy, 1e-12)
        assert poisson_tail(n, energy) <= 1e-12
        assert n == 1 or poisson_tail(n - 1, energy) > 1e-12


def test_poisson_pmf_matches_scipy():
    pm = poisson_pmf(2.5, 12)
    ref = sp_poisson.pmf(np.arange(13), 2.5)
    assert np.abs(pm - ref).max() < 1e-14
    assert pm[4] == pytest.approx(0.13360188578108528, abs=1e-15)


def test_number_vector_and_overlap():
    t = TruncationSpec((4, 4))
    v = number_basis_vector((2, 3), t)
    assert v.norm_defect() == 0.0
    w = coherent_amps([0.5, 0.5], TruncationSpec((4, 4), tail_tol=1e-2))
    ov = overlap(v, w)
    # <2,3|a,a> = (a^2/sqrt(2))(a^3/sqrt(6)) e^{-(|a|^2+|a|^2)/2}
    ref = (0.25 / np.sqrt(2)) * (0.125 / np.sqrt(6)) * np.exp(-0.25)
    assert ov == pytest.approx(ref, abs=1e-15)


def test_pad_preserves_amplitudes():
    t = TruncationSpec((2,))
    v = number_basis_vector((1,), t)
    w = v.pad(TruncationSpec((5,)))
    assert w.amps[1] == 1.0
    assert w.norm() == pytest.approx(1.0)


def test_outer_and_partial_trace_roundtrip():
    ta = TruncationSpec((2,))
    tb = TruncationSpec((3,))
    a = coherent_amps(0.3, TruncationSpec((2,), tail_tol=1e-2))
    b = number_basis_vector((2,), tb)
    ra, rb = outer(a), outer(b)
    joint = tensor(ra, rb)
    back_a = partial_trace(joint, (0,))
    back_b = partial_trace(joint, (1,))
    # partial trace of a product recovers each factor scaled by the other's trace
    assert np.abs(back_a.mat - ra.mat * rb.trace()).max() < 1e-14
    assert np.abs(back_b.mat - rb.mat * ra.trace()).max() < 1e-14
    assert back_a.trace() == pytest.approx(ra.trace() * rb.trace(), abs=1e-14)


def test_density_requires_hermitian():
    t = TruncationSpec((1,))
    bad = np.array([[1.0, 0.5], [0.0, 0.0]], dtype=complex)
    with pytest.raises(NumericalInconsistency):
        DensityMatrix(t, bad)


def test_mode_means_and_energy():
    t = TruncationSpec((8, 8), tail_tol=1e-6)
    v = coherent_amps([0.7, -0.2 + 0.4j], t)
    mm = mode_means(v)
    assert mm[0] == pytest.approx(0.7, abs=1e-7)
    assert mm[1] == pytest.approx(-0.2 + 0.4j, abs=1e-7)
    assert mean_total_energy(v) == pytest.approx(0.49 + 0.2, abs=1e-7)
    rho = outer(v)
    mm2 = mode_means(rho)
    assert np.abs(mm2 - mm).max() < 1e-12
    assert mean_total_energy(rho) == pytest.approx(mean_total_energy(v), abs=1e-12)


def test_hong_ou_mandel():
    t = TruncationSpec((2, 2))
    w = passive_unitary(beam_splitter(0.5), t)
    psi = w.apply_vec(number_basis_vector((1, 1), t))
    s = 0.70710678118654746
    assert psi.amps[2, 0] == pytest.approx(s, abs=1e-12)
    assert psi.amps[0, 2] == pytest.approx(-s, abs=1e-12)
    assert abs(psi.amps[1, 1]) < 1e-12
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)


def test_passive_unitary_blocks_are_unitary():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    q, r = np.linalg.qr(g)
    u = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    t = TruncationSpec((3, 3, 3))
    w = passive_unitary(u, t)
    defects = w.block_unitarity_defects()
    for tt in w.complete_block_totals():
        assert defects[tt] < 1e-10


def test_passive_unitary_single_mode_phase():
    t = TruncationSpec((5,))
    phi = 0.37
    w = passive_unitary(np.array([[np.exp(1j * phi)]]), t)
    v = FockVector(t, np.ones(6) / np.sqrt(6))
    out = w.apply_vec(v)
    ref = v.amps * np.exp(1j * phi * np.arange(6))
    assert np.abs(out.amps - ref).max() < 1e-12


def test_passive_unitary_preserves_coherent_states():
    # W|alpha> = |U alpha> for a passive interferometer
    rng = np.random.default_rng(11)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, _ = np.linalg.qr(g)
    t = TruncationSpec((14, 14), tail_tol=1e-8)
    alpha = np.array([0.5, -0.3 + 0.2j])
    before = coherent_amps(alpha, t)
    w = passive_unitary(q, t)
    after = w.apply_vec(before)
    ref = coherent_amps(q @ alpha, t)
    assert np.linalg.norm(after.flat - ref.flat) < 1e-6


def test_displacement_moves_vacuum_and_inverts():
    t = TruncationSpec((24,), tail_tol=1e-12)
    d = displacement(0.8, t)
    vac = number_basis_vector((0,), t)
    moved = d.apply_vec(vac)
    ref = coherent_amps(0.8, t)
    assert np.linalg.norm(moved.flat - ref.flat) < 1e-9
    # inverse displacement undoes it on a non-vacuum state too
    one = number_basis_vector((1,), t)
    back = displacement(-0.8, t).apply_vec(d.apply_vec(one))
    assert np.linalg.norm(back.flat - one.flat) < 1e-8
    # cropping makes the columns near the cutoff lossy, but the operator must
    # act unitarily on the low-lying ladder
    dd = d.mats[0].conj().T @ d.mats[0]
    assert np.abs(dd[:10, :10] - np.eye(10)).max() < 1e-10
    assert d.meta["vacuum_check_sq_error"] < 1e-11


def test_displacement_rejects_small_cutoff():
    with pytest.raises(TruncationTooSmall):
        displacement(3.0, TruncationSpec((4,), tail_tol=1e-12))


def test_displacement_on_density_matches_vector_route():
    t = TruncationSpec((18,), tail_tol=1e-10)
    d = displacement(0.4 - 0.3j, t)
    psi = number_basis_vector((2,), t)
    via_vec = outer(d.apply_vec(psi))
    via_mat = d.apply_density(outer(psi))
    assert np.abs(via_vec.mat - via_mat.mat).max() < 1e-10


def test_tensor_vectors_row_major_layout():
    a = number_basis_vector((1,), TruncationSpec((2,)))
    b = number_basis_vector((2,), TruncationSpec((3,)))
    v = tensor(a, b)
    assert v.trunc.cutoffs == (2, 3)
    assert v.flat[v.trunc.index((1, 2))] == 1.0
