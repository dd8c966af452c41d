import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ana_sdof.ana_schemes import (
    PhasePlan,
    SchemeKind,
    UnsupportedConfigError,
    alignment_precoder,
    build_precoders,
    build_scheme,
    phase_plan,
    sample_transmissions,
    transmit_signals,
)
from ana_sdof.channel_model import block_diag_channels, sample_states
from ana_sdof.dof_analysis import is_invertible
from ana_sdof.sdof_theory import AntennaConfig

from conftest import antenna_configs

W3, P2, BCC, MISO = (
    SchemeKind.WIRETAP_THREE_PHASE,
    SchemeKind.WIRETAP_PARTIAL_TWO_PHASE,
    SchemeKind.BCC_FOUR_PHASE,
    SchemeKind.MISO_FOUR_SLOT,
)
GOLDEN = json.loads((Path(__file__).parent / "golden" / "layouts.json").read_text())


def make(kind, cfg, seed=1, normalize=True):
    plan = phase_plan(kind, cfg)
    r = sample_states(cfg.capped(), plan.total, seed)
    return build_scheme(kind, cfg, r, build_precoders(kind, cfg, plan), normalize=normalize)


def is_permutation(p):
    return (
        set(np.unique(p)) <= {0.0, 1.0}
        and np.all(p.sum(axis=0) == 1)
        and np.all(p.sum(axis=1) == 1)
    )


class TestPhasePlans:
    def test_tables(self):
        assert phase_plan(W3, AntennaConfig(5, 3, 2)).taus == (6, 9, 6)
        assert phase_plan(W3, AntennaConfig(2, 1, 1)).taus == (1, 1, 1)
        assert phase_plan(BCC, AntennaConfig(5, 3, 2)).taus == (6, 9, 4, 6)
        assert phase_plan(P2, AntennaConfig(5, 3, 2)).taus == (6, 9)
        assert phase_plan(MISO, AntennaConfig(2, 1, 1)).taus == (1, 1, 1, 1)

    def test_capped(self):
        assert phase_plan(W3, AntennaConfig(9, 3, 2)) == phase_plan(W3, AntennaConfig(5, 3, 2))

    @given(antenna_configs(m_max=10, above=True))
    def test_totals(self, cfg):
        m, nA, nB = cfg.m_eff, cfg.nA, cfg.nB
        assert phase_plan(W3, cfg).total == nA * nB + m * (m - nB)
        assert phase_plan(BCC, cfg).total == m * m

    def test_phase_slots(self):
        plan = PhasePlan((2, 0, 3))
        assert list(plan.phase_slots(0)) == [0, 1]
        assert list(plan.phase_slots(1)) == []
        assert list(plan.phase_slots(2)) == [2, 3, 4]

    @pytest.mark.parametrize("kind, c", [(W3, (3, 3, 2)), (BCC, (2, 2, 1)), (MISO, (3, 1, 1)), (P2, (1, 1, 1))])
    def test_unsupported(self, kind, c):
        with pytest.raises(UnsupportedConfigError):
            phase_plan(kind, AntennaConfig(*c))


class TestPrecoders:
    def test_wiretap_shapes(self):
        cfg = AntennaConfig(5, 3, 2)
        pre = build_precoders(W3, cfg, phase_plan(W3, cfg))
        assert pre.theta.shape == (45, 18)
        assert pre.phi.shape == (30, 18)

    def test_plan_mismatch(self):
        cfg = AntennaConfig(5, 3, 2)
        with pytest.raises(ValueError):
            build_precoders(W3, cfg, PhasePlan((1, 1, 1)))

    @given(antenna_configs(m_max=7, n_max=4, above=True), st.sampled_from([W3, BCC]))
    @settings(max_examples=40)
    def test_permutation_identities(self, cfg, kind):
        pre = build_precoders(kind, cfg, phase_plan(kind, cfg))
        m = cfg.m_eff
        for name, perm in pre.permutations.items():
            assert is_permutation(perm)
            assert np.array_equal(perm @ perm.T, np.eye(perm.shape[0]))
            prec = getattr(pre, name)
            width = pre.block_width[name]
            slots = prec.shape[0] // m
            lead = prec @ perm
            blocks = np.zeros((m * slots, width * slots))
            for j in range(slots):
                blocks[j * m : j * m + width, j * width : (j + 1) * width] = np.eye(width)
            assert np.array_equal(lead[:, : width * slots], blocks)
            assert not lead[:, width * slots :].any()
            # each Theta_t = [I; 0] has full column rank
            assert np.linalg.matrix_rank(blocks) == width * slots

    def test_miso_theta_is_single_column(self):
        cfg = AntennaConfig(2, 1, 1)
        pre = build_precoders(MISO, cfg, phase_plan(MISO, cfg))
        for name in ("theta_A", "theta_B", "phi_A", "phi_B"):
            assert np.array_equal(getattr(pre, name), [[1.0], [0.0]])

    def test_permuted_h1_block_diagonal(self):
        cfg = AntennaConfig(5, 3, 2)
        plan = phase_plan(W3, cfg)
        pre = build_precoders(W3, cfg, plan)
        H1, _ = block_diag_channels(sample_states(cfg, plan.total, 3), plan.phase_slots(0))
        top = (pre.permutations["theta"].T @ H1)[: 2 * plan.taus[1]]
        k = cfg.m - cfg.nB
        for i in range(plan.taus[0]):
            rows = slice(i * k, (i + 1) * k)
            mask = np.ones(H1.shape[1], dtype=bool)
            mask[i * cfg.m : (i + 1) * cfg.m] = False
            assert not top[rows][:, mask].any()

    def test_alignment_precoder_size_check(self):
        with pytest.raises(ValueError):
            alignment_precoder(5, 3, 2, 2, 3, 2)


CASES = [
    (W3, (5, 3, 2)),
    (W3, (4, 3, 2)),
    (W3, (2, 1, 1)),
    (W3, (5, 2, 3)),
    (W3, (8, 3, 2)),
    (P2, (5, 3, 2)),
    (P2, (4, 3, 2)),
    (BCC, (5, 3, 2)),
    (BCC, (5, 2, 3)),
    (BCC, (4, 3, 2)),
    (MISO, (2, 1, 1)),
]


class TestBuildScheme:
    @pytest.mark.parametrize("kind, c", CASES)
    @pytest.mark.parametrize("normalize", [True, False])
    def test_routes_agree(self, kind, c, normalize):
        s = make(kind, AntennaConfig(*c), seed=4, normalize=normalize)
        for rx in ("A", "B"):
            block = s.observation_map(rx, "block")
            direct = s.observation_map(rx, "direct")
            assert block.shape == direct.shape
            # the routes differ only by a reordering of the observation rows
            dist = np.linalg.norm(block[:, None, :] - direct[None, :, :], axis=2)
            match = dist.argmin(axis=1)
            assert sorted(match) == list(range(len(direct)))
            assert np.max(dist[np.arange(len(block)), match]) < 1e-12

    @pytest.mark.parametrize("key", sorted(GOLDEN))
    def test_golden_layout(self, key):
        kind, *c = key.split()
        layout = make(SchemeKind(kind), AntennaConfig(*map(int, c))).layout()
        for field, value in GOLDEN[key].items():
            assert layout[field] == value, field

    @pytest.mark.parametrize("c, size", [((5, 3, 2), 63), ((4, 3, 2), 42)])
    def test_he_square_invertible(self, c, size):
        s = make(W3, AntennaConfig(*c))
        assert s.effective_legit.shape == (size, size)
        assert is_invertible(s.effective_legit)

    def test_bcc_effective_square(self):
        s = make(BCC, AntennaConfig(5, 3, 2))
        assert s.effective_legit.shape == (75, 75)
        assert is_invertible(s.effective_legit)
        t = make(BCC, AntennaConfig(5, 2, 3))
        assert t.effective_legit.shape == (50, 50) and t.effective_eaves.shape == (75, 75)
        assert is_invertible(t.effective_eaves)

    def test_zero_blocks_exact(self):
        s = make(W3, AntennaConfig(5, 3, 2))
        nA, t = 3, s.plan.taus
        assert not s.effective_legit[: nA * t[0], nA * t[0] :].any()
        assert np.array_equal(s.effective_legit[: nA * t[0], : nA * t[0]], np.eye(nA * t[0]))

    def test_extra_antennas_silent(self):
        cfg = AntennaConfig(7, 3, 2)
        s = make(W3, cfg)
        assert s.cfg == AntennaConfig(5, 3, 2)
        x = transmit_signals(s, 10.0, 0)
        assert x.shape == (s.plan.total, 7)
        assert not x[:, 5:].any()

    def test_short_realization_rejected(self):
        cfg = AntennaConfig(5, 3, 2)
        plan = phase_plan(W3, cfg)
        with pytest.raises(ValueError):
            build_scheme(W3, cfg, sample_states(cfg, plan.total - 1, 0), build_precoders(W3, cfg, plan))

    def test_receiver_mismatch_rejected(self):
        cfg = AntennaConfig(5, 3, 2)
        plan = phase_plan(W3, cfg)
        r = sample_states(AntennaConfig(5, 2, 3), plan.total, 0)
        with pytest.raises(ValueError):
            build_scheme(W3, cfg, r, build_precoders(W3, cfg, plan))

    def test_immutable(self):
        s = make(W3, AntennaConfig(2, 1, 1))
        with pytest.raises(ValueError):
            s.effective_legit[0, 0] = 2

    @pytest.mark.parametrize("kind, c", [(W3, (5, 3, 2)), (BCC, (5, 3, 2)), (MISO, (2, 1, 1)), (P2, (4, 3, 2))])
    def test_power_audit(self, kind, c):
        s = make(kind, AntennaConfig(*c), seed=2)
        P = 1e4
        x = sample_transmissions(s, P, symbol_seed=9, draws=10_000)
        assert np.mean(np.sum(np.abs(x) ** 2, axis=2)) <= P * 1.01
        # expected per-slot power, exactly: c_t^2 ||M_t||_F^2 P / m
        expected = s.slot_scales**2 * np.sum(np.abs(s.slot_maps) ** 2, axis=(1, 2)) * P / s.cfg.m_eff
        assert np.all(expected <= P * (1 + 1e-12))


class TestMisoReductions:
    def setup_method(self):
        self.s = make(MISO, AntennaConfig(2, 1, 1), seed=6, normalize=False)
        self.h = self.s.realization.H[:, 0, :]
        self.g = self.s.realization.G[:, 0, :]
        self.e1 = np.array([[1.0], [0.0]])

    def test_without_vb_phase_is_three_slot_wiretap(self):
        M = self.s.slot_maps
        # removing slot 2 (the vB phase) from the final combination leaves phi * z(slot 1)
        rest = M[3] - self.e1 @ (self.h[2] @ M[2])[None, :]
        assert np.allclose(rest, self.e1 @ (self.g[1] @ M[1])[None, :])
        # and slot 1 is theta * y(slot 0) + v, as in the wiretap scheme
        u, vA = self.s.source_slice("u"), self.s.source_slice("vA")
        assert np.allclose(M[1][:, u], self.e1 @ self.h[0][None, :])
        assert np.array_equal(M[1][:, vA], np.eye(2))

    def test_without_noise_is_mat(self):
        M = self.s.slot_maps
        u, vA, vB = (self.s.source_slice(n) for n in ("u", "vA", "vB"))
        for t in (1, 2, 3):
            M_t = M[t].copy()
            M_t[:, u] = 0
            if t == 1:
                assert np.array_equal(M_t[:, vA], np.eye(2)) and not M_t[:, vB].any()
            elif t == 2:
                assert np.array_equal(M_t[:, vB], np.eye(2)) and not M_t[:, vA].any()
            else:
                assert np.allclose(M_t[0, vA], self.g[1]) and np.allclose(M_t[0, vB], self.h[2])
                assert not M_t[1].any()
