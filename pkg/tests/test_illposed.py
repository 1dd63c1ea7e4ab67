"""The two-mode slab family and its scaling collision."""

import math

import numpy as np
import pytest

from dcl.bourgain import ws_norm
from dcl.illposed import (
    CollisionReport,
    CounterexampleConfig,
    build_counterexample,
    collision_scan,
    duhamel_weighted_bilinear,
)
from dcl.lattice import bracket
from dcl.symbols import dispersion_symbol


def brute_duhamel(u1, u2, s):
    """Enumerate the four support pairings directly and take the composite norm."""
    p = u1.params
    j = p.j
    dtau = u1.dtau
    tau0 = u1.tau0 + u2.tau0
    out = {}
    cells1 = [(n, m0 + i, a) for n, m0, arr, _ in u1.cells() for i, a in enumerate(arr)]
    cells2 = [(n, m0 + i, a) for n, m0, arr, _ in u2.cells() for i, a in enumerate(arr)]
    for n1, m1, a1 in cells1:
        for n2, m2, a2 in cells2:
            n = n1 + n2
            if n == 0 or abs(n) > p.nmax:
                continue
            mult = 0.5j * n + (1j * n / (1 + n * n)) * (1 + 0.5 * (1j * n1) * (1j * n2))
            key = (n, m1 + m2)
            out[key] = out.get(key, 0j) + a1 * a2 * mult * dtau
    xsb2 = 0.0
    l1 = {}
    for (n, m), a in out.items():
        sig = (tau0 + m * dtau) - dispersion_symbol(n, j)
        val = a / bracket(sig)
        xsb2 += bracket(n) ** (2 * s) * bracket(sig) * abs(val) ** 2 * dtau
        l1[n] = l1.get(n, 0.0) + abs(val) * dtau
    ys2 = sum(bracket(n) ** (2 * s) * v**2 for n, v in l1.items())
    return math.sqrt(xsb2) + math.sqrt(ys2)


class TestBuildCounterexample:
    def test_supports(self):
        u1, u2 = build_counterexample(2, 2)
        assert sorted(u1.bands) == [-2, 2]
        assert sorted(u2.bands) == [-1, 1]

    def test_unit_amplitudes_on_slab(self):
        u1, _ = build_counterexample(4, 2, dtau=0.125)
        for n, m0, arr, sig in u1.cells():
            assert np.all(arr == 1.0)
            assert len(arr) == 16  # tiles [-1, 1] at dtau = 1/8
            assert np.abs(sig).max() <= 1.0

    def test_hermitian_symmetry(self):
        for N in (2, 5):
            u1, u2 = build_counterexample(N, 2)
            assert u1.is_hermitian() and u2.is_hermitian()

    def test_slab_narrower_than_dtau_rejected(self):
        with pytest.raises(ValueError, match="narrower"):
            build_counterexample(4, 2, dtau=4.0)
        with pytest.raises(ValueError):
            build_counterexample(1, 2)

    def test_ws_scaling_slope(self):
        s, j = -0.25, 2
        Ns = (16, 32, 64, 128, 256)
        logs = [math.log(ws_norm(build_counterexample(N, j)[0], s)) for N in Ns]
        slope = np.polyfit(np.log(Ns), logs, 1)[0]
        assert slope == pytest.approx(s, abs=0.05)


class TestDuhamelWeighted:
    def test_zero_like_empty_interaction(self, params8):
        from dcl.bourgain import SpaceTimeSpectrum

        empty = SpaceTimeSpectrum(params8, 0.125)
        with pytest.warns(UserWarning, match="do not interact"):
            val = duhamel_weighted_bilinear(empty, empty, -0.25)
        assert val == 0.0

    def test_desk_scale_oracle(self):
        for j, s in ((2, -0.25), (3, -1.0)):
            u1, u2 = build_counterexample(4, j)
            got = duhamel_weighted_bilinear(u1, u2, s)
            want = brute_duhamel(u1, u2, s)
            assert got == pytest.approx(want, abs=1e-10)

    def test_growth_slope_matches_two_minus_j(self):
        for j, s, want in ((2, -0.25, 0.0), (3, -1.0, -1.0)):
            Ns = (16, 32, 64, 128, 256)
            logs = []
            for N in Ns:
                u1, u2 = build_counterexample(N, j)
                logs.append(math.log(duhamel_weighted_bilinear(u1, u2, s)))
            slope = np.polyfit(np.log(Ns), logs, 1)[0]
            assert slope == pytest.approx(want, abs=0.1)


class TestCollisionScan:
    def test_breaks_below_critical(self):
        rep = collision_scan(CounterexampleConfig(j=2, s=-0.25, N_list=(16, 32, 64, 128)))
        assert rep.verdict == "BREAKS"
        assert rep.slope_L == pytest.approx(0.0, abs=0.1)
        assert rep.slope_R == pytest.approx(-0.5, abs=0.1)

    def test_holds_above_critical(self):
        rep = collision_scan(CounterexampleConfig(j=2, s=0.25, N_list=(16, 32, 64, 128)))
        assert rep.verdict == "HOLDS-AT-THIS-PROBE"

    def test_inconclusive_band_near_critical(self):
        rep = collision_scan(CounterexampleConfig(j=2, s=0.01, N_list=(16, 32, 64)))
        assert rep.verdict == "INCONCLUSIVE"

    def test_j3_breaks(self):
        rep = collision_scan(CounterexampleConfig(j=3, s=-1.0, N_list=(16, 32, 64)))
        assert rep.verdict == "BREAKS"
        assert rep.slope_L == pytest.approx(-1.0, abs=0.1)
        assert rep.slope_R == pytest.approx(-2.0, abs=0.1)

    def test_fewer_than_three_is_raw_table(self):
        rep = collision_scan(CounterexampleConfig(j=2, s=-0.25, N_list=(16, 32)))
        assert rep.verdict is None and rep.slope_L is None
        assert len(rep.rows) == 2

    def test_dtau_halving_stability(self):
        a = collision_scan(CounterexampleConfig(j=2, s=-0.25, N_list=(16, 64, 256), dtau=0.125))
        b = collision_scan(CounterexampleConfig(j=2, s=-0.25, N_list=(16, 64, 256), dtau=0.0625))
        assert a.slope_L == pytest.approx(b.slope_L, abs=0.01)
        assert a.verdict == b.verdict

    def test_csv_format(self):
        rep = collision_scan(CounterexampleConfig(j=2, s=-0.25, N_list=(16, 32, 64)))
        lines = rep.csv().splitlines()
        assert lines[0] == "N,L,R,logN,logL,logR"
        assert len(lines) == 4

    def test_report_dict_keys(self):
        rep = collision_scan(CounterexampleConfig(j=2, s=-0.25, N_list=(16, 32, 64)))
        doc = rep.to_dict()
        assert {"j", "s", "slopeL", "slopeR", "verdict", "rows"} <= set(doc)
