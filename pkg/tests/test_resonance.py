"""Exact-arithmetic certificate for the interaction lower bound."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcl.resonance import (
    Triple,
    bound_num_den,
    certificate_json,
    classify_max_case,
    resonance_magnitude,
    scaled_triple_check,
    verify_resonance_bound,
)


class TestResonanceMagnitude:
    def test_worked_examples(self):
        assert resonance_magnitude(Triple(2, 1, 1), 2) == 30  # |32 - 1 - 1|
        assert resonance_magnitude(Triple(1, 2, -1), 2) == 30  # |1 - 32 + 1|

    def test_factor_swap_symmetry(self):
        assert resonance_magnitude(Triple(5, 2, 3), 3) == resonance_magnitude(Triple(5, 3, 2), 3)

    def test_invalid_triples_rejected(self):
        with pytest.raises(ValueError, match="interaction"):
            Triple(4, 1, 1)
        with pytest.raises(ValueError, match="nonzero"):
            Triple(2, 2, 0)

    def test_exact_at_wide_integers(self):
        t = Triple(2**16, 2**15, 2**15)
        v = resonance_magnitude(t, 4)
        assert v == abs(2**144 - 2 * 2**135)  # needs > 64 bits

    @given(k1=st.integers(-40, 40), k2=st.integers(-40, 40), j=st.integers(1, 4))
    @settings(max_examples=300, deadline=None)
    def test_swap_and_sign_flip_invariance(self, k1, k2, j):
        k = k1 + k2
        if 0 in (k, k1, k2):
            return
        t = Triple(k, k1, k2)
        assert resonance_magnitude(t, j) == resonance_magnitude(Triple(k, k2, k1), j)
        assert resonance_magnitude(t, j) == resonance_magnitude(Triple(-k, -k1, -k2), j)


class TestCertificate:
    def test_j2_box64_no_violations(self):
        rep = verify_resonance_bound(64, 2)
        assert rep["violations"] == 0
        assert rep["identity_failures"] == 0
        assert rep["min_slack"] >= 1.0
        assert rep["triples_checked"] > 10000

    def test_j3_box32_no_violations(self):
        rep = verify_resonance_bound(32, 3)
        assert rep["violations"] == 0 and rep["identity_failures"] == 0

    def test_certificate_json_schema(self):
        import json

        rep = verify_resonance_bound(8, 2)
        doc = json.loads(certificate_json(rep))
        assert set(doc) == {"j", "Kmax", "triples_checked", "violations",
                            "min_slack", "argmin"}

    def test_small_box_rejected(self):
        with pytest.raises(ValueError):
            verify_resonance_bound(1, 2)

    def test_zero_tau_pair_reproduces_magnitude(self):
        # sigma1 = sigma2 = 0 forces |sigma| to equal the resonance exactly
        j = 2
        t = Triple(3, 1, 2)
        tau1 = 1 ** (2 * j + 1) * (-1) ** (j + 1)
        tau2 = 2 ** (2 * j + 1) * (-1) ** (j + 1)
        sig = (tau1 + tau2) - (-1) ** (j + 1) * 3 ** (2 * j + 1)
        assert abs(sig) == resonance_magnitude(t, j)


class TestMaxCase:
    def test_plain_cases(self):
        t = Triple(2, 1, 1, sigma=10.0, sigma1=0.0, sigma2=0.0)
        assert classify_max_case(t, 2) == "a"
        t2 = Triple(2, 1, 1, sigma=3.0, sigma1=-30.0, sigma2=1.0)
        assert classify_max_case(t2, 2) == "b"

    def test_tie_resolves_to_lowest_label(self):
        t = Triple(2, 1, 1, sigma=30.0, sigma1=-30.0, sigma2=2.0)
        assert classify_max_case(t, 2) == "a"

    def test_requires_sigmas(self):
        with pytest.raises(ValueError):
            classify_max_case(Triple(2, 1, 1), 2)

    def test_randomized_assignments_never_fail(self):
        import random

        rnd = random.Random(5)
        j = 2
        sgn = -1  # (-1)^(j+1) for j=2
        for _ in range(2000):
            k1 = rnd.choice([n for n in range(-16, 17) if n != 0])
            k2 = rnd.choice([n for n in range(-16, 17) if n != 0])
            k = k1 + k2
            if k == 0:
                continue
            tau1, tau2 = rnd.randint(-10**6, 10**6), rnd.randint(-10**6, 10**6)
            t = Triple(k, k1, k2,
                       sigma=(tau1 + tau2) - sgn * k ** (2 * j + 1),
                       sigma1=tau1 - sgn * k1 ** (2 * j + 1),
                       sigma2=tau2 - sgn * k2 ** (2 * j + 1))
            assert classify_max_case(t, j) in "abc"  # the internal bound assertion ran


class TestScaledLattice:
    def test_homogeneous_scaling(self):
        out = scaled_triple_check(1.5, 0.5, 1.0, lam=2, j=2)
        assert out["holds"]
        t = Triple(3, 1, 2)
        assert out["resonance"] == pytest.approx(resonance_magnitude(t, 2) / 2**5)
        num, den = bound_num_den(t, 2)
        assert out["bound"] == pytest.approx(num / den / 2**5)

    def test_off_lattice_rejected(self):
        with pytest.raises(ValueError, match="lattice"):
            scaled_triple_check(1.3, 0.5, 0.8, lam=2, j=2)
