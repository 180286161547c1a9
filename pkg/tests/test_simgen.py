import numpy as np
import pytest
from scipy import stats

from pspline_ci.simgen import (
    BrokenStick,
    ConstantNoise,
    CustomTarget,
    EquallySpaced,
    LinearNoise,
    ScaledBeta,
    generate_dataset,
    make_rng,
    sample_design,
    smoothed_broken_stick,
    standard_normal,
)

F = BrokenStick()
H = 0.2


def test_linear_segment_value():
    assert F(0.5) == 0.5
    assert smoothed_broken_stick(0.5) == 0.5


def test_corner_offset_is_quarter_slope_change():
    m1, m2 = F.slopes[0], F.slopes[1]
    assert F(1.0) == pytest.approx(F.raw(1.0) - (m1 - m2) * H / 4, abs=1e-14)
    m2, m3 = F.slopes[1], F.slopes[2]
    assert F(3.0) == pytest.approx(F.raw(3.0) - (m2 - m3) * H / 4, abs=1e-14)


def test_equals_raw_outside_blends():
    x = np.linspace(0, 5, 10001)
    out = (np.abs(x - 1) > H) & (np.abs(x - 3) > H)
    assert np.max(np.abs(F(x[out]) - F.raw(x[out]))) < 1e-14


def test_blend_parabola_oracle():
    # q(u) = a + b u + c u^2 from q(0.8) = line1(0.8), q'(0.8) = m1, q'(1.2) = m2
    m1, m2 = F.slopes[0], F.slopes[1]
    a, b = 0.8 * m1, m1
    c = (m2 - m1) / (2 * 2 * H)
    q = lambda x: a + b * (x - 0.8) + c * (x - 0.8) ** 2
    x = np.linspace(0.8, 1.2, 41)
    np.testing.assert_allclose(F(x), q(x), atol=1e-14)
    # right edge lands on the outgoing line automatically
    assert q(1.2) == pytest.approx(F.raw(1.2), abs=1e-14)


@pytest.mark.parametrize("edge", [0.8, 1.2, 2.8, 3.2, 1.0, 3.0])
def test_first_derivative_continuous(edge):
    d = 1e-7
    left = (F(edge) - F(edge - d)) / d
    right = (F(edge + d) - F(edge)) / d
    assert abs(left - right) < 1e-6


def test_c1_on_fine_grid():
    x = np.linspace(0, 5, 10**4)
    slope = np.diff(F(x)) / np.diff(x)
    # slope changes by at most |f''| * 2 dx with |f''| <= 5 in the blends
    assert np.max(np.abs(np.diff(slope))) < 5 * 2 * (x[1] - x[0]) + 1e-9


def test_domain_check():
    with pytest.raises(ValueError):
        F(5.5)
    with pytest.raises(ValueError):
        BrokenStick(slopes=(1.0,))


def test_custom_target():
    t = CustomTarget(np.sin, "sine")
    np.testing.assert_allclose(t([0.0, 1.0]), np.sin([0.0, 1.0]))


def test_equally_spaced():
    x = sample_design(EquallySpaced(101))
    assert x[0] == 0.0 and x[-1] == 5.0 and x.size == 101
    assert x[1] - x[0] == pytest.approx(0.05)


def test_scaled_beta_mean():
    x = ScaledBeta(10**5, 0.8, 0.8).sample(make_rng(1))
    se = x.std(ddof=1) / np.sqrt(x.size)
    assert abs(x.mean() - 2.5) < 3 * se
    assert np.all(np.diff(x) >= 0) and x.min() >= 0 and x.max() <= 5


def test_scaled_beta_center_heavy():
    x = ScaledBeta(10**5, 1.2, 1.2).sample(make_rng(2))
    count = np.sum(x <= 0.5)
    assert count < 10**5 * 0.1
    expected = 10**5 * stats.beta.cdf(0.1, 1.2, 1.2)
    assert abs(count - expected) < 4 * np.sqrt(expected)


def test_sample_design_flags_small_n():
    with pytest.raises(ValueError):
        sample_design(EquallySpaced(10), min_points=28)


def test_normal_generator_moments():
    z = standard_normal(make_rng(123), 10**6)
    assert abs(z.mean()) < 4 / 10**3
    assert abs(z.std() - 1) < 0.005


def test_zero_noise_is_exact():
    d = generate_dataset(F, EquallySpaced(101), ConstantNoise(0.0), 5)
    np.testing.assert_array_equal(d.ys, F(d.xs))


def test_same_seed_bit_identical():
    a = generate_dataset(F, ScaledBeta(101), ConstantNoise(0.1), (9, 3))
    b = generate_dataset(F, ScaledBeta(101), ConstantNoise(0.1), (9, 3))
    assert a.xs.tobytes() == b.xs.tobytes() and a.ys.tobytes() == b.ys.tobytes()
    c = generate_dataset(F, ScaledBeta(101), ConstantNoise(0.1), (9, 4))
    assert not np.array_equal(a.ys, c.ys)


def test_noise_sd_over_replicates():
    e = np.concatenate(
        [generate_dataset(F, EquallySpaced(101), ConstantNoise(0.1), (17, r)).ys - F(np.linspace(0, 5, 101)) for r in range(1000)]
    )
    se = 0.1 / np.sqrt(2 * e.size)
    assert abs(e.std(ddof=1) - 0.1) < 3 * se


def test_linear_noise():
    n = LinearNoise(-0.01, 0.125)
    np.testing.assert_allclose(n.sd([0.0, 5.0]), [0.125, 0.075])
    with pytest.raises(ValueError):
        LinearNoise(-1.0, 0.5).sd([0.0, 5.0])


def test_stream_is_pinned():
    # frozen values guard the documented generator identity against silent changes
    z = standard_normal(make_rng((12345, 1)), 3)
    assert z.tolist() == [-1.803812717666252, -2.2558671159494454, -1.3759159748382115]
    assert type(make_rng((12345, 1)).bit_generator).__name__ == "Philox"
