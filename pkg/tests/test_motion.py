import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsevideo.mask import DimensionError, SamplingMask, generate_mask
from fsevideo.motion import (MotionParams, MotionVectorField, block_match, consistency_check,
                             estimate_motion, search_displacements)

from conftest import shifted


def brute_force_match(support, current, mask, window, search):
    """Independent exhaustive search: explicit loops, explicit tie-break comparison."""
    support = support.astype(np.int64)
    current = current.astype(np.int64)
    H, W = support.shape
    h = window // 2
    out = {}
    for m in range(h, H - h):
        for n in range(h, W - h):
            if not mask.open[m, n]:
                continue
            ref = support[m - h:m + h + 1, n - h:n + h + 1]
            best = None
            for dm in range(-search, search + 1):
                for dn in range(-search, search + 1):
                    qm, qn = m + dm, n + dn
                    if not (h <= qm < H - h and h <= qn < W - h):
                        continue
                    sad = int(np.abs(ref - current[qm - h:qm + h + 1, qn - h:qn + h + 1]).sum())
                    key = (sad, dm * dm + dn * dn, dm, dn)
                    if best is None or key < best:
                        best = key
            if best is not None:
                out[(m, n)] = ((best[2], best[3]), best[0])
    return out


def test_params_validation():
    for kwargs in (dict(window_size=8), dict(window_size=1), dict(search_range=0)):
        with pytest.raises(ValueError):
            MotionParams(**kwargs)


def test_search_order_starts_at_zero():
    disps = search_displacements(2)
    assert disps[0] == (0, 0)
    assert disps[1:5] == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert len(disps) == 25


def test_identical_frames_zero_motion(texture):
    img = texture[:48, :48]
    mask = generate_mask(24, 24, 0)
    field = block_match(img, img, mask, MotionParams(search_range=4))
    assert len(field) > 0
    assert not field.vectors.any()
    assert not field.costs.any()


def test_known_shift_recovered(texture):
    support = shifted(texture, 0, 0, 64)
    current = shifted(texture, 2, 3, 64)
    np.testing.assert_array_equal(current[2:, 3:], support[:-2, :-3])
    mask = generate_mask(32, 32, 1)
    field = block_match(support, current, mask, MotionParams(search_range=5))
    interior = np.all((field.sources >= 8) & (field.sources < 56), axis=1)
    assert interior.sum() > 100
    assert np.all(field.vectors[interior] == (2, 3))
    assert np.all(field.costs[interior] == 0)


def test_flat_frames_tie_break_to_zero():
    flat = np.full((24, 24), 90, dtype=np.uint8)
    field = block_match(flat, flat, generate_mask(12, 12, 2), MotionParams(search_range=3))
    assert not field.vectors.any() and not field.costs.any()


def test_anchor_positions_are_open_samples(texture):
    mask = generate_mask(16, 16, 3)
    field = block_match(texture[:32, :32], texture[1:33, :32], mask, MotionParams(search_range=3))
    assert all(mask.open[m, n] for m, n in field.sources.tolist())
    assert np.abs(field.vectors).max() <= 3


@pytest.mark.parametrize("search", [3, 8])
def test_matches_brute_force(texture, search):
    rng = np.random.default_rng(search)
    support = texture[40:72, 40:72]
    current = np.clip(texture[42:74, 39:71].astype(int) + rng.integers(-3, 4, (32, 32)), 0, 255)
    mask = generate_mask(16, 16, search)
    field = block_match(support, current, mask, MotionParams(9, search))
    assert field.as_dict() == brute_force_match(support, current, mask, 9, search)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([8, 12, 16]), st.sampled_from([3, 5]),
       st.integers(1, 4))
def test_matches_brute_force_random(seed, size, window, search):
    rng = np.random.default_rng(seed)
    # few gray levels provoke SAD ties
    support = rng.integers(0, 4, (size, size)) * 40
    current = rng.integers(0, 4, (size, size)) * 40
    mask = generate_mask(size // 2, size // 2, seed)
    field = block_match(support, current, mask, MotionParams(window, search))
    assert field.as_dict() == brute_force_match(support, current, mask, window, search)


def test_frames_smaller_than_window():
    img = np.zeros((6, 6), dtype=np.uint8)
    mask = generate_mask(3, 3, 0)
    assert len(block_match(img, img, mask)) == 0
    assert len(estimate_motion(img, img, mask, mask)) == 0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        block_match(np.zeros((16, 16)), np.zeros((16, 18)), generate_mask(8, 8, 0))


def _field(entries):
    src = [p for p, _ in entries]
    vec = [v for _, v in entries]
    return MotionVectorField(src, vec, np.zeros(len(entries)))


def test_zero_vectors_shared_mask_all_removed():
    mask = generate_mask(10, 10, 5)
    src = np.argwhere(mask.open)
    field = MotionVectorField(src, np.zeros_like(src), np.zeros(len(src)))
    assert len(consistency_check(field, mask, mask)) == 0


def test_single_entry_between_samples_kept():
    open_ = np.zeros((8, 8), dtype=bool)
    open_[::2, ::2] = True
    mask = SamplingMask(open_)
    field = _field([((2, 2), (1, 1))])
    kept = consistency_check(field, mask, mask)
    assert kept.as_dict() == {(2, 2): ((1, 1), 0)}


def test_outlier_removed_consistent_neighbours_kept():
    # current mask closed everywhere so rule (a) never fires
    closed = SamplingMask(np.zeros((16, 16), dtype=bool))
    support = SamplingMask(np.ones((16, 16), dtype=bool))
    entries = []
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            if (a, b) != (0, 0):
                # neighbours with vector (1, 1) landing around (8, 8)
                entries.append(((7 + a, 7 + b), (1, 1)))
    entries.append(((4, 10), (4, -2)))  # outlier also landing on (8, 8)
    field = _field(entries)
    # hand-executed oracle: at (8, 8) the census holds 8 x (1, 1) and 1 x (4, -2); the
    # median is (1, 1) and 8 - 1 = 7 != 4, so only the outlier goes
    kept = consistency_check(field, support, closed).as_dict()
    assert (4, 10) not in kept
    assert len(kept) == 8
    assert all(v == (1, 1) for v, _ in kept.values())


def test_lower_median_for_even_census():
    closed = SamplingMask(np.zeros((8, 8), dtype=bool))
    support = SamplingMask(np.ones((8, 8), dtype=bool))
    # two entries landing next to each other; medians of {0, 2} and {0, 0}
    field = _field([((4, 3), (0, 0)), ((2, 4), (2, 0))])
    kept = consistency_check(field, support, closed).as_dict()
    # lower median (0, 0): first entry back-projects onto itself, second does not
    assert kept == {(4, 3): ((0, 0), 0)}


def test_refined_is_subset_and_avoids_samples(texture):
    mask = generate_mask(32, 32, 9)
    support = shifted(texture, 0, 0, 64)
    current = shifted(texture, 1, 0, 64)
    raw = block_match(support, current, mask, MotionParams(search_range=4))
    kept = consistency_check(raw, mask, mask)
    raw_d = raw.as_dict()
    for p, v in kept.as_dict().items():
        assert raw_d[p] == v
    landings = kept.landings
    assert not mask.open[landings[:, 0], landings[:, 1]].any()


def test_estimate_motion_zero_motion_empty(texture):
    mask = generate_mask(24, 24, 0)
    img = texture[:48, :48]
    assert len(estimate_motion(img, img, mask, mask, MotionParams(search_range=4))) == 0


def test_estimate_motion_integer_shift(texture):
    mask = generate_mask(32, 32, 4)
    support = shifted(texture, 0, 0, 64)
    current = shifted(texture, -3, 2, 64)
    field = estimate_motion(current, support, mask, mask, MotionParams(search_range=5))
    assert len(field) > 50
    assert np.mean(np.all(field.vectors == (-3, 2), axis=1)) >= 0.9
