import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from fsevideo.estimators import (FSEReconstructor, MultiFrameFSEReconstructor, SensorSimulator,
                                 check_video)
from fsevideo.mask import DimensionError, apply_mask
from fsevideo.multiframe import reconstruct_video_mf, reconstruct_video_sf
from fsevideo.synth import SequenceSpec, synthesize


@pytest.fixture(scope="module")
def video():
    return np.stack(synthesize(SequenceSpec("translate", (1, 0), 3, 40, 40, seed=2)))


def test_get_params_and_clone():
    est = MultiFrameFSEReconstructor(n_support=3, iterations=50)
    params = est.get_params()
    assert params["n_support"] == 3 and params["iterations"] == 50
    assert params["decay_rho"] == 0.7 and params["window_size"] == 9
    twin = clone(est)
    assert twin.get_params() == params
    twin.set_params(search_range=4)
    assert twin.search_range == 4 and est.search_range == 16


def test_sensor_masks_with_nan(video):
    sensor = SensorSimulator(seed=5).fit(video)
    out = sensor.transform(video)
    assert out.shape == video.shape
    observed = ~np.isnan(out)
    assert observed.mean() == 0.25
    np.testing.assert_array_equal(observed[0], sensor.mask_.open)
    np.testing.assert_array_equal(out[observed], video[observed])


def test_sensor_single_frame(video):
    sensor = SensorSimulator(seed=5).fit(video)
    assert sensor.transform(video[0]).shape == video[0].shape


def test_not_fitted(video):
    with pytest.raises(NotFittedError):
        SensorSimulator().transform(video)
    with pytest.raises(NotFittedError):
        FSEReconstructor().transform(video)


def test_sensor_shape_mismatch(video):
    sensor = SensorSimulator().fit(video)
    with pytest.raises(DimensionError):
        sensor.transform(video[:, :20, :20])


def test_sf_matches_functional_core(video):
    sensor = SensorSimulator(seed=1).fit(video)
    sampled = sensor.transform(video)
    out = FSEReconstructor().fit_transform(sampled)
    ref = reconstruct_video_sf([apply_mask(f, sensor.mask_) for f in video])
    np.testing.assert_array_equal(out, np.stack(ref))
    assert out.dtype == np.uint8


def test_mf_matches_functional_core(video):
    sensor = SensorSimulator(seed=1).fit(video)
    sampled = sensor.transform(video)
    est = MultiFrameFSEReconstructor(n_support=2, search_range=4)
    out = est.fit_transform(sampled)
    ref, report = reconstruct_video_mf([apply_mask(f, sensor.mask_) for f in video],
                                       sensor.mask_, 2, None, est.motion_params_)
    np.testing.assert_array_equal(out, np.stack(ref))
    assert est.report_.rows == report.rows


def test_pipeline_composition(video):
    pipe = make_pipeline(SensorSimulator(seed=3), FSEReconstructor(iterations=20))
    out = pipe.fit_transform(video)
    assert out.shape == video.shape
    assert pipe.get_params()["fsereconstructor__iterations"] == 20


def test_mf_rejects_varying_pattern(video):
    x = video.astype(float)
    x[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        MultiFrameFSEReconstructor().fit_transform(x)


def test_invalid_params_raise_on_fit():
    with pytest.raises(ValueError):
        FSEReconstructor(decay_rho=2.0).fit()
    with pytest.raises(ValueError):
        MultiFrameFSEReconstructor(window_size=4).fit()


@pytest.mark.parametrize("bad", [np.zeros((2, 2, 2, 2)), np.full((4, 4), 300.0),
                                 np.full((4, 4), np.inf)])
def test_check_video_rejects(bad):
    with pytest.raises(ValueError):
        check_video(bad, allow_nan=True)
