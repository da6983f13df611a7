import math

import numpy as np
import pytest

from gazeintent.core import Fixation, ObjectContext, Trial
from gazeintent.features import (
    CANONICAL_ORDER,
    Combination,
    InsufficientDataError,
    adf2c,
    compute_features,
    extract,
    grasp_distances,
    var_of_distances,
)

from conftest import make_trial
from oracles import oracle_features, oracle_var


def fx(*points):
    return tuple(
        Fixation(t_start_ms=100.0 * i, duration_ms=80.0, x=float(p[0]), y=float(p[1]))
        for i, p in enumerate(points)
    )


def ctx(centroid=(0.0, 0.0), thumb=(-1.0, 0.0), index=(1.0, 0.0)):
    return ObjectContext(centroid=centroid, grasp_thumb=thumb, grasp_index=index, shape_id="square")


def test_adf2c_examples():
    assert adf2c(fx((3, 4)), (0, 0)) == 5.0
    assert adf2c(fx((1, 0), (-1, 0)), (0, 0)) == 1.0
    assert adf2c(fx((0, 0), (3, 0), (0, 4)), (0, 0)) == pytest.approx(7 / 3, rel=1e-12)


def test_grasp_distances_examples():
    c = ctx(thumb=(3.0, 4.0), index=(6.0, 8.0))
    t, i = grasp_distances(fx((6, 8), (6, 8)), c)
    assert i == 0.0 and t == pytest.approx(5.0, rel=1e-12)  # |G1 - G2|

    t, i = grasp_distances(fx((0, 0)), c)
    assert (t, i) == (5.0, 10.0)

    t, i = grasp_distances(fx((0, 0), (2, 0)), ctx(thumb=(1.0, 0.0), index=(1.0, 1.0)))
    assert t == pytest.approx(1.0, rel=1e-12)
    assert i == pytest.approx(math.sqrt(2), rel=1e-12)


def test_var_examples():
    assert var_of_distances(fx((7, 9))) == 0.0
    assert var_of_distances(fx((0, 0), (2, 0))) == pytest.approx(0.0, abs=1e-15)
    # oracle value for {(0,0),(1,0),(0,1)}: O=(1/3,1/3), d=(0.4714, 0.7454, 0.7454)
    expected = oracle_var([(0, 0), (1, 0), (0, 1)])
    assert expected == pytest.approx(0.016677646411438, rel=1e-12)
    assert var_of_distances(fx((0, 0), (1, 0), (0, 1))) == pytest.approx(expected, rel=1e-12)


def test_extract_shapes_and_order():
    rng = np.random.default_rng(0)
    trial = make_trial(rng, n_fix=6)
    assert extract(trial, Combination.C1).shape == (2,)
    assert extract(trial, Combination.C5).shape == (4,)
    fv = compute_features(trial.fixations, trial.object)
    assert list(extract(trial, Combination.C5)) == [fv.adf2c, fv.adf2i, fv.adf2t, fv.var]
    assert Combination.C5.members == CANONICAL_ORDER


def test_extract_c4_example():
    trial = Trial(
        trial_id="x", participant_id="p", task_label="GRASP",
        fixations=fx((3, 4)),
        object=ObjectContext(centroid=(0.0, 0.0), grasp_thumb=(0.0, 10.0),
                             grasp_index=(3.0, 0.0), shape_id="square"),
    )
    assert list(extract(trial, Combination.C4)) == [5.0, 4.0, 0.0]


def test_empty_fixations_rejected():
    with pytest.raises(InsufficientDataError):
        adf2c((), (0, 0))
    with pytest.raises(InsufficientDataError):
        grasp_distances((), ctx())
    with pytest.raises(InsufficientDataError):
        var_of_distances(())
    with pytest.raises(InsufficientDataError):
        compute_features((), ctx())


def test_matches_brute_force_oracle():
    rng = np.random.default_rng(42)
    for _ in range(300):
        trial = make_trial(rng)
        fv = compute_features(trial.fixations, trial.object)
        pts = [(f.x, f.y) for f in trial.fixations]
        want = oracle_features(pts, trial.object.centroid,
                               trial.object.grasp_thumb, trial.object.grasp_index)
        for name in ("adf2c", "adf2t", "adf2i", "var"):
            got = getattr(fv, name)
            assert got == pytest.approx(want[name], rel=1e-9, abs=1e-12)
        assert fv.n_fix == len(pts)


def _translated(trial, dx, dy, move_context=True):
    fixes = tuple(
        Fixation(f.t_start_ms, f.duration_ms, f.x + dx, f.y + dy) for f in trial.fixations
    )
    obj = trial.object
    if move_context:
        obj = ObjectContext(
            centroid=(obj.centroid[0] + dx, obj.centroid[1] + dy),
            grasp_thumb=(obj.grasp_thumb[0] + dx, obj.grasp_thumb[1] + dy),
            grasp_index=(obj.grasp_index[0] + dx, obj.grasp_index[1] + dy),
            shape_id=obj.shape_id,
        )
    return Trial(trial.trial_id, trial.participant_id, trial.task_label, fixes, obj)


def test_translation_invariance():
    rng = np.random.default_rng(3)
    for _ in range(50):
        trial = make_trial(rng, n_fix=8)
        moved = _translated(trial, 312.5, -77.25)
        a = compute_features(trial.fixations, trial.object)
        b = compute_features(moved.fixations, moved.object)
        for name in ("adf2c", "adf2t", "adf2i", "var"):
            assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-9)
        # moving only the fixations still leaves var alone
        fix_only = _translated(trial, 312.5, -77.25, move_context=False)
        assert var_of_distances(fix_only.fixations) == pytest.approx(a.var, rel=1e-9)


def _rotated(trial, angle, about):
    ca, sa = math.cos(angle), math.sin(angle)

    def rot(p):
        x, y = p[0] - about[0], p[1] - about[1]
        return (about[0] + ca * x - sa * y, about[1] + sa * x + ca * y)

    fixes = tuple(
        Fixation(f.t_start_ms, f.duration_ms, *rot((f.x, f.y))) for f in trial.fixations
    )
    obj = trial.object
    return Trial(
        trial.trial_id, trial.participant_id, trial.task_label, fixes,
        ObjectContext(rot(obj.centroid), rot(obj.grasp_thumb), rot(obj.grasp_index), obj.shape_id),
    )


def test_rotation_invariance():
    rng = np.random.default_rng(9)
    for _ in range(50):
        trial = make_trial(rng, n_fix=7)
        turned = _rotated(trial, 0.7345, about=(211.0, 95.0))
        a = compute_features(trial.fixations, trial.object)
        b = compute_features(turned.fixations, turned.object)
        for name in ("adf2c", "adf2t", "adf2i", "var"):
            assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-9, abs=1e-9)


def test_scaling_about_centroid():
    rng = np.random.default_rng(11)
    s = 2.75
    for _ in range(50):
        trial = make_trial(rng, n_fix=6)
        c = trial.object.centroid

        def scale(p):
            return (c[0] + s * (p[0] - c[0]), c[1] + s * (p[1] - c[1]))

        fixes = tuple(
            Fixation(f.t_start_ms, f.duration_ms, *scale((f.x, f.y))) for f in trial.fixations
        )
        obj = ObjectContext(c, scale(trial.object.grasp_thumb),
                            scale(trial.object.grasp_index), "square")
        a = compute_features(trial.fixations, trial.object)
        b = compute_features(fixes, obj)
        assert b.adf2c == pytest.approx(s * a.adf2c, rel=1e-9)
        assert b.adf2t == pytest.approx(s * a.adf2t, rel=1e-9)
        assert b.adf2i == pytest.approx(s * a.adf2i, rel=1e-9)
        assert b.var == pytest.approx(s * s * a.var, rel=1e-9)


def test_permutation_invariance_is_exact():
    rng = np.random.default_rng(13)
    for _ in range(30):
        trial = make_trial(rng, n_fix=11)
        a = compute_features(trial.fixations, trial.object)
        order = rng.permutation(len(trial.fixations))
        shuffled = tuple(trial.fixations[i] for i in order)
        b = compute_features(shuffled, trial.object)
        assert (a.adf2c, a.adf2t, a.adf2i, a.var) == (b.adf2c, b.adf2t, b.adf2i, b.var)
