import math

import pytest
from interferometer.interferometer_utils import (
    OUTCOMES,
    PATH_PAIRS,
    Arm,
    BeamSplitter,
    ImpactClass,
    ImpactLabel,
    ModelCase,
    ModelRule,
    Outcome,
    PathPair,
    PhaseSettings,
    SegmentPair,
    Sign,
    Subensemble,
)


def test_sign_and_outcome_order():
    assert ~Sign.PLUS == Sign.MINUS
    assert Sign.from_symbol("-") == Sign.MINUS
    # fixed (++, +-, -+, --) order
    assert [outcome.label for outcome in OUTCOMES] == ["++", "+-", "-+", "--"]
    assert len(set(OUTCOMES)) == 4, "There must be exactly four outcomes"
    assert Outcome.from_label("-+") == Outcome(Sign.MINUS, Sign.PLUS)
    assert Outcome.from_label("+-").parity == -1
    assert Outcome.from_label("--").index == 3


def test_phase_settings():
    phases = PhaseSettings.from_degrees(45, 45, -45)
    assert phases() == pytest.approx((math.pi / 4, math.pi / 4, -math.pi / 4), abs=1e-15)
    assert phases == PhaseSettings.discrimination_point()

    canonical = PhaseSettings(-0.5, 7.0, 2 * math.pi).canonical()
    assert all(0 <= phase < 2 * math.pi for phase in canonical()), "Canonical phases must lie in [0, 2 pi)"
    assert canonical.alpha == pytest.approx(2 * math.pi - 0.5)

    # non finite phases are rejected
    with pytest.raises(ValueError):
        PhaseSettings(float("nan"), 0.0, 0.0)
    with pytest.raises(ValueError):
        PhaseSettings(0.0, float("inf"), 0.0)

    assert PhaseSettings.from_dict({"alpha": 90.0}, degrees=True).alpha == pytest.approx(math.pi / 2)
    assert PhaseSettings.from_dict(phases.to_dict()) == phases


def test_path_pairs_and_subensembles():
    assert len(PATH_PAIRS) == 8
    assert len(set(PATH_PAIRS)) == 8, "Path pairs must be distinct"
    sizes = {subensemble: len(subensemble.paths) for subensemble in Subensemble}
    assert sizes == {
        Subensemble.TWO_LONG: 1,
        Subensemble.LONG: 3,
        Subensemble.SHORT: 3,
        Subensemble.TWO_SHORT: 1,
    }

    path = PathPair(Arm.LONG, SegmentPair.LONG_LONG)
    assert str(path) == "(L,LL)"
    assert path.label == "L|LL"
    assert path.subensemble == Subensemble.LONG
    assert PathPair.from_label("(l,LL)").subensemble == Subensemble.TWO_LONG
    assert PathPair.from_label("l,ll").subensemble == Subensemble.SHORT
    assert PathPair.from_label("L|ll").subensemble == Subensemble.TWO_SHORT
    assert SegmentPair.from_arms(Arm.SHORT, Arm.LONG) == SegmentPair.SHORT_LONG
    assert [p.label for p in Subensemble.LONG.paths] == ["L|LL", "l|Ll", "l|lL"]


def test_beam_splitters_and_impact_classes():
    assert [(bs.side, bs.position) for bs in BeamSplitter] == [(1, 1), (2, 1), (2, 2)]
    impact = ImpactClass(ImpactLabel.NON_BEFORE, BeamSplitter.BS21)
    assert str(impact) == "a21"
    assert ImpactClass.from_str("b22") == ImpactClass(ImpactLabel.BEFORE, BeamSplitter.BS22)


def test_model_cases():
    assert ModelCase.all_before().rule == ModelRule.ALL_BEFORE
    assert ModelCase.causal_indistinguishability().rule == ModelRule.CAUSAL_INDISTINGUISHABILITY
    fast_splitter = ModelCase.from_labels("b", "b", "a")
    assert fast_splitter.rule == ModelRule.UNSUPPORTED
    assert not fast_splitter.is_computable, "(b11, b21, a22) has no probability rule"
    assert str(ModelCase.causal_indistinguishability()) == "(b11,a21,b22)"
    assert ModelCase.from_labels("a", "a", "a").rule == ModelRule.UNSUPPORTED
