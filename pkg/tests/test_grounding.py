import numpy as np
import pytest

from taskrepair.errors import SamplerExhaustedError, SpecValidationError, WorkspaceError
from taskrepair.grounding import Ball, Box, Grounding, abstract, grid_grounding

F = frozenset


def test_abstract_nine_squares_cell(nine_grounding):
    assert abstract((0.5, 0.5), nine_grounding) == F({"x0", "y0"})


def test_abstract_boundary_closed_open(nine_grounding):
    # the lower edge belongs to the next cell over
    assert abstract((1.0, 0.0), nine_grounding) == F({"x1", "y0"})
    assert abstract((2.0, 2.0), nine_grounding) == F({"x2", "y2"})


def test_abstract_out_of_workspace(nine_grounding):
    with pytest.raises(WorkspaceError):
        abstract((3.5, 0.5), nine_grounding)


def test_overlapping_regions_multi_proposition_state():
    # one region contained in another, patrol-area style
    g = Grounding(
        regions={
            "big": Box((0.0, 0.0), (4.0, 4.0)),
            "inner": Box((1.0, 1.0), (2.0, 2.0)),
            "spot": Ball((3.0, 3.0), 0.5),
        },
        workspace=Box((0.0, 0.0), (4.0, 4.0)),
    )
    assert g.abstract((1.5, 1.5)) == F({"big", "inner"})
    assert g.abstract((3.0, 3.0)) == F({"big", "spot"})
    assert g.abstract((0.5, 3.5)) == F({"big"})


def test_mutual_exclusions_grid(nine_grounding):
    pairs = set(nine_grounding.mutual_exclusions())
    assert ("x0", "x1") in pairs
    assert ("y1", "y2") in pairs
    # columns and rows intersect
    assert ("x0", "y0") not in pairs


def test_no_mutex_for_contained_regions():
    g = Grounding(
        regions={"big": Box((0.0, 0.0), (4.0, 4.0)), "inner": Box((1.0, 1.0), (2.0, 2.0))},
        workspace=Box((0.0, 0.0), (4.0, 4.0)),
    )
    assert g.mutual_exclusions() == []


def test_realizable_states_grid(nine_grounding):
    states = nine_grounding.realizable_states()
    assert len(states) == 9
    assert all(len(s) == 2 for s in states)


def test_sampler_respects_state(nine_grounding):
    rng = np.random.default_rng(0)
    for _ in range(20):
        pt = nine_grounding.sample_state_region(F({"x1", "y2"}), rng)
        assert nine_grounding.abstract(pt) == F({"x1", "y2"})


def test_sampler_exhaustion_on_empty_region(nine_grounding):
    rng = np.random.default_rng(0)
    with pytest.raises(SamplerExhaustedError):
        nine_grounding.sample_state_region(F({"x0", "x1"}), rng, tries=50)


def test_ball_margins():
    b = Ball((0.0, 0.0), 1.0)
    assert b.contains((0.0, 1.0))
    assert not b.contains((0.0, 1.01))
    assert b.margin((0.0, 0.0)) == pytest.approx(1.0)


def test_box_validation():
    with pytest.raises(SpecValidationError):
        Box((0.0, 0.0), (0.0, 1.0))


def test_grid_grounding_shape():
    g = grid_grounding(nx=2, ny=2, cell=2.0)
    assert g.workspace.hi == (4.0, 4.0)
    assert g.abstract((3.0, 1.0)) == F({"x1", "y0"})
