"""2D sandpile: spec examples, conservation, abelian order-independence
(against a sequential brute-force oracle), determinism, divergence guard."""

import numpy as np
import pytest

from conftest import clone_state
from oracles import relax_sandpile_reference
from socsim.errors import ConfigError, DivergenceError, DomainError
from socsim.sandpile import (add_grain, drive_sandpile, is_stable,
                             new_sandpile, parse_snapshot, relax,
                             snapshot_sandpile)


def test_new_sandpile_zero_grid():
    s = new_sandpile(3, 3, 4, 0)
    assert s.z.shape == (3, 3) and not s.z.any()
    assert s.total_grains == 0
    assert new_sandpile(1, 1, 4, 0).z.shape == (1, 1)
    assert not new_sandpile(64, 64, 4, 42).z.any()


@pytest.mark.parametrize("bad", [(0, 3, 4), (3, 0, 4), (-1, 3, 4), (3, 3, 0)])
def test_new_sandpile_rejects_bad_config(bad):
    w, h, z_c = bad
    with pytest.raises(ConfigError):
        new_sandpile(w, h, z_c, 0)


def test_add_grain_center_until_first_topple():
    s = new_sandpile(3, 3, 4, 0)
    for _ in range(3):
        ev = add_grain(s, (1, 1))
        assert ev.size == 0 and ev.steps == [] and ev.duration == 0
    ev = add_grain(s, (1, 1))
    assert (ev.size, ev.area, ev.duration, ev.boundary_loss) == (1, 1, 1, 0)
    assert ev.steps == [[((1, 1), 4)]]
    expected = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert np.array_equal(s.z, expected)
    ev.validate()


def test_add_grain_single_site_all_boundary():
    s = new_sandpile(1, 1, 4, 0)
    s.z[0, 0] = 3
    s.total_grains = 3
    ev = add_grain(s, (0, 0))
    assert ev.size == 1 and ev.boundary_loss == 4
    assert s.z[0, 0] == 0 and s.total_grains == 0


def test_add_grain_out_of_bounds():
    s = new_sandpile(3, 3, 4, 0)
    for site in ((3, 0), (0, 3), (-1, 0), (0, -1)):
        with pytest.raises(DomainError):
            add_grain(s, site)


def test_2x2_saturated_matches_bruteforce_oracle():
    s = new_sandpile(2, 2, 4, 0)
    s.z[:] = 3
    s.total_grains = 12
    seeded = s.z.copy()
    seeded[0, 0] += 1
    ref_grid, ref_size, ref_loss = relax_sandpile_reference(seeded, 4)
    ev = add_grain(s, (0, 0))
    assert ev.size == ref_size == 4
    assert ev.boundary_loss == ref_loss
    assert np.array_equal(s.z, ref_grid)
    assert ev.step_sizes == [1, 2, 1]
    ev.validate()


def test_random_events_match_bruteforce_oracle():
    s = new_sandpile(5, 4, 4, 17)
    drive_sandpile(s, 200)  # reach a busy regime
    for i in range(60):
        r = s.rng.randbelow(s.height)
        c = s.rng.randbelow(s.width)
        seeded = s.z.copy()
        seeded[r, c] += 1
        ref_grid, ref_size, ref_loss = relax_sandpile_reference(seeded, 4)
        ev = add_grain(s, (r, c))
        assert ev.size == ref_size
        assert ev.boundary_loss == ref_loss
        assert np.array_equal(s.z, ref_grid)


def test_conservation_and_stability_random_drive():
    s = new_sandpile(8, 8, 4, 3)
    for _ in range(2000):
        before = int(s.z.sum())
        r = s.rng.randbelow(8)
        c = s.rng.randbelow(8)
        ev = add_grain(s, (r, c))
        after = int(s.z.sum())
        assert before + 1 == after + ev.boundary_loss
        assert s.total_grains == after
        assert (s.z < s.z_c).all()
        ev.validate()


def test_abelian_order_swap_on_3x3():
    base = new_sandpile(3, 3, 4, 11)
    for sample in range(25):
        drive_sandpile(base, 13)
        assert is_stable(base)
        sites = [(r, c) for r in range(3) for c in range(3)]
        for a in sites:
            for b in sites:
                s1 = clone_state(base)
                add_grain(s1, a)
                add_grain(s1, b)
                s2 = clone_state(base)
                add_grain(s2, b)
                add_grain(s2, a)
                assert np.array_equal(s1.z, s2.z)


def test_drive_zero_is_identity():
    s = new_sandpile(4, 4, 4, 5)
    drive_sandpile(s, 50)
    grid = s.z.copy()
    state = s.rng.getstate()
    assert drive_sandpile(s, 0) == []
    assert np.array_equal(s.z, grid) and s.rng.getstate() == state


def test_drive_determinism():
    runs = []
    for _ in range(2):
        s = new_sandpile(16, 16, 4, 123)
        evs = drive_sandpile(s, 500)
        runs.append(([(e.size, e.area, e.duration, e.boundary_loss,
                       e.trigger_site) for e in evs], s.z.copy()))
    assert runs[0][0] == runs[1][0]
    assert np.array_equal(runs[0][1], runs[1][1])


def test_relax_noop_on_stable_state():
    s = new_sandpile(4, 4, 4, 9)
    drive_sandpile(s, 30)
    grid = s.z.copy()
    ev = relax(s)
    assert ev.size == 0 and np.array_equal(s.z, grid)


def test_relax_single_supercritical_interior_site():
    s = new_sandpile(5, 5, 4, 0)
    s.z[2, 2] = 4
    ev = relax(s)
    assert (ev.size, ev.duration, ev.boundary_loss) == (1, 1, 0)
    assert s.z[2, 2] == 0
    assert s.z[1, 2] == s.z[3, 2] == s.z[2, 1] == s.z[2, 3] == 1


def test_divergence_guard():
    s = new_sandpile(3, 3, 1, 0)  # z_c below the coordination number: grows forever
    s.sweep_cap = 1000
    with pytest.raises(DivergenceError):
        add_grain(s, (1, 1))


def test_event_ids_monotone():
    s = new_sandpile(4, 4, 4, 2)
    evs = drive_sandpile(s, 20)
    assert [e.event_id for e in evs] == list(range(20))


def test_magnitude_is_log10_size():
    s = new_sandpile(8, 8, 4, 4)
    evs = drive_sandpile(s, 300)
    for e in evs:
        assert e.magnitude == pytest.approx(np.log10(max(e.size, 1)))


def test_snapshot_format_and_roundtrip():
    s = new_sandpile(3, 2, 4, 0)
    s.z[:] = [[1, 2, 3], [0, 1, 2]]
    text = snapshot_sandpile(s)
    lines = text.splitlines()
    assert lines[0] == "sandpile 3 2 4"
    assert lines[1] == "1 2 3" and lines[2] == "0 1 2"
    assert np.array_equal(parse_snapshot(text), s.z)
