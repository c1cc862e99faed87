import textwrap

import pytest

from steeptime.scenario import (ScenarioError, builtin_config, parse_pairs, parse_real,
                                parse_scenario)

CUSTOM = textwrap.dedent("""\
    [grid]
    dims = 6, 5
    spacing = 0.5

    [cones]
    kind = polyhedral
    generators = 1, -0.8; 1, 0.6

    [finsler]
    kind = custom
    nodes = -0.8, -0.1, 0.6
    values = 0.3, 1.0, 0.3

    [run]
    stencil_radius = 2
    seed = 7

    [pairs]
    list = 0,0 -> 5,2; 1,1 -> 4,1
    """)


def test_custom_scenario_round_trip():
    cfg = parse_scenario(CUSTOM)
    st = cfg.spacetime()
    assert st.dims == (6, 5) and st.spacing == (0.5, 0.5)
    assert cfg.stencil_radius == 2 and cfg.seed == 7
    assert cfg.pairs == [((0, 0), (5, 2)), ((1, 1), (4, 1))]
    assert cfg.config_hash() == parse_scenario(CUSTOM).config_hash()
    assert cfg.config_hash() != parse_scenario(CUSTOM.replace("seed = 7", "seed = 8")).config_hash()


def test_builtin_scenario():
    cfg = parse_scenario("[grid]\nbuiltin = tilted_cones\nomega = 0.1\ndims = 5, 7\n")
    st = cfg.spacetime()
    assert st.dims == (5, 7) and st.periodic == (False, True)
    assert builtin_config("minkowski2d").spacetime().n_nodes == 81


def test_round_cone_with_periodic_axis():
    text = "[grid]\ndims = 4, 4\n[cones]\nkind = round\nmetric = -1, 0; 0, 1\n[identifications]\nperiodic = 0\n"
    assert parse_scenario(text).spacetime().periodic == (True, False)


@pytest.mark.parametrize("text, line, fragment", [
    ("[grid]\nbuiltin = minkowski2d\nspacing = 1e\n", 3, "spacing"),
    ("[grid]\nbuiltin = minkowski2d\n\n[run]\nstencil_radius = two\n", 5, "stencil_radius"),
    ("[grid]\nbuiltin = minkowski2d\n[run]\nstencil_radius = 0\n", 4, "stencil_radius"),
    ("[grid]\nbuiltin = minkowski2d\n[run]\neps_schedule = 0.1, 0.2\n", 4, "eps_schedule"),
    ("[grid]\nbuiltin = minkowski2d\ncolour = red\n", 3, "colour"),
    ("[grid]\nbuiltin = wormhole\n", 2, "wormhole"),
    ("[grid]\nbuiltin = minkowski2d\n[bogus]\nx = 1\n", 3, "bogus"),
    ("[grid]\nbuiltin = minkowski2d\n[pairs]\nlist = 0,0 4,2\n", 4, "a,b -> c,d"),
    ("[grid]\nbuiltin = minkowski2d\n[pairs]\nsample = 5\n", 4, "seed"),
    ("[grid]\nbuiltin = minkowski2d\n[fiber]\nlevels = 1\n", 4, "levels"),
    ("[grid]\nbuiltin = minkowski2d\n[timefn]\nmeasure = lebesgue\n", 4, "measure"),
    ("[grid]\nbuiltin = minkowski2d\n[verify]\nbox = 1,1\n", 4, "box"),
    ("[grid]\nbuiltin = periodic_time\nperiod = 0\n", 1, "period"),
    ("[grid]\ndims = 4, 4\n[cones]\nkind = round\nmetric = 1, 0; 0, 1\n", 1, "Lorentzian"),
    ("[grid]\ndims = 4, 4\n[cones]\nkind = conical\n", 4, "kind"),
    ("[grid]\nbuiltin = minkowski2d\n[run]\nseed = 1\nseed = 2\n", 5, "seed"),
    ("[grid]\nbuiltin = minkowski2d\nthis line has no equals sign\n", 3, "parse"),
])
def test_errors_point_at_lines(text, line, fragment):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    assert info.value.line == line
    assert fragment.lower() in str(info.value).lower()


def test_missing_grid_section():
    with pytest.raises(ScenarioError, match="grid"):
        parse_scenario("[run]\nseed = 1\n")


def test_value_parsers():
    assert parse_real(" 2.5 ") == 2.5
    for bad in ("0x10", "1e", "nan", "inf", ""):
        with pytest.raises(ValueError):
            parse_real(bad)
    assert parse_pairs("0,0 -> 1,1 ; 2,0->3,0") == [((0, 0), (1, 1)), ((2, 0), (3, 0))]
