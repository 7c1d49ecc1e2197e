import pytest

from codp.exceptions import ParseError, ValidationError
from codp.io import load, parse_scenario, parse_stage_table, read_stage_table, reference_paths, write_stage_table

HEADER = "stage_index,time_mean,time_std,generic_unit_cost,custom_unit_cost,modification_cost,holding_cost,turnover,std_inventory"


def table(*rows, header=HEADER):
    return "\n".join([header, *rows]) + "\n"


def test_reference_table_loads():
    stages_path, _ = reference_paths()
    stages = read_stage_table(stages_path)
    assert len(stages) == 12
    assert sum(s.time_mean for s in stages) == 19


def test_missing_column_named():
    header = HEADER.replace(",turnover", "")
    with pytest.raises(ParseError) as info:
        parse_stage_table(table("1,1,0,1,1,1,1,1", header=header))
    assert "turnover" in str(info.value)
    assert info.value.line == 1


def test_negative_time_cites_row():
    rows = [f"{i},1,0,1,1,1,1,1,1" for i in range(1, 6)]
    rows[3] = "4,-2,0,1,1,1,1,1,1"
    with pytest.raises(ValidationError) as info:
        parse_stage_table(table(*rows))
    assert info.value.row == 4
    assert "row 4" in str(info.value)


def test_bad_number_and_cell_count():
    with pytest.raises(ParseError):
        parse_stage_table(table("1,abc,0,1,1,1,1,1,1"))
    with pytest.raises(ParseError):
        parse_stage_table(table("1,1,0,1,1"))


def test_duplicate_index():
    with pytest.raises(ValidationError):
        parse_stage_table(table("1,1,0,1,1,1,1,1,1", "1,1,0,1,1,1,1,1,1"))


def test_semicolon_and_case_insensitive_header():
    text = table("1;2;0;1;1;1;1;1;1", header=HEADER.upper().replace(",", ";"))
    assert parse_stage_table(text)[0].time_mean == 2


def test_round_trip(tmp_path, reference):
    line, _ = reference
    path = tmp_path / "stages.csv"
    write_stage_table(line, path)
    assert tuple(read_stage_table(path)) == line.stages


def test_scenario_defaults_and_single_deadline():
    sc = parse_scenario("frontier: 3\ndemand_rate: 5\ndeadline: 4\n")
    assert sc.deadlines == (4.0,)
    assert sc.service_level == 0.95 and sc.review_period == 1.0 and sc.sim is None


def test_scenario_json_accepted():
    sc = parse_scenario('{"frontier": 3, "demand_rate": 5, "deadlines": [1, 2]}')
    assert sc.deadlines == (1.0, 2.0)


@pytest.mark.parametrize("text", [
    "frontier: 3\ndemand_rate: 5\n",
    "frontier: 3\ndemand_rate: -1\ndeadline: 2\n",
    "frontier: 3\ndemand_rate: 5\ndeadline: 2\nservice_level: 1.2\n",
    "frontier: 2.5\ndemand_rate: 5\ndeadline: 2\n",
    "frontier: 3\ndemand_rate: 5\ndeadline: 2\nsim: {warmup: 10, horizon: 5}\n",
    "frontier: 3\ndemand_rate: 5\ndeadline: 2\nfit: {families: [cubic]}\n",
    "- just a list\n",
])
def test_scenario_rejections(text):
    with pytest.raises(ValidationError):
        parse_scenario(text)


def test_scenario_syntax_error():
    with pytest.raises(ParseError):
        parse_scenario("frontier: [3\n")


def test_frontier_beyond_line(tmp_path):
    stages, _ = reference_paths()
    sc = tmp_path / "s.yaml"
    sc.write_text("frontier: 40\ndemand_rate: 1\ndeadline: 3\n")
    with pytest.raises(ValidationError):
        load(stages, sc)
