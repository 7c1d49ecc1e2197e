import pytest

from codp import StageProfile, build_line


def raw_to_line(raw, demand_rate=1.0, demand_std=0.0):
    stages = [
        StageProfile(
            index=i + 1,
            time_mean=raw["times"][i],
            time_std=raw.get("stds", [0.0] * len(raw["times"]))[i],
            generic_unit_cost=raw["generic"][i],
            custom_unit_cost=raw["custom"][i],
            modification_cost=raw["modification"][i],
            holding_cost=raw["holding"][i],
            turnover=raw["turnover"][i],
            std_inventory=raw["stock"][i],
            inventory_adjustment=raw["adjust"][i],
        )
        for i in range(len(raw["times"]))
    ]
    return build_line(stages, raw["frontier"], demand_rate, demand_std)


def simple_line(times, frontier=None, stds=None, demand_rate=1.0, demand_std=0.0, **costs):
    n = len(times)
    stds = stds or [0.0] * n
    stages = []
    for i in range(n):
        kw = {k: v[i] for k, v in costs.items()}
        stages.append(StageProfile(index=i + 1, time_mean=times[i], time_std=stds[i], **kw))
    return build_line(stages, frontier if frontier is not None else n, demand_rate, demand_std)


@pytest.fixture
def reference():
    from codp.io import load, reference_paths

    return load(*reference_paths())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
