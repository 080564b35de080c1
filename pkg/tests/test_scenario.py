import pytest

from slicesim.errors import ConfigError, UnstableScenario
from slicesim.scenario import bundled_text, load_scenario, load_scenario_text, static_instance

BASE = """\
name: small
mu: 2.0
dag:
  tasks:
    - {id: 1, name: a}
    - {id: 2, name: b}
  edges:
    - {from: 1, to: 2}
ues:
  - lambda: 0.5
  - lambda: 0.7
    initial_task: 2
"""


def test_bundled_replica_loads():
    cfg = load_scenario("paper_replica")
    assert cfg.n == 16 and cfg.r == 10
    assert cfg.duration == 1500 and cfg.warmup == 300
    assert [tp for _, tp in cfg.priorities] == [4, 3, 2, 1]
    assert sum(u.lam for u in cfg.ues) < cfg.r * cfg.mu


def test_minimal_scenario_defaults():
    cfg = load_scenario_text(BASE)
    assert cfg.r == 3 and cfg.tau == 0.8 and cfg.alpha == 1
    assert cfg.ues[1].initial_task == 2
    inst = static_instance(cfg)
    assert list(inst.ue_slice) == [1, 2]


def test_unstable_scenario_rejected():
    text = BASE.replace("mu: 2.0", "mu: 0.8")
    with pytest.raises(UnstableScenario):
        load_scenario_text(text.replace("lambda: 0.5", "lambda: 0.75").replace("0.7", "0.79")
                           + "  - lambda: 0.79\n  - lambda: 0.79\n")


def test_cyclic_dag_reports_edges_line():
    text = BASE.replace("    - {from: 1, to: 2}", "    - {from: 1, to: 2}\n    - {from: 2, to: 1}")
    with pytest.raises(ConfigError) as ei:
        load_scenario_text(text)
    assert ei.value.path == "dag.edges" and ei.value.line == 8


def test_bad_field_reports_line():
    with pytest.raises(ConfigError) as ei:
        load_scenario_text(BASE.replace("lambda: 0.7", "lambda: -1"))
    assert ei.value.path == "ues[1].lambda" and ei.value.line == 11
    assert "line 11" in str(ei.value)


def test_unknown_key_and_bad_yaml():
    with pytest.raises(ConfigError):
        load_scenario_text(BASE + "bogus: 1\n")
    with pytest.raises(ConfigError) as ei:
        load_scenario_text("mu: [1,\n")
    assert ei.value.line is not None


def test_lambda_not_below_mu():
    with pytest.raises(ConfigError) as ei:
        load_scenario_text(BASE.replace("lambda: 0.7", "lambda: 2.0"))
    assert ei.value.path == "ues[1].lambda"


def test_pair_outside_grid():
    text = BASE + "transmission:\n  pairs:\n    - {ue: 9, upf: 1, bits: 1, rate: 1}\n"
    with pytest.raises(ConfigError):
        load_scenario_text(text)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_scenario("/nonexistent/x.yaml")
    with pytest.raises(ConfigError):
        bundled_text("nope")
