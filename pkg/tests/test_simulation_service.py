import dataclasses

from config.experiment import parse_config
from services.simulation_service import (
    aggregate_trials,
    overhead_targets,
    run_experiment,
    run_trial,
    scope_sort_key,
    trial_seed,
)

SMALL = """
block_lengths = 40, 80
depth = 4
overheads = 0.5:2.0:0.5
trials = 3
seed = 9
"""


def config(extra=""):
    return parse_config(SMALL + extra)


def test_overhead_targets():
    assert overhead_targets([0.5, 1.0, 1.25], 40) == [20, 40, 50]
    assert overhead_targets([0.001], 40) == [1]


def test_trial_seeds():
    assert trial_seed(1, 0) == trial_seed(1, 0)
    assert trial_seed(1, 0) != trial_seed(1, 1)
    assert trial_seed(1, 0) != trial_seed(2, 0)


def test_scope_order():
    scopes = ["class:1", "source:2", "overall", "source:10", "source:1"]
    assert sorted(scopes, key=scope_sort_key) == ["overall", "source:1", "source:2", "source:10", "class:1"]


def test_lossless_shift_buffer_starts_after_fill():
    trial = run_trial(config(), seed=5)
    assert trial.fill_rounds == {1: 4}
    assert trial.first_transmissions == {1: 5}
    assert trial.transmissions == 240
    assert len(trial.reports) == 4


def test_erasure_rate_never_rises_with_overhead():
    trial = run_trial(config(), seed=5)
    rates = [report.overall_rate for report in trial.reports]
    assert rates == sorted(rates, reverse=True)
    received = [report.received for report in trial.reports]
    assert received == [60, 120, 180, 240]


def test_experiment_rows():
    cfg = config()
    result = run_experiment(cfg)
    assert result.scopes() == ["overall", "source:1", "source:2"]
    assert len(result.rows) == 3 * 4
    assert all(row["trials"] == 3 and row["K"] == 120 and row["seed"] == 9 for row in result.rows)
    assert all(0.0 <= row["erasure_rate"] <= 1.0 for row in result.rows)
    assert [overhead for overhead, _ in result.curve()] == [0.5, 1.0, 1.5, 2.0]


def test_experiment_is_reproducible():
    cfg = config()
    assert run_experiment(cfg).rows == run_experiment(cfg).rows
    other = run_experiment(dataclasses.replace(cfg, seed=10))
    assert other.rows != run_experiment(cfg).rows


def test_worker_count_does_not_change_result():
    cfg = config()
    assert run_experiment(cfg, workers=2).rows == run_experiment(cfg, workers=1).rows


def test_aggregation_ignores_completion_order():
    cfg = config()
    trials = [run_trial(cfg, trial_seed(cfg.seed, t), t) for t in range(cfg.trials)]
    assert aggregate_trials(cfg, list(reversed(trials))).rows == aggregate_trials(cfg, trials).rows


def test_single_trial():
    result = run_experiment(dataclasses.replace(config(), trials=1))
    assert result.trials == 1
    assert len(result.fill_rounds) == 1


def test_one_bit_relay_never_stalls():
    cfg = config("scheme = one_bit\ngamma = 0.5, 0.5\nsource_delta = 0.3\n")
    result = run_experiment(cfg)
    assert all(count == 0 for stalls in result.stalls for count in stalls.values())


def test_conventional_relay_stalls_on_erasures():
    cfg = config("scheme = conventional\ngamma = 0.5, 0.5\nsource_delta = 0.5\n")
    result = run_experiment(cfg)
    assert sum(count for stalls in result.stalls for count in stalls.values()) > 0
    assert all(fill == {1: 0} for fill in result.fill_rounds)


def test_lossy_relay_link_reduces_received():
    trial = run_trial(config("relay_deltas = 0.5\n"), seed=5)
    assert trial.transmissions == 240
    assert trial.reports[-1].received < 240


def test_payload_decodes_to_source_bits():
    result = run_experiment(config("payload = true\n"))
    assert result.payload_failures == 0


def test_slot_buffer_and_multiple_relays():
    cfg = config("scheme = slot_buffer\nrelays = 2\nscheduling = round_robin\nsource_delta = 0.2\n")
    trial = run_trial(cfg, seed=3)
    assert set(trial.fill_rounds) == {1, 2}
    assert trial.transmissions == 240


def test_windowed_experiment_reports_classes():
    cfg = config("windows = 1, 2\ntheta = 0.5, 0.5\ngamma_window.1 = 0.5, 0.5\ngamma_window.2 = 0.5, 0.5\n")
    result = run_experiment(cfg)
    assert result.scopes() == ["overall", "source:1", "source:2", "class:1", "class:2"]
    assert set(result.mean_unconnected) == {"class:1", "class:2"}
