"""Large Monte-Carlo checks; run with `pytest -m slow`"""
import math

import numpy as np
import pytest
from joblib import Parallel, delayed

from analysis.optimizer import optimize_relay_distribution
from codes.decoder import erasure_rate
from codes.dist import robust_soliton
from config.constants import (
    DEFAULT_RSD_C,
    DEFAULT_RSD_DELTA,
    DEFAULT_RSD_K,
    EEP_RELAY_GAMMA,
    EIGHT_SOURCE_ALPHA,
    EIGHT_SOURCE_Q,
    FOUR_SOURCE_ALPHA,
    FOUR_SOURCE_Q,
    THREE_RELAY_DELTAS,
    UEP_RELAY_GAMMA,
)
from config.experiment import parse_config
from services.bound_service import bound_rows
from services.comparison_service import compare_to_de, de_curve
from services.de_service import de_curve_for
from services.simulation_service import overhead_targets, run_experiment, run_trial, trial_seed

pytestmark = pytest.mark.slow

FOUR_SOURCES = """
block_lengths = 400, 1600, 2400, 3600
depth = 4
q = 0.08, 0.29, 0.27, 0.36
overheads = 0.8:1.6:0.2
trials = 20
seed = 11
"""

DESIGN_MU = 12.0
DESIGN_EPS = 0.01


def listed(values):
    return ", ".join(repr(float(v)) for v in values)


def rate(result, scope, overhead):
    return dict(result.curve(scope))[overhead]


def trial_rates(cfg):
    """{scope: (trials, overheads) array of per-trial erasure rates}"""
    seeds = [trial_seed(cfg.seed, t) for t in range(cfg.trials)]
    trials = Parallel(n_jobs=-1)(delayed(run_trial)(cfg, seed, t) for t, seed in enumerate(seeds))
    scopes = trials[0].reports[0].scopes()
    return {
        scope: np.array([[erasure_rate(report, scope) for report in trial.reports] for trial in trials])
        for scope in scopes
    }


def interval(rates):
    """Mean and 95% half-width per overhead point"""
    mean = rates.mean(axis=0)
    half = 1.96 * rates.std(axis=0, ddof=1) / math.sqrt(rates.shape[0])
    return mean, half


def default_omega():
    return robust_soliton(DEFAULT_RSD_K, DEFAULT_RSD_C, DEFAULT_RSD_DELTA)


def test_single_source_behaves_like_lt():
    cfg = parse_config("K = 1000\ndepth = 1\ngamma = 1\nrsd_k = 1000\noverheads = 1.0, 1.4\ntrials = 10\nseed = 2\n")
    result = run_experiment(cfg, workers=-1)
    assert rate(result, "overall", 1.4) < 1e-2


def test_received_checks_follow_relay_erasures():
    cfg = parse_config("K = 2000\ndepth = 4\nrelay_deltas = 0.1\noverheads = 0.5, 1.0, 1.5\ntrials = 5\nseed = 5\n")
    result = run_experiment(cfg, workers=-1)
    for n, mean in zip(overhead_targets(cfg.overheads, cfg.K), result.mean_received):
        assert mean == pytest.approx(0.9 * n, abs=4 * math.sqrt(n * 0.09 / cfg.trials))


def test_weighted_selection_orders_sources():
    result = run_experiment(parse_config(FOUR_SOURCES), workers=-1)
    for overhead in (1.0, 1.2):
        rates = [rate(result, f"source:{i}", overhead) for i in range(1, 5)]
        assert rates[0] <= rates[3]
        assert rates[1] <= rates[3]


def test_simulation_crosses_where_density_evolution_predicts():
    cfg = parse_config(
        f"K = 8000\nalpha = {listed(FOUR_SOURCE_ALPHA)}\ndepth = 4\ngamma = {listed(EEP_RELAY_GAMMA)}\n"
        "relay_deltas = 0.1\noverheads = 0.9:2.2:0.05\ntrials = 20\nseed = 3\n"
    )
    result = run_experiment(cfg, workers=-1)
    (report,) = compare_to_de(result.curve(), de_curve(de_curve_for(cfg)), targets=(1e-2,))
    assert abs(report["gap"]) <= 0.05


@pytest.mark.parametrize("gamma", [EEP_RELAY_GAMMA, UEP_RELAY_GAMMA], ids=["eep_gamma", "uep_gamma"])
def test_sources_ordered_by_bias(gamma):
    cfg = parse_config(
        f"K = 8000\nalpha = {listed(FOUR_SOURCE_ALPHA)}\nq = {listed(FOUR_SOURCE_Q)}\ndepth = 4\n"
        f"gamma = {listed(gamma)}\noverheads = 0.6:2.0:0.1\ntrials = 20\nseed = 13\n"
    )
    rates = trial_rates(cfg)
    stats = [interval(rates[f"source:{i}"]) for i in range(1, 5)]
    means = np.array([mean for mean, _ in stats])
    halves = np.array([half for _, half in stats])
    checked = 0
    for g in range(means.shape[1]):
        if (means[:, g] < 1e-3).any():
            continue
        checked += 1
        for i in range(3):
            assert means[i, g] <= means[i + 1, g] + halves[i, g] + halves[i + 1, g]
    assert checked > 0


def test_buffers_lower_the_floor_of_conventional_relays():
    omega = default_omega()
    proposed = optimize_relay_distribution(omega, DESIGN_MU, 8, DESIGN_EPS)
    conventional = optimize_relay_distribution(omega, DESIGN_MU, 4, DESIGN_EPS)
    common = (
        "block_lengths = 2000, 2000, 2000, 2000\ndepth = 4\nrelay_deltas = 0.1\n"
        "overheads = 1.1:2.0:0.1\ntrials = 20\nseed = 9\n"
    )
    buffered = trial_rates(parse_config(common + f"gamma = {listed(proposed.gamma.coefficients)}\n"))
    plain = trial_rates(
        parse_config(common + f"scheme = conventional\ngamma = {listed(conventional.gamma.coefficients)}\n")
    )
    low, low_half = interval(buffered["overall"])
    high, high_half = interval(plain["overall"])
    assert low[-1] <= high[-1]
    assert (low + low_half < high - high_half).any()


def test_lossy_source_links_cost_nothing():
    common = (
        "sources = 8\nK = 8000\ndepth = 4\nscheme = slot_buffer\nrelay_deltas = 0.1\n"
        "overheads = 1.0:2.0:0.1\ntrials = 20\nseed = 8\n"
    )
    lossy_cfg = parse_config(common + "source_delta = 0.05\n")
    lossy, lossy_half = interval(trial_rates(lossy_cfg)["overall"])
    lossless, lossless_half = interval(trial_rates(parse_config(common))["overall"])
    compared = np.maximum(lossy, lossless) >= 1e-3
    assert compared.any()
    assert (np.abs(lossy - lossless)[compared] <= (lossy_half + lossless_half)[compared]).all()


def test_slot_buffer_never_stalls_on_lossy_links():
    cfg = parse_config(
        "sources = 8\nK = 8000\ndepth = 4\nscheme = slot_buffer\nsource_delta = 0.05\n"
        "relay_deltas = 0.1\noverheads = 1.0:1.6:0.2\ntrials = 5\nseed = 8\n"
    )
    result = run_experiment(cfg, workers=-1)
    assert all(count == 0 for stalls in result.stalls for count in stalls.values())
    assert all(fill[1] >= cfg.depth for fill in result.fill_rounds)
    assert np.all(np.diff([rate for _, rate in result.curve()]) <= 0)


def test_unconnected_bits_follow_ml_bound():
    # depth 1: every relay check combines fresh source symbols, so checks are independent
    lsb_gamma = optimize_relay_distribution(default_omega(), DESIGN_MU, 8, DESIGN_EPS).gamma
    cfg = parse_config(
        "block_lengths = " + ", ".join(["1000"] * 8) + "\ndepth = 1\nwindows = 1, 1, 1, 1, 2, 2, 2, 2\n"
        f"theta = 0.4, 0.6\ngamma_window.1 = {listed(EEP_RELAY_GAMMA)}\n"
        f"gamma_window.2 = {listed(lsb_gamma.coefficients)}\noverheads = 0.1, 0.2, 0.3\ntrials = 20\nseed = 21\n"
    )
    seeds = [trial_seed(cfg.seed, t) for t in range(cfg.trials)]
    trials = Parallel(n_jobs=-1)(delayed(run_trial)(cfg, seed, t) for t, seed in enumerate(seeds))
    class_bits = 4000
    for row in bound_rows(cfg):
        g = list(cfg.overheads).index(row["epsilon_r"])
        class_index = int(row["scope"].split(":")[1])
        reports = [trial.reports[g] for trial in trials]
        unconnected = np.array([r.unconnected_by_class[class_index] / class_bits for r in reports])
        erased = np.array([erasure_rate(r, row["scope"]) for r in reports])
        bound = row["bound"]
        # per-trial spread covers the shared check degrees; binomial is the floor
        sigma = max(
            unconnected.std(ddof=1) / math.sqrt(cfg.trials),
            math.sqrt(bound * (1.0 - bound) / (class_bits * cfg.trials)),
        )
        assert abs(unconnected.mean() - bound) <= 3 * sigma
        assert erased.mean() >= bound - 3 * sigma


def test_three_relays_split_sources_around_eep():
    common = (
        f"K = 8000\nalpha = {listed(EIGHT_SOURCE_ALPHA)}\nrelays = 3\ndepth = 4\nscheduling = random_one\n"
        f"relay_deltas = {listed(THREE_RELAY_DELTAS)}\noverheads = 0.8:2.2:0.1\ntrials = 20\nseed = 17\n"
    )
    eep, eep_half = interval(trial_rates(parse_config(common))["overall"])
    weighted = trial_rates(parse_config(common + f"q = {listed(EIGHT_SOURCE_Q)}\n"))
    compared = eep >= 1e-3
    assert compared.any()
    for i in range(1, 9):
        mean, half = interval(weighted[f"source:{i}"])
        slack = (half + eep_half)[compared]
        if i <= 4:
            assert (mean[compared] <= eep[compared] + slack).all()
        else:
            assert (mean[compared] >= eep[compared] - slack).all()
