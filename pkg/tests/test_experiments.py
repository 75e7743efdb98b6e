import json
import math

import numpy as np
import pytest

from subtensor import InvalidParam
from subtensor import experiments as ex


def cfg(**kw):
    return ex.ExperimentConfig(**kw)


def test_config_text_round_trip():
    c = cfg(name="ogp-scan", n=[10, 12], taus=[0.0, 0.25], gamma=0.55, trials=3)
    assert ex.parse_config_text(c.to_text()) == c


def test_config_rejects_unknown_key():
    with pytest.raises(InvalidParam, match="bogus"):
        ex.parse_config_text("name = ground-state\nbogus = 1\n")


def test_config_comments_and_lists():
    c = ex.parse_config_text("# grid\nn = 8, 9  # two sizes\np=2,3\ntrials = 4\n")
    assert c.n == [8, 9] and c.p == [2, 3] and c.trials == 4


def test_trial_seeds_are_reproducible_and_distinct():
    a = ex.trial_seed(1, "ground-state", 0)
    assert a == ex.trial_seed(1, "ground-state", 0)
    assert a != ex.trial_seed(1, "ground-state", 1)
    assert a != ex.trial_seed(1, "igpt-ratio", 0)


def test_ground_state_summary_and_revalidation(tmp_path):
    c = cfg(name="ground-state", n=[8], k=[2], p=[2, 3], trials=6, epsilon=[0.3])
    records, summary = ex.run_experiment(c, tmp_path, threads=2)
    assert len(records) == 12
    grid = summary["grid"]
    assert [g["p"] for g in grid] == [2, 3]
    for g in grid:
        assert 0 <= g["frac_below_emax"] <= 1
        assert "0.3" in g["frac_above"]
    back = ex.read_trial_csv(tmp_path / "ground-state.csv")
    again = ex.summarize_ground_state(back, c.epsilon)
    for g, h in zip(grid, again):
        assert h["mean_ratio"] == pytest.approx(g["mean_ratio"], rel=1e-12, abs=1e-12)
        assert h["sd_ratio"] == pytest.approx(g["sd_ratio"], rel=1e-12, abs=1e-12)
        assert h["frac_below_emax"] == g["frac_below_emax"]
    on_disk = json.loads((tmp_path / "ground-state_summary.json").read_text())
    assert on_disk["grid"][0]["trials"] == 6


def test_ground_state_degenerate_n_equals_k():
    records, summary = ex.run_ground_state(cfg(n=[3], k=[3], p=[2], trials=3))
    assert all(r.degenerate and math.isnan(r.ratio) for r in records)
    assert summary["grid"][0]["excluded"] == 3 and "mean_ratio" not in summary["grid"][0]


def test_ground_state_budget_error_recorded():
    _, summary = ex.run_ground_state(cfg(n=[40], k=[10], p=[2], trials=1, dense_cap=10**6))
    assert summary["errors"][0]["error"] == "BudgetExceeded"


def test_igpt_ratio_summary_fields():
    _, summary = ex.run_igpt_ratio(cfg(name="igpt-ratio", n=[200], k=[4], p=[2], trials=5))
    g = summary["grid"][0]
    assert g["guarantee_ratio"] == pytest.approx(2 * math.sqrt(2) / 3)
    assert "informal_igp_estimate" in g and "finite_size_ratio" in g


def test_concentration_reports():
    _, summary = ex.run_concentration(cfg(name="concentration", n=[6], k=[2], p=[2], trials=30))
    rep = summary["reports"]
    assert rep[0]["inputs"]["u"] == 0.0 and rep[0]["satisfied"]
    assert len(rep) == len(ex.ExperimentConfig().u_scaled)


def test_ogp_scan_small_enumeration():
    c = cfg(name="ogp-scan", n=[10], k=[2], p=[3], m=2, gamma=0.6, taus=[0.0])
    records, summary = ex.run_ogp_scan(c, threads=2)
    assert summary["mode"] == "enumeration"
    assert set(summary["overlap_histogram"]) <= {"0", "0.5", "1"}
    assert summary["tuples_examined"] == len(records) > 0
    # band [0.6, 0.9] contains no multiple of 1/2
    assert summary["band_count"] == 0
    # with tau = 0 both copies see the same tensor, so the qualifier sets coincide
    counts = summary["qualifier_counts"]
    assert counts["1@0"] == counts["2@0"]


def test_ogp_scan_gamma_above_one_is_empty():
    _, summary = ex.run_ogp_scan(cfg(name="ogp-scan", n=[8], k=[2], p=[2], gamma=1.5))
    assert summary["band_count"] == 0 and summary["empty_qualifier_assignments"] == 1


def test_ogp_scan_flags_out_of_definition_band():
    _, summary = ex.run_ogp_scan(cfg(name="ogp-scan", n=[6], k=[2], p=[2], nu1=0.4, nu2=0.6, gamma=0.5))
    assert summary["in_definition"] is False
    assert summary["band_count"] > 0


def test_ogp_scan_sampling_mode():
    c = cfg(name="ogp-scan", n=[30], k=[3], p=[3], gamma=0.4, taus=[0.0, 0.5], restarts=20, enum_budget=1000)
    records, summary = ex.run_ogp_scan(c)
    assert summary["mode"].startswith("sampling")


def test_tail_validation_passes():
    reports, summary = ex.run_tail_validate(cfg(name="tail-validate", mc_samples=20000))
    assert summary["all_satisfied"]
    names = {r.name for r in reports}
    assert names == {"gaussian_tail", "bivariate_tail", "mvn_tail"}


@pytest.mark.parametrize("name", ex.EXPERIMENTS)
def test_thread_count_does_not_change_csv(name, tmp_path):
    base = dict(name=name, n=[7], k=[2], p=[2], trials=4, mc_samples=5000, taus=[0.0, 0.7])
    if name == "igpt-ratio":
        base.update(n=[60], k=[3])
    c = cfg(**base)
    ex.run_experiment(c, tmp_path / "a", threads=1)
    ex.run_experiment(c, tmp_path / "b", threads=8)
    a = (tmp_path / "a" / f"{name}.csv").read_bytes()
    b = (tmp_path / "b" / f"{name}.csv").read_bytes()
    assert a == b and len(a) > 0


def test_csv_float_format_round_trips():
    r = ex.TrialRecord("x", 0, 5, 2, 2, 1, 2, "brute", 0.1 + 0.2, 1 / 3, math.pi, math.e)
    back = ex.read_trial_csv(ex.records_to_csv([r]))
    assert back[0].value_sum == 0.1 + 0.2 and back[0].ratio == math.e
