"""File formats, synthetic fixtures, and run configuration parsing."""

import json

import numpy as np
import pytest

from h2grid.ingest import (
    DISPATCH_HEADER,
    FIXTURE_KINDS,
    dataset_from_config,
    dump_json,
    load_config,
    load_grid_profile,
    load_re_profile,
    synth_fixture,
    write_dispatch_csv,
    write_grid_profile_csv,
    write_re_profile_csv,
)
from h2grid.types import Fixed, Free, Split, TcInterval


# -- synthetic fixtures -------------------------------------------------

@pytest.mark.parametrize("kind", FIXTURE_KINDS)
def test_fixture_kinds_build_valid_datasets(kind):
    ds = synth_fixture(kind, horizon=48, seed=3)
    assert ds.horizon == 48
    for profile in ds.zones.values():
        assert len(profile.spot_price) == 48
        assert 0.0 <= profile.arpp <= 1.0
    n_zones = 2 if kind == "two-zone-contrast" else 1
    assert len(ds.zones) == n_zones


def test_fixture_deterministic_per_seed():
    a = synth_fixture("random-walk", horizon=72, seed=9)
    b = synth_fixture("random-walk", horizon=72, seed=9)
    c = synth_fixture("random-walk", horizon=72, seed=10)
    assert np.array_equal(a.zone("Z1").spot_price.values,
                          b.zone("Z1").spot_price.values)
    assert np.array_equal(a.ref_wind.values, b.ref_wind.values)
    assert not np.array_equal(a.zone("Z1").spot_price.values,
                              c.zone("Z1").spot_price.values)


def test_fixture_rejects_unknown_kind():
    with pytest.raises(ValueError):
        synth_fixture("weird", horizon=24)


# -- CSV round trips -----------------------------------------------------

def test_grid_profile_round_trip(tmp_path):
    ds = synth_fixture("random-walk", horizon=60, seed=4)
    src = ds.zone("Z1")
    path = tmp_path / "z1.csv"
    write_grid_profile_csv(src, path)
    back = load_grid_profile(path)
    assert back.zone_id == src.zone_id
    # prices pass through an AUD conversion both ways, so last-ulp only;
    # the unconverted factor columns round-trip exactly
    assert back.spot_price.values == pytest.approx(src.spot_price.values,
                                                   rel=1e-12)
    assert np.array_equal(back.mef.values, src.mef.values)
    assert np.array_equal(back.aef.values, src.aef.values)
    assert back.ef_location == src.ef_location
    assert back.arpp == src.arpp and back.rmf == src.rmf


def test_grid_profile_fx_changes_usd_prices(tmp_path):
    ds = synth_fixture("flat", horizon=24, seed=0)
    path = tmp_path / "z1.csv"
    write_grid_profile_csv(ds.zone("Z1"), path)
    half = load_grid_profile(path, fx_usd_per_aud=0.35)
    full = load_grid_profile(path, fx_usd_per_aud=0.7)
    assert half.spot_price.values == pytest.approx(
        full.spot_price.values * 0.5, rel=1e-12)


def test_re_profile_round_trip(tmp_path):
    ds = synth_fixture("diurnal", horizon=48, seed=5)
    path = tmp_path / "re.csv"
    write_re_profile_csv(ds.ref_wind, ds.ref_pv, path)
    wind, pv = load_re_profile(path)
    assert np.array_equal(wind.values, ds.ref_wind.values)
    assert np.array_equal(pv.values, ds.ref_pv.values)


def test_dispatch_csv_shape(tmp_path, flat_grid_only):
    report, _ = flat_grid_only
    path = tmp_path / "dispatch.csv"
    write_dispatch_csv(report.dispatch, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(DISPATCH_HEADER)
    assert len(lines) == 1 + 168
    assert lines[1].split(",")[0] == "0"


# -- strict parsing ------------------------------------------------------

def grid_csv_lines(tmp_path):
    ds = synth_fixture("flat", horizon=4, seed=0)
    path = tmp_path / "z1.csv"
    write_grid_profile_csv(ds.zone("Z1"), path)
    return path, path.read_text().splitlines()


def test_header_mismatch_cites_file(tmp_path):
    path, lines = grid_csv_lines(tmp_path)
    lines[0] = lines[0].replace("mef", "marginal")
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match="header"):
        load_grid_profile(path)


def test_bad_cell_cites_line_number(tmp_path):
    path, lines = grid_csv_lines(tmp_path)
    parts = lines[2].split(",")
    parts[1] = "oops"
    lines[2] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match=r":3:"):
        load_grid_profile(path)


def test_hours_must_be_contiguous(tmp_path):
    path, lines = grid_csv_lines(tmp_path)
    lines[2] = "7" + lines[2][1:]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match="hour"):
        load_grid_profile(path)


def test_empty_data_rejected(tmp_path):
    path, lines = grid_csv_lines(tmp_path)
    path.write_text(lines[0] + "\n")
    with pytest.raises(ValueError, match="no data"):
        load_grid_profile(path)


def test_horizon_enforced_when_given(tmp_path):
    path, _ = grid_csv_lines(tmp_path)
    with pytest.raises(ValueError, match="4"):
        load_grid_profile(path, horizon=8760)


def test_missing_sidecar_rejected(tmp_path):
    path, _ = grid_csv_lines(tmp_path)
    path.with_suffix(".meta.json").unlink()
    with pytest.raises(ValueError, match="meta"):
        load_grid_profile(path)


def test_sidecar_keys_validated(tmp_path):
    path, _ = grid_csv_lines(tmp_path)
    meta = path.with_suffix(".meta.json")
    doc = json.loads(meta.read_text())
    doc["extra"] = 1
    meta.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="extra"):
        load_grid_profile(path)


def test_re_profile_range_checked(tmp_path):
    ds = synth_fixture("flat", horizon=4, seed=0)
    path = tmp_path / "re.csv"
    write_re_profile_csv(ds.ref_wind, ds.ref_pv, path)
    lines = path.read_text().splitlines()
    parts = lines[1].split(",")
    parts[1] = "999999999.0"
    lines[1] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match="reference capacity"):
        load_re_profile(path)


# -- run configuration ----------------------------------------------------

def write_config(tmp_path, doc):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def test_minimal_fixture_config(tmp_path):
    path = write_config(tmp_path, {"fixture": {"kind": "flat"}})
    config = load_config(path)
    assert config.horizon == 8760
    assert config.fx_usd_per_aud == 0.7
    assert config.fixture_kind == "flat"
    assert config.zone == "Z1"
    ds = dataset_from_config(
        load_config(write_config(tmp_path, {"fixture": {"kind": "flat"},
                                            "horizon": 24})))
    assert ds.horizon == 24


def test_config_unknown_key_rejected(tmp_path):
    path = write_config(tmp_path, {"fixture": {"kind": "flat"}, "turbo": 1})
    with pytest.raises(ValueError, match="turbo"):
        load_config(path)


def test_config_requires_exactly_one_source(tmp_path):
    with pytest.raises(ValueError):
        load_config(write_config(tmp_path, {}))
    with pytest.raises(ValueError):
        load_config(write_config(tmp_path, {
            "fixture": {"kind": "flat"},
            "zone_files": {"Z1": "z1.csv"},
            "re_profile_file": "re.csv"}))


def test_config_zone_files_need_re_profile(tmp_path):
    with pytest.raises(ValueError, match="re_profile_file"):
        load_config(write_config(tmp_path, {"zone_files": {"Z1": "z1.csv"}}))


def test_config_file_paths_resolved_and_checked(tmp_path):
    ds = synth_fixture("flat", horizon=24, seed=0)
    write_grid_profile_csv(ds.zone("Z1"), tmp_path / "z1.csv")
    write_re_profile_csv(ds.ref_wind, ds.ref_pv, tmp_path / "re.csv")
    path = write_config(tmp_path, {"horizon": 24,
                                   "zone_files": {"Z1": "z1.csv"},
                                   "re_profile_file": "re.csv"})
    config = load_config(path)
    dataset = dataset_from_config(config)
    assert dataset.horizon == 24
    missing = write_config(tmp_path, {"zone_files": {"Z1": "nope.csv"},
                                      "re_profile_file": "re.csv"})
    with pytest.raises(ValueError, match="nope.csv"):
        load_config(missing)


def test_config_bad_numbers_rejected(tmp_path):
    for doc in [{"fixture": {"kind": "flat"}, "horizon": 0},
                {"fixture": {"kind": "flat"}, "horizon": True},
                {"fixture": {"kind": "flat"}, "fx_usd_per_aud": -1.0}]:
        with pytest.raises(ValueError):
            load_config(write_config(tmp_path, doc))


def test_config_capacity_forms(tmp_path):
    path = write_config(tmp_path, {
        "fixture": {"kind": "flat"},
        "capacities": {"wind_kw": 1500.0,
                       "pv_kw": {"fixed": 0.0},
                       "electrolyser_kw": {"lower": 100.0, "upper": 9000.0},
                       "storage_kg": {"lower": 0.0, "upper": None}}})
    caps = load_config(path).capacities
    assert caps.wind_kw == Fixed(1500.0)
    assert caps.pv_kw == Fixed(0.0)
    assert caps.electrolyser_kw == Free(100.0, 9000.0)
    assert caps.storage_kg.upper == float("inf")


def test_config_scenarios_parsed(tmp_path):
    path = write_config(tmp_path, {
        "fixture": {"kind": "two-zone-contrast"},
        "zone": "Z1",
        "scenarios": [
            {"name": "match", "mode": "grid", "tc_interval": "yearly",
             "sell_zone": "Z2"},
            {"name": "island", "mode": "offgrid"},
        ]})
    config = load_config(path)
    match = config.scenarios[0]
    assert match.geo == Split(sell_zone="Z2", buy_zone="Z1")
    assert match.tc_interval is TcInterval.YEARLY
    assert config.scenarios[1].mode.value == "offgrid"


def test_config_duplicate_scenario_names_rejected(tmp_path):
    path = write_config(tmp_path, {
        "fixture": {"kind": "flat"},
        "scenarios": [{"name": "a", "mode": "grid"},
                      {"name": "a", "mode": "offgrid"}]})
    with pytest.raises(ValueError, match="duplicate"):
        load_config(path)


def test_config_buy_zone_requires_sell_zone(tmp_path):
    path = write_config(tmp_path, {
        "fixture": {"kind": "two-zone-contrast"},
        "scenarios": [{"name": "a", "mode": "grid", "buy_zone": "Z2"}]})
    with pytest.raises(ValueError, match="sell_zone"):
        load_config(path)


def test_dataset_from_config_checks_zone_exists(tmp_path):
    path = write_config(tmp_path, {"fixture": {"kind": "flat"},
                                   "zone": "Z9"})
    with pytest.raises(ValueError, match="Z9"):
        dataset_from_config(load_config(path))


# -- JSON output ------------------------------------------------------------

def test_dump_json_is_stable(tmp_path):
    path = tmp_path / "out.json"
    dump_json({"b": 1, "a": [1.5, None]}, path)
    text = path.read_text()
    assert text == '{\n  "a": [\n    1.5,\n    null\n  ],\n  "b": 1\n}\n'
    assert not list(tmp_path.glob("*.tmp*"))


def test_dump_json_rejects_nan(tmp_path):
    with pytest.raises(ValueError):
        dump_json({"x": float("nan")}, tmp_path / "bad.json")
