"""Policy constraints layered onto a built plant model: interval-matched
trading, emission-intensity caps, CAPEX caps, and the two-grid rewiring
that separates the renewable farm's market from the plant's market."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lp import LinearExpr, LpModel, Sense, lin_sum, term
from .plant import PlantVars
from .types import HourlySeries, PlantParameters, TcInterval, Unit, expect_unit

# calendar month lengths (hours, non-leap year) used when the horizon is
# a full year; synthetic horizons fall back to equal blocks
_CALENDAR_MONTH_HOURS = [31 * 24, 28 * 24, 31 * 24, 30 * 24, 31 * 24, 30 * 24,
                         31 * 24, 31 * 24, 30 * 24, 31 * 24, 30 * 24, 31 * 24]
_SYNTHETIC_MONTH_HOURS = 730


@dataclass(frozen=True)
class IntervalPartition:
    """Contiguous, ordered, gap-free cover of [0, horizon)."""

    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("partition must contain at least one interval")
        cursor = 0
        for start, end in self.intervals:
            if start != cursor:
                raise ValueError(f"interval starts at {start}, expected {cursor}")
            if end <= start:
                raise ValueError(f"empty interval [{start}, {end})")
            cursor = end

    @property
    def horizon(self) -> int:
        return self.intervals[-1][1]


def make_partition(interval: TcInterval, horizon: int) -> IntervalPartition:
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if interval is TcInterval.HOURLY:
        width = 1
    elif interval is TcInterval.DAILY:
        width = 24
    elif interval is TcInterval.MONTHLY:
        if horizon == 8760:
            bounds, cursor = [], 0
            for hours in _CALENDAR_MONTH_HOURS:
                bounds.append((cursor, cursor + hours))
                cursor += hours
            return IntervalPartition(tuple(bounds))
        width = _SYNTHETIC_MONTH_HOURS
    elif interval is TcInterval.YEARLY:
        width = horizon
    else:
        raise ValueError(f"unknown interval {interval!r}")
    bounds = [(start, min(start + width, horizon))
              for start in range(0, horizon, width)]
    return IntervalPartition(tuple(bounds))


def apply_temporal_correlation(model: LpModel, pvars: PlantVars,
                               partition: IntervalPartition) -> list[int]:
    """Within each interval, electricity sold must cover electricity
    bought: sum(export - import) >= 0. Returns the new constraint ids."""
    if partition.horizon != pvars.horizon:
        raise ValueError(f"partition covers {partition.horizon} hours, "
                         f"model has {pvars.horizon}")
    cids = []
    for start, end in partition.intervals:
        expr = lin_sum([term(pvars.export_kw[t]) - term(pvars.import_kw[t])
                        for t in range(start, end)])
        cids.append(model.add_constraint(expr, Sense.GE, 0.0,
                                         f"tc_{start}_{end}"))
    return cids


def apply_emission_cap(model: LpModel, pvars: PlantVars,
                       mef_buy: HourlySeries, mef_sell: HourlySeries,
                       cap_kg_per_kgh2: float, annual_h2_kg: float) -> int:
    """Cap the marginal-factor emission intensity of the produced
    hydrogen. Linear because annual hydrogen mass is a constant of the
    model (fixed delivery rate)."""
    expect_unit(mef_buy, Unit.KGCO2E_PER_KWH, "mef_buy")
    expect_unit(mef_sell, Unit.KGCO2E_PER_KWH, "mef_sell")
    if len(mef_buy) != pvars.horizon or len(mef_sell) != pvars.horizon:
        raise ValueError("emission-factor series length differs from horizon")
    if annual_h2_kg <= 0:
        raise ValueError(f"annual hydrogen mass must be positive, got {annual_h2_kg}")
    expr = lin_sum([term(pvars.import_kw[t], mef_buy.values[t])
                    - term(pvars.export_kw[t], mef_sell.values[t])
                    for t in range(pvars.horizon)])
    return model.add_constraint(expr, Sense.LE, cap_kg_per_kgh2 * annual_h2_kg,
                                "emission_cap")


def apply_capex_cap(model: LpModel, pvars: PlantVars, params: PlantParameters,
                    storage_unit_cost: float, cap_usd: float) -> int:
    """Cap total (un-annualized) capital cost. Storage enters at the unit
    cost currently selected by the sizing loop, so the cap is refreshed on
    every iteration of that loop."""
    if storage_unit_cost < 0:
        raise ValueError(f"storage unit cost must be >= 0, got {storage_unit_cost}")
    expr = (term(pvars.c_el, params.capex_el)
            + term(pvars.c_wind, params.capex_wind)
            + term(pvars.c_pv, params.capex_pv)
            + term(pvars.c_store, storage_unit_cost))
    return model.add_constraint(expr, Sense.LE, cap_usd, "capex_cap")


def wire_two_grid(model: LpModel, pvars: PlantVars) -> None:
    """Split the single electricity bus into two: the renewable farm
    trades only in its own (sell-side) market, and the plant is fed only
    by imports from the buy-side market. Replaces every hourly balance
    with a farm-side and a plant-side balance.

    Farm side keeps the curtailment outlet; with non-negative sell prices
    it is never used, but it remains the only legal response to negative
    prices once generation cannot flow to the plant directly.
    """
    for cid in pvars.balance_cids:
        model.remove_constraint(cid)
    plant_cids = []
    for t in range(pvars.horizon):
        gen = term(pvars.c_wind, pvars.a_wind[t]) + term(pvars.c_pv, pvars.a_pv[t])
        farm = term(pvars.export_kw[t]) + term(pvars.curtail_kw[t]) - gen
        model.add_constraint(farm, Sense.EQ, 0.0, f"farm_balance_{t}")
        plant = (term(pvars.e_el[t]) + term(pvars.e_comp1[t])
                 + term(pvars.e_comp2[t]) - term(pvars.import_kw[t]))
        plant_cids.append(model.add_constraint(plant, Sense.EQ, 0.0,
                                               f"plant_balance_{t}"))
    pvars.balance_cids = plant_cids
