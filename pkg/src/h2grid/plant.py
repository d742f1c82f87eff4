"""Hourly plant physics as LP variables and constraints.

Topology: grid imports and scaled renewable generation feed an
electricity bus that supplies the electrolyser and two compressors (one
on the pipeline path, one on the storage path); electrolyser output
splits between those paths; a constant hydrogen load draws from the
pipeline stream plus storage withdrawals. Exports and curtailment close
the bus balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lp import LinearExpr, LpModel, LpSolution, Sense, term
from .types import CapacitySpec, HourlySeries, Mode, PlantParameters, Unit, expect_unit


@dataclass
class PlantVars:
    """Variable handles (and generation coefficients) for one built model."""

    horizon: int
    # per-hour variable ids, arrays of length horizon
    e_el: np.ndarray
    e_comp1: np.ndarray
    e_comp2: np.ndarray
    import_kw: np.ndarray
    export_kw: np.ndarray
    curtail_kw: np.ndarray
    h_el: np.ndarray
    h_comp1: np.ndarray
    h_comp2: np.ndarray
    h_from_store: np.ndarray
    soc: np.ndarray
    # capacity / state variable ids
    c_wind: int
    c_pv: int
    c_el: int
    c_store: int
    soc0: int
    # per-kW-installed generation coefficients: gen_wind(t) = a_wind[t] * c_wind
    a_wind: np.ndarray
    a_pv: np.ndarray
    # electricity-bus balance constraint ids, one per hour (replaced when
    # the model is rewired for a two-grid split)
    balance_cids: list[int]
    mu_comp2: float


@dataclass(frozen=True)
class Dispatch:
    """Solved hourly flows plus the capacities they were solved under."""

    gen_wind_kw: np.ndarray
    gen_pv_kw: np.ndarray
    e_el_kw: np.ndarray
    e_comp1_kw: np.ndarray
    e_comp2_kw: np.ndarray
    import_kw: np.ndarray
    export_kw: np.ndarray
    curtail_kw: np.ndarray
    h_el_kg: np.ndarray
    h_comp1_kg: np.ndarray
    h_comp2_kg: np.ndarray
    h_from_store_kg: np.ndarray
    soc_kg: np.ndarray
    c_wind_kw: float
    c_pv_kw: float
    c_el_kw: float
    c_store_kg: float
    soc0_kg: float

    @property
    def horizon(self) -> int:
        return int(self.import_kw.size)


def build_plant(params: PlantParameters, ref_wind: HourlySeries,
                ref_pv: HourlySeries, caps: CapacitySpec, mode: Mode,
                horizon: int, mu_comp2: float | None = None) -> tuple[LpModel, PlantVars]:
    """Build the LP skeleton: flow variables, bus balance, conversion
    chains, storage recursion with cyclic closure, capacity limits.

    mu_comp2 is the storage-compressor coefficient for the currently
    selected storage technology (defaults to the pipeline value); it must
    be a scalar for the model to stay linear.
    """
    expect_unit(ref_wind, Unit.KW, "ref_wind")
    expect_unit(ref_pv, Unit.KW, "ref_pv")
    if len(ref_wind) != horizon or len(ref_pv) != horizon:
        raise ValueError(f"reference profiles have lengths {len(ref_wind)}/"
                         f"{len(ref_pv)}, expected horizon {horizon}")
    if params.c_ref_wind_kw <= 0 or params.c_ref_pv_kw <= 0:
        raise ValueError("reference capacities must be positive")
    if np.any(ref_wind.values < 0) or np.any(ref_wind.values > params.c_ref_wind_kw):
        raise ValueError(f"ref_wind outside [0, {params.c_ref_wind_kw}] kW")
    if np.any(ref_pv.values < 0) or np.any(ref_pv.values > params.c_ref_pv_kw):
        raise ValueError(f"ref_pv outside [0, {params.c_ref_pv_kw}] kW")
    if mu_comp2 is None:
        mu_comp2 = params.mu_comp2_pipeline

    model = LpModel()
    T = horizon

    def var_block(name: str, upper=math.inf) -> np.ndarray:
        return np.array([model.add_variable(0.0, upper, f"{name}_{t}")
                         for t in range(T)], dtype=int)

    e_el = var_block("e_el")
    e_comp1 = var_block("e_comp1")
    e_comp2 = var_block("e_comp2")
    import_ub = 0.0 if mode is not Mode.GRID else math.inf
    export_ub = 0.0 if mode is Mode.OFF_GRID else math.inf
    import_kw = var_block("import", upper=import_ub)
    export_kw = var_block("export", upper=export_ub)
    curtail_kw = var_block("curtail")
    h_el = var_block("h_el")
    h_comp1 = var_block("h_comp1")
    h_comp2 = var_block("h_comp2")
    h_from_store = var_block("h_store_out")
    soc = var_block("soc")

    c_wind = model.add_variable(*caps.wind_kw.as_bounds(), name="c_wind")
    c_pv = model.add_variable(*caps.pv_kw.as_bounds(), name="c_pv")
    c_el = model.add_variable(*caps.electrolyser_kw.as_bounds(), name="c_el")
    c_store = model.add_variable(*caps.storage_kg.as_bounds(), name="c_store")
    soc0 = model.add_variable(0.0, math.inf, name="soc0")

    a_wind = ref_wind.values / params.c_ref_wind_kw
    a_pv = ref_pv.values / params.c_ref_pv_kw
    h_per_e = params.eta_el / params.hhv    # kg H2 per kWh into the electrolyser

    balance_cids = []
    for t in range(T):
        gen = term(c_wind, a_wind[t]) + term(c_pv, a_pv[t])
        # electricity bus: consumption + export + curtailment = generation + import
        bus = (term(e_el[t]) + term(e_comp1[t]) + term(e_comp2[t])
               + term(export_kw[t]) + term(curtail_kw[t])
               - term(import_kw[t]) - gen)
        balance_cids.append(model.add_constraint(bus, Sense.EQ, 0.0, f"balance_{t}"))
        # curtailment is surplus renewable generation, so it cannot exceed it
        # (without this, negative prices would let the model import-and-dump)
        model.add_constraint(term(curtail_kw[t]) - gen, Sense.LE, 0.0, f"curtail_cap_{t}")
        # conversion chain
        model.add_constraint(term(h_el[t]) - term(e_el[t], h_per_e),
                             Sense.EQ, 0.0, f"electrolysis_{t}")
        model.add_constraint(term(h_el[t]) - term(h_comp1[t]) - term(h_comp2[t]),
                             Sense.EQ, 0.0, f"h_split_{t}")
        model.add_constraint(term(h_comp1[t]) + term(h_from_store[t]),
                             Sense.EQ, params.load_kg_per_h, f"load_{t}")
        model.add_constraint(term(e_comp1[t]) - term(h_comp1[t], params.mu_comp1),
                             Sense.EQ, 0.0, f"comp1_{t}")
        model.add_constraint(term(e_comp2[t]) - term(h_comp2[t], mu_comp2),
                             Sense.EQ, 0.0, f"comp2_{t}")
        # storage level recursion
        prev = term(soc0) if t == 0 else term(soc[t - 1])
        model.add_constraint(term(soc[t]) - prev - term(h_comp2[t]) + term(h_from_store[t]),
                             Sense.EQ, 0.0, f"soc_step_{t}")
        # capacity limits
        model.add_constraint(term(e_el[t]) - term(c_el), Sense.LE, 0.0, f"el_cap_{t}")
        model.add_constraint(term(soc[t]) - term(c_store), Sense.LE, 0.0, f"soc_cap_{t}")

    model.add_constraint(term(soc0) - term(c_store), Sense.LE, 0.0, "soc0_cap")
    # storage returns to its starting level, so net charge over the horizon is zero
    model.add_constraint(term(soc[T - 1]) - term(soc0), Sense.EQ, 0.0, "soc_cyclic")

    pvars = PlantVars(
        horizon=T, e_el=e_el, e_comp1=e_comp1, e_comp2=e_comp2,
        import_kw=import_kw, export_kw=export_kw, curtail_kw=curtail_kw,
        h_el=h_el, h_comp1=h_comp1, h_comp2=h_comp2,
        h_from_store=h_from_store, soc=soc,
        c_wind=c_wind, c_pv=c_pv, c_el=c_el, c_store=c_store, soc0=soc0,
        a_wind=a_wind, a_pv=a_pv, balance_cids=balance_cids, mu_comp2=mu_comp2,
    )
    return model, pvars


def _clean(values):
    # solver noise below the feasibility tolerance can leave -1e-13 or
    # -0.0 on quantities that are bounded at zero; snap those to 0
    arr = np.asarray(values, dtype=float)
    return np.where((arr > -1e-7) & (arr <= 0.0), 0.0, arr)


def extract_dispatch(solution: LpSolution, pvars: PlantVars) -> Dispatch:
    cw = float(_clean(solution.value(pvars.c_wind)))
    cpv = float(_clean(solution.value(pvars.c_pv)))
    return Dispatch(
        gen_wind_kw=pvars.a_wind * cw,
        gen_pv_kw=pvars.a_pv * cpv,
        e_el_kw=_clean(solution.series(pvars.e_el)),
        e_comp1_kw=_clean(solution.series(pvars.e_comp1)),
        e_comp2_kw=_clean(solution.series(pvars.e_comp2)),
        import_kw=_clean(solution.series(pvars.import_kw)),
        export_kw=_clean(solution.series(pvars.export_kw)),
        curtail_kw=_clean(solution.series(pvars.curtail_kw)),
        h_el_kg=_clean(solution.series(pvars.h_el)),
        h_comp1_kg=_clean(solution.series(pvars.h_comp1)),
        h_comp2_kg=_clean(solution.series(pvars.h_comp2)),
        h_from_store_kg=_clean(solution.series(pvars.h_from_store)),
        soc_kg=_clean(solution.series(pvars.soc)),
        c_wind_kw=cw,
        c_pv_kw=cpv,
        c_el_kw=float(_clean(solution.value(pvars.c_el))),
        c_store_kg=float(_clean(solution.value(pvars.c_store))),
        soc0_kg=float(_clean(solution.value(pvars.soc0))),
    )


def verify_conservation(d: Dispatch, load_kg_per_h: float,
                        tol: float = 1e-6) -> list[str]:
    """Physical-consistency audit of a solved dispatch: hourly bus
    balance, load coverage, storage recursion and bounds, cyclic closure,
    horizon-level hydrogen mass balance. Returns violations."""
    problems = []
    lhs = d.e_el_kw + d.e_comp1_kw + d.e_comp2_kw + d.export_kw + d.curtail_kw
    rhs = d.gen_wind_kw + d.gen_pv_kw + d.import_kw
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    bad = np.flatnonzero(np.abs(lhs - rhs) > tol * scale)
    if bad.size:
        t = int(bad[0])
        problems.append(f"electricity balance off by {lhs[t]-rhs[t]:.3e} kW at hour {t}"
                        f" (+{bad.size - 1} more)")

    load_gap = np.abs(d.h_comp1_kg + d.h_from_store_kg - load_kg_per_h)
    bad = np.flatnonzero(load_gap > tol * max(1.0, load_kg_per_h))
    if bad.size:
        t = int(bad[0])
        problems.append(f"load not met at hour {t} (gap {load_gap[t]:.3e} kg)")

    soc_prev = np.concatenate(([d.soc0_kg], d.soc_kg[:-1]))
    step = np.abs(d.soc_kg - soc_prev - d.h_comp2_kg + d.h_from_store_kg)
    scale = np.maximum(1.0, np.abs(d.soc_kg))
    bad = np.flatnonzero(step > tol * scale)
    if bad.size:
        t = int(bad[0])
        problems.append(f"storage recursion off by {step[t]:.3e} kg at hour {t}")

    cap_scale = max(1.0, d.c_store_kg)
    if np.any(d.soc_kg < -tol * cap_scale) or np.any(d.soc_kg > d.c_store_kg + tol * cap_scale):
        problems.append("storage level outside [0, c_store]")
    if not 0.0 - tol * cap_scale <= d.soc0_kg <= d.c_store_kg + tol * cap_scale:
        problems.append(f"initial storage level {d.soc0_kg} outside [0, {d.c_store_kg}]")

    # closure is held to an absolute tolerance: basic solutions satisfy the
    # single equality row essentially exactly
    closure = abs(d.soc_kg[-1] - d.soc0_kg)
    if closure > tol:
        problems.append(f"cyclic closure violated: |soc(T-1) - soc0| = {closure:.3e} kg")

    produced = float(d.h_el_kg.sum())
    delivered = load_kg_per_h * d.horizon
    drift = abs(produced - delivered - (d.soc_kg[-1] - d.soc0_kg))
    if drift > tol * max(1.0, delivered):
        problems.append(f"hydrogen mass balance off by {drift:.3e} kg over the horizon")
    return problems
