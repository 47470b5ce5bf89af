"""Forecast-driven simple cash policy with a per-day cost ledger.

Each day the balance expected after the forecast flow is compared with the
limits ``[D, V]``. Below ``D`` the account is topped up to ``d``; above ``V``
the excess down to ``v`` is transferred out. The transfer settles before the
actual flow; holding or shortage cost then accrues on the end-of-day balance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, ValidationError

WORKDAYS_PER_YEAR = 250
ANNUAL = "annual"
DAILY = "daily"
# u is quoted as a bare rate next to annual q; charging it per day of overdraft
# gives cost magnitudes of the order reported for real accounts
DEFAULT_SHORTAGE_BASIS = DAILY


@dataclass(frozen=True)
class CostStructure:
    name: str
    holding: float        # q, annual rate on positive balances
    shortage: float       # u, daily (or annual) rate on negative balances
    fixed_in: float = 0.0
    fixed_out: float = 0.0
    variable_in: float = 0.0
    variable_out: float = 0.0
    scenario: str = "custom"

    def __post_init__(self):
        for f in ("holding", "shortage", "fixed_in", "fixed_out", "variable_in",
                  "variable_out"):
            if getattr(self, f) < 0:
                raise ValidationError(f"cost {f} must be non-negative")


@dataclass(frozen=True)
class PolicyParameters:
    D: float
    d: float
    v: float
    V: float
    max_pct: float = float("nan")
    alpha1: float = 0.5
    alpha2: float = 0.5

    def __post_init__(self):
        if not 0 <= self.D <= self.d <= self.v <= self.V:
            raise ValidationError(f"need 0 <= D <= d <= v <= V, got {self}")


def derive_parameters(train_flows, max_pct, alpha1=0.5, alpha2=0.5, upper_ratio=1.5):
    """Limits from the ceil(N * max_pct)-th smallest historical flow."""
    y = np.sort(np.asarray(train_flows, float))
    if y.size == 0:
        raise ValidationError("no training flows")
    if not 0 < max_pct < 1:
        raise ValidationError(f"max_pct must be in (0, 1), got {max_pct}")
    k = max(1, math.ceil(len(y) * max_pct - 1e-9))
    o = y[k - 1]
    if o >= 0:
        raise DegenerateError(f"the {k}-th smallest flow is {o} >= 0; no downside to cover")
    D = abs(float(o))
    V = upper_ratio * D
    d = D + alpha1 * (V - D)
    v = V - alpha2 * (V - d)
    return PolicyParameters(D, d, v, V, max_pct, alpha1, alpha2)


def daily_rate(annual, convention=WORKDAYS_PER_YEAR):
    if convention <= 0:
        raise ValidationError("workday convention must be positive")
    return annual / convention


def trajectory(flows, forecasts, params, initial_balance=None):
    """Signed transfers and end-of-day balances of the policy."""
    flows = np.asarray(flows, float)
    forecasts = np.asarray(forecasts, float)
    if flows.shape != forecasts.shape:
        raise ValidationError(f"flows ({flows.size}) and forecasts ({forecasts.size}) differ "
                              f"in length")
    D, d, v, V = params.D, params.d, params.v, params.V
    bal = d if initial_balance is None else float(initial_balance)
    n = flows.size
    transfers = np.zeros(n)
    balances = np.empty(n)
    for t in range(n):
        projected = bal + forecasts[t]
        if projected < D:
            transfers[t] = d - projected
        elif projected > V:
            transfers[t] = v - projected
        bal = bal + transfers[t] + flows[t]
        balances[t] = bal
    return transfers, balances


def _rates(costs, convention, shortage_basis):
    q = daily_rate(costs.holding, convention)
    if shortage_basis == ANNUAL:
        u = daily_rate(costs.shortage, convention)
    elif shortage_basis == DAILY:
        u = costs.shortage
    else:
        raise ValidationError(f"shortage_basis must be {ANNUAL!r} or {DAILY!r}")
    return q, u


def day_costs(transfers, balances, costs, convention=WORKDAYS_PER_YEAR,
              shortage_basis=DEFAULT_SHORTAGE_BASIS):
    """Per-day (transfer, holding, shortage) cost arrays for one cost structure."""
    q, u = _rates(costs, convention, shortage_basis)
    inflow = transfers > 0
    outflow = transfers < 0
    transfer_cost = (np.where(inflow, costs.fixed_in + costs.variable_in * transfers, 0.0)
                     + np.where(outflow, costs.fixed_out - costs.variable_out * transfers, 0.0))
    holding = q * np.maximum(balances, 0.0)
    shortage = u * np.maximum(-balances, 0.0)
    return transfer_cost, holding, shortage


def total_costs(transfers, balances, structures, convention=WORKDAYS_PER_YEAR,
                shortage_basis=DEFAULT_SHORTAGE_BASIS):
    """Total cost of one trajectory under each structure."""
    n_in = int(np.sum(transfers > 0))
    n_out = int(np.sum(transfers < 0))
    vol_in = float(np.sum(np.maximum(transfers, 0.0)))
    vol_out = float(np.sum(np.maximum(-transfers, 0.0)))
    pos = float(np.sum(np.maximum(balances, 0.0)))
    neg = float(np.sum(np.maximum(-balances, 0.0)))
    out = np.empty(len(structures))
    for j, c in enumerate(structures):
        q, u = _rates(c, convention, shortage_basis)
        out[j] = (c.fixed_in * n_in + c.variable_in * vol_in + c.fixed_out * n_out
                  + c.variable_out * vol_out + q * pos + u * neg)
    return out


@dataclass(frozen=True)
class CostLedger:
    dates: np.ndarray
    transfers: np.ndarray
    transfer_costs: np.ndarray
    holding_costs: np.ndarray
    shortage_costs: np.ndarray
    balances: np.ndarray

    @property
    def day_count(self):
        return len(self.balances)

    @property
    def daily_costs(self):
        return self.transfer_costs + self.holding_costs + self.shortage_costs

    @property
    def total(self):
        return float(np.sum(self.daily_costs))

    def write_csv(self, path, header=None):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if header:
                fh.write(f"# {header}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["date", "transfer", "transfer_cost", "holding_cost", "shortage_cost",
                        "balance"])
            for row in zip(self.dates, self.transfers, self.transfer_costs,
                           self.holding_costs, self.shortage_costs, self.balances):
                w.writerow([str(row[0])] + [repr(float(x)) for x in row[1:]])


def simulate(flows, forecasts, params, costs, initial_balance=None, dates=None,
             convention=WORKDAYS_PER_YEAR, shortage_basis=DEFAULT_SHORTAGE_BASIS):
    """Run the policy day by day; ``initial_balance`` defaults to ``params.d``."""
    transfers, balances = trajectory(flows, forecasts, params, initial_balance)
    tc, hc, sc = day_costs(transfers, balances, costs, convention, shortage_basis)
    if dates is None:
        dates = np.arange(1, len(balances) + 1)
    return CostLedger(np.asarray(dates), transfers, tc, hc, sc, balances)


MOST_LIKELY = "most_likely"
VARYING_SHORTAGE = "varying_u"
VARIABLE_COST = "variable_cost"
SCENARIO_GROUPS = (MOST_LIKELY, VARYING_SHORTAGE, VARIABLE_COST)


def cost_scenarios(groups=SCENARIO_GROUPS, custom=()):
    """Cost structures of the named scenario groups, followed by ``custom`` ones."""
    out = []
    for group in groups:
        if group == MOST_LIKELY:
            for q in (0.10, 0.15, 0.20):
                for g0 in (1, 2, 3, 4, 5):
                    out.append(CostStructure(f"{group}:q={q:.2f},g0={g0}", q, 0.30, g0, g0,
                                             0.0, 0.0, group))
        elif group == VARYING_SHORTAGE:
            for u in (0.10, 0.20, 0.40):
                out.append(CostStructure(f"{group}:u={u:.2f}", 0.15, u, 3, 3, 0.0, 0.0, group))
        elif group == VARIABLE_COST:
            for g1 in (0.0001, 0.0002, 0.0004):
                out.append(CostStructure(f"{group}:g1={g1 * 1000:.1f}permil", 0.15, 0.30, 3, 3,
                                         g1, g1, group))
        else:
            raise ValidationError(f"unknown cost scenario group {group!r}")
    out.extend(custom)
    return out
