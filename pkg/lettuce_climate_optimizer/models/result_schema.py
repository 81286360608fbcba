from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from lettuce_climate_optimizer.models.scenario_schema import ControllerKind, StaticControl, SweepParameter

KG_TO_G = 1000.0


class HarvestStats(BaseModel):
    """Distribution of the harvested dry weight and the money it brings"""

    mean: float = Field(..., description="Mean harvest dry weight [kg m-2]")
    std: float = Field(..., ge=0, description="Standard deviation of harvest dry weight [kg m-2]")
    p_in_band: float = Field(..., ge=0, le=1, description="Probability of a harvest inside the revenue band")
    expected_revenue: float
    expected_cost: float
    expected_net: float

    @model_validator(mode="after")
    def check_net(self) -> "HarvestStats":
        if abs(self.expected_net - (self.expected_revenue - self.expected_cost)) > 1e-9 * max(1.0, abs(self.expected_net)):
            raise ValueError("expected_net must equal expected_revenue - expected_cost")
        return self

    def display(self) -> Dict[str, float]:
        """Serialized form with weights in g m-2."""
        return {
            "mean_g_m2": self.mean * KG_TO_G,
            "std_g_m2": self.std * KG_TO_G,
            "p_in_band": self.p_in_band,
            "expected_revenue": self.expected_revenue,
            "expected_cost": self.expected_cost,
            "expected_net": self.expected_net,
        }


class ControllerOutcome(BaseModel):
    kind: ControllerKind
    design_sigma2: float
    eval_sigma2: float
    start_day: int
    performance: float = Field(..., description="Expected net revenue at the start [EUR m-2]")
    harvest: HarvestStats
    static_control: Optional[StaticControl] = None


class ComparisonRecord(BaseModel):
    x0: float
    x0_cell: int
    snap_distance: float = Field(..., description="|x0 - x(cell)| [kg m-2]")
    outcomes: List[ControllerOutcome]
    value_ratios: Dict[str, float] = Field(default_factory=dict, description="performance / dynamic stochastic performance")
    std_ratios: Dict[str, float] = Field(default_factory=dict, description="harvest std / dynamic stochastic harvest std")

    def outcome(self, kind: ControllerKind) -> ControllerOutcome:
        for outcome in self.outcomes:
            if outcome.kind == kind:
                return outcome
        raise KeyError(kind)


class SweepRow(BaseModel):
    parameter_value: float
    controller: ControllerKind
    performance: Optional[float] = None
    harvest_std: Optional[float] = Field(None, description="[kg m-2]")
    p_in_band: Optional[float] = None
    start_day: Optional[int] = None
    error: Optional[str] = None


class SweepResult(BaseModel):
    parameter: SweepParameter
    rows: List[SweepRow]

    def performance(self, value: float, controller: ControllerKind) -> Optional[float]:
        for row in self.rows:
            if row.parameter_value == value and row.controller == controller:
                return row.performance
        raise KeyError((value, controller))


class SolveSummary(BaseModel):
    """Headline numbers of one dynamic stochastic solve"""

    horizon: int
    n_cells: int
    sigma2: float
    optimal_start: int
    x0_cell: int
    headline_value: float = Field(..., description="max_k V[k][cell(x0)] [EUR m-2]")
    u_day_at_start: float
    u_night_at_start: float
