"""Truck-and-drone delivery routing: models, solvers and benchmark tools."""

from .evaluation import (
    Evaluation,
    InvalidSolutionError,
    Objective,
    Timeline,
    Violation,
    evaluate,
    evaluate_min_cost,
    evaluate_min_time,
    objective_scalar,
    validate,
)
from .model import (
    CostParams,
    DroneDelivery,
    Instance,
    Matrices,
    Metric,
    Point,
    Solution,
    build_matrices,
    count_feasible_deliveries,
    enumerate_feasible_deliveries,
    is_feasible_delivery,
)

__all__ = [
    "CostParams",
    "DroneDelivery",
    "Evaluation",
    "Instance",
    "InvalidSolutionError",
    "Matrices",
    "Metric",
    "Objective",
    "Point",
    "Solution",
    "Timeline",
    "Violation",
    "build_matrices",
    "count_feasible_deliveries",
    "enumerate_feasible_deliveries",
    "evaluate",
    "evaluate_min_cost",
    "evaluate_min_time",
    "is_feasible_delivery",
    "objective_scalar",
    "validate",
]

__version__ = "0.1.0"
