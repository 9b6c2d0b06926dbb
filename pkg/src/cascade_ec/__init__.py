"""Locally repairable erasure codes with cascaded parity groups."""
from .construct import CASCADED, BlockId, CodeSpec, Role, Scheme, StripeLayout, build_layout, group_of, layout_for
from .errors import (CascadeError, DistinctnessViolated, FieldWidthMismatch, InvalidSpec, NotApplicable,
                     NotFound, NotInvertible, PlanSourceUnavailable, Undecodable)
from .gf import FieldElem, FieldMatrix, gf_add, gf_inv, gf_mul, mat_rank, mat_solve
from .planner import RepairPlan, RepairStep, decodable, plan_multi, plan_single
from .presets import PRESETS, ParamPreset

__version__ = "0.1.0"
