"""Continuous local search for SMT over linear real arithmetic."""
from .model import (FALSE, TRUE, Assignment, Atom, Constraint, Formula, HsmtError, Literal, Op, Symmetric,
                    eval_constraint, eval_formula, export_smt2, is_model, parse_instance, serialize_instance)
from .optimizer import Point, SolverConfig, Sat, Unknown, anneal_solve

__all__ = [
    "TRUE", "FALSE", "Assignment", "Atom", "Constraint", "Formula", "HsmtError", "Literal", "Op", "Symmetric",
    "eval_constraint", "eval_formula", "export_smt2", "is_model", "parse_instance", "serialize_instance",
    "Point", "SolverConfig", "Sat", "Unknown", "anneal_solve",
]
