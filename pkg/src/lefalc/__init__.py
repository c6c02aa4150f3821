"""Graded two-sorted description logic toolkit: consistency checking by
saturation, model extraction, fuzzy concept lattices, and a brute-force
search oracle."""

__version__ = "0.1.0"

from .heyting import (Algebra, AlgebraError, make_chain, make_grid,
                      make_lattice)
from .syntax import (And, Assertion, Box, BoxRel, Concept, Describes, Dia,
                     DiaRel, Inc, KnowledgeBase, Member, Or, Prim, TBoxAxiom,
                     parse_document, parse_kb, print_kb, print_model,
                     subconcepts)
from .fca import (Context, FuzzyConcept, FuzzySet, Interpretation, box_op,
                  check_assertion, check_compatibility, check_kb, dia_op,
                  description_degree, enumerate_concepts, eval_concept,
                  hasse_edges, is_stable, membership_degree, r0, r1,
                  valuation)
from .unravel import check_acyclic, expand
from .tableau import (CapacityError, TableauState, Verdict, check_abox,
                      clash_check, initialize, saturate, trace)
from .modelgen import ExtractedModel, extract_model, verify_soundness
from .oracle import (BudgetExceededError, OracleResult, TinyOracle,
                     cross_check, find_model)

__all__ = [name for name in dir() if not name.startswith("_")]
