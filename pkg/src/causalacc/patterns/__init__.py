"""Accountability patterns, matching, projection and the four-step check."""

from .check import (AMBIGUOUS, IMPOSSIBLE, NO_AGENT, RESOLVED, UNAMBIGUOUS,
                    AccountabilityReport, AgentFinding, Condition, check_accountability,
                    influence_conditions)
from .fileformat import format_pattern, load_pattern, parse_pattern
from .match import (MATCHED, MATCHED_WITH_OBLIGATIONS, NOT_MATCHED, Binding, MatchReport,
                    match_pattern)
from .project import Difference, Equivalence, SignatureError, equivalent, project
from .definitions import (Pattern, PatternEdge, PatternError, PatternNode, Role, builtin_patterns,
                   get_pattern)

__all__ = [
    "AMBIGUOUS", "IMPOSSIBLE", "MATCHED", "MATCHED_WITH_OBLIGATIONS", "NOT_MATCHED",
    "NO_AGENT", "RESOLVED", "UNAMBIGUOUS", "AccountabilityReport", "AgentFinding",
    "Binding", "Condition", "Difference", "Equivalence", "MatchReport", "Pattern",
    "PatternEdge", "PatternError", "PatternNode", "Role", "SignatureError",
    "builtin_patterns", "check_accountability", "equivalent", "format_pattern",
    "get_pattern", "influence_conditions", "load_pattern", "match_pattern",
    "parse_pattern", "project",
]
