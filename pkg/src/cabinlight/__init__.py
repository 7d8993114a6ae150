"""Adaptive fuzzy lighting controller with dual-table Q-learning."""

from .fuzzy import (
    AllRulesSilent,
    FuzzyVariable,
    InputState,
    MembershipFunction,
    Rule,
    build_default_variables,
    build_rule_base,
    infer,
)
from .learning import AdaptationDelta, FeedbackEvent, LearnerConfig, QTablePair
from .engine import (
    ConflictingSession,
    CorruptProfile,
    NoPendingSuggestion,
    SessionState,
    UserProfile,
    load_profile,
    open_session,
    save_profile,
    submit_feedback,
)

__version__ = "0.1.0"
