from .prompt import PromptContext, assemble_prompt
from .output import OutputValidationError, ReasonerOutput, validate_output
from .rules import (
    BudgetSplit,
    RuleBasedReasoner,
    RuleConstants,
    StructuredContext,
    decompose_requirements,
    parse_requirements,
)
from .llm import BackendError, EndpointConfig, LlmReasoner, llm_decide

__all__ = [
    "PromptContext",
    "assemble_prompt",
    "OutputValidationError",
    "ReasonerOutput",
    "validate_output",
    "BudgetSplit",
    "RuleBasedReasoner",
    "RuleConstants",
    "StructuredContext",
    "decompose_requirements",
    "parse_requirements",
    "BackendError",
    "EndpointConfig",
    "LlmReasoner",
    "llm_decide",
]
