"""
Node and edge label vocabularies of the ReasoningFlow schema.
"""
from enum import Enum
from typing import Dict, Optional


class NodeLabel(str, Enum):
    """Semantic role of a node (text snippet)."""
    CONTEXT = "context"
    PLANNING = "planning"
    FACT = "fact"
    REASONING = "reasoning"
    RESTATEMENT = "restatement"
    ASSUMPTION = "assumption"
    EXAMPLE = "example"
    REFLECTION = "reflection"
    CONCLUSION = "conclusion"


class EdgeCategory(str, Enum):
    """Coarse edge categories."""
    PLANNING = "planning"
    REASONING = "reasoning"
    EVALUATION = "evaluation"


class EdgeLabel(str, Enum):
    """Fine-grained edge labels."""
    # Planning
    FRONTIER_PLAN = "frontier-plan"
    FRONTIER_VERIFY = "frontier-verify"
    PLAN_SUBPLAN = "plan-subplan"
    PLAN_NEXT_PLAN = "plan-next-plan"
    PLAN_ALTERNATIVE = "plan-alternative"
    # Reasoning
    PREMISE_CONCLUSION = "premise-conclusion"
    PLAN_STEP = "plan-step"
    CONCEPT_EXAMPLE = "concept-example"
    FACT_DETAIL = "fact-detail"
    RESTATEMENT = "restatement"
    CORRECTION = "correction"
    # Evaluation
    SUPPORT = "support"
    REFUTE = "refute"
    UNCERTAINTY = "uncertainty"

    @property
    def category(self) -> EdgeCategory:
        """Category this label belongs to."""
        return EDGE_CATEGORIES[self]


EDGE_CATEGORIES: Dict[EdgeLabel, EdgeCategory] = {
    EdgeLabel.FRONTIER_PLAN: EdgeCategory.PLANNING,
    EdgeLabel.FRONTIER_VERIFY: EdgeCategory.PLANNING,
    EdgeLabel.PLAN_SUBPLAN: EdgeCategory.PLANNING,
    EdgeLabel.PLAN_NEXT_PLAN: EdgeCategory.PLANNING,
    EdgeLabel.PLAN_ALTERNATIVE: EdgeCategory.PLANNING,
    EdgeLabel.PREMISE_CONCLUSION: EdgeCategory.REASONING,
    EdgeLabel.PLAN_STEP: EdgeCategory.REASONING,
    EdgeLabel.CONCEPT_EXAMPLE: EdgeCategory.REASONING,
    EdgeLabel.FACT_DETAIL: EdgeCategory.REASONING,
    EdgeLabel.RESTATEMENT: EdgeCategory.REASONING,
    EdgeLabel.CORRECTION: EdgeCategory.REASONING,
    EdgeLabel.SUPPORT: EdgeCategory.EVALUATION,
    EdgeLabel.REFUTE: EdgeCategory.EVALUATION,
    EdgeLabel.UNCERTAINTY: EdgeCategory.EVALUATION,
}

# Fill colors for rendered nodes, one per node label.
NODE_COLORS: Dict[NodeLabel, str] = {
    NodeLabel.CONTEXT: "#D9D9D9",
    NodeLabel.PLANNING: "#FFADAD",
    NodeLabel.FACT: "#FFD6A5",
    NodeLabel.REASONING: "#FDFFB6",
    NodeLabel.RESTATEMENT: "#CAFFBF",
    NodeLabel.ASSUMPTION: "#B3FBDF",
    NodeLabel.EXAMPLE: "#9BF6FF",
    NodeLabel.REFLECTION: "#A0C4FF",
    NodeLabel.CONCLUSION: "#C3B1E1",
}

NODE_SHAPES: Dict[NodeLabel, str] = {
    NodeLabel.CONTEXT: "note",
    NodeLabel.PLANNING: "hexagon",
    NodeLabel.FACT: "box",
    NodeLabel.REASONING: "box",
    NodeLabel.RESTATEMENT: "box",
    NodeLabel.ASSUMPTION: "parallelogram",
    NodeLabel.EXAMPLE: "component",
    NodeLabel.REFLECTION: "ellipse",
    NodeLabel.CONCLUSION: "doubleoctagon",
}

# Planning edges are shades of red, reasoning gray, evaluation blue.
EDGE_COLORS: Dict[EdgeLabel, str] = {
    EdgeLabel.FRONTIER_PLAN: "#FFCDCD",
    EdgeLabel.FRONTIER_VERIFY: "#FFC6C6",
    EdgeLabel.PLAN_SUBPLAN: "#FFBDBD",
    EdgeLabel.PLAN_NEXT_PLAN: "#FFB6B6",
    EdgeLabel.PLAN_ALTERNATIVE: "#FFADAD",
    EdgeLabel.PREMISE_CONCLUSION: "#F0F0F0",
    EdgeLabel.PLAN_STEP: "#E8E8E8",
    EdgeLabel.CONCEPT_EXAMPLE: "#E0E0E0",
    EdgeLabel.FACT_DETAIL: "#D8D8D8",
    EdgeLabel.RESTATEMENT: "#D0D0D0",
    EdgeLabel.CORRECTION: "#C8C8C8",
    EdgeLabel.SUPPORT: "#D0E4FF",
    EdgeLabel.REFUTE: "#C8D8FF",
    EdgeLabel.UNCERTAINTY: "#C0D4FF",
}


def parse_node_label(value: str) -> Optional[NodeLabel]:
    """
    Look up a node label by its canonical string.

    Args:
        value: Label string as written in a document

    Returns:
        The NodeLabel, or None if the string is not a canonical label
    """
    try:
        return NodeLabel(value)
    except ValueError:
        return None


def parse_edge_label(value: str) -> Optional[EdgeLabel]:
    """Edge counterpart of parse_node_label."""
    try:
        return EdgeLabel(value)
    except ValueError:
        return None
