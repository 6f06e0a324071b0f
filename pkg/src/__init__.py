# ReasoningFlow annotation graph toolkit
