# Tests for the ReasoningFlow annotation graph toolkit
