"""Ground stable model solver for basic, constraint, choice and weight rules."""
