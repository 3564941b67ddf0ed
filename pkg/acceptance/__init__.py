"""Teacher-guided acceptance sampling: validating proposed strategies
against the core, certifying the accepted set, and curating
a supervised corpus of (problem, strategy) pairs."""
