"""Structure-aware reward shaping for guide training."""
