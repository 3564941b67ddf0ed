"""Basic Prometheus integration."""
