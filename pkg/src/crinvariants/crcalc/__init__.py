"""Domain layer: perturbation series, Reinhardt invariants, identity suites."""
