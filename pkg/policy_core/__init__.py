"""Policies, environments, rollouts, value estimation
and the net-utility objective J = V − λ·T.
"""
