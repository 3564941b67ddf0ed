"""Tabular softmax guide trained with group-relative policy gradients
against the shaped reward."""
