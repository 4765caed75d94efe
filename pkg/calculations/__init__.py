"""Calculations module - convergence diagnostics and posterior summaries"""
