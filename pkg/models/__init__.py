"""Models module - posterior models and simulators"""
