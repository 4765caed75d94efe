"""Reporting module - text artifacts for fits and clusterings"""
