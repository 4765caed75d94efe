"""Tests module - Unit tests"""
