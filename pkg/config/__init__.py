"""Config module - Global configurations"""
