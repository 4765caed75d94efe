"""Utils module - errors, seeding and small helpers"""
