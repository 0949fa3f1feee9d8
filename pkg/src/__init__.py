"""
DPS Workbench - Source Code Package
Dynamic precision scaling: fault-injection profiling, omission planning and EPI energy accounting
"""

__version__ = "1.0.0"
