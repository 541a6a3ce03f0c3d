# This file makes stabmc/tests a Python package
