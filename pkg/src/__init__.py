"""
Quadratic Fock space toolkit
"""
