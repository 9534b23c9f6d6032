"""
lpnkit: solvers for Learning Parity with Noise.
"""
