"""
Numerical core: Dunkl kernels, quadrature, holomorphic series, the L^2, B and
C spaces, the transforms between them and the polar-decomposition harness.
"""
