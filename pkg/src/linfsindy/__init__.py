"""
linfsindy

Package grouping Python modules for sparse identification of nonlinear dynamical systems with
two interchangeable residual objectives:
 - L2: sequentially-thresholded least squares
 - L-infinity: particle swarm search over sparse supports with exact minimax inner fits
and the benchmark pipeline around them (chaotic ODE simulation, derivative estimation, noise
injection, reconstruction metrics and the experiment tables).

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""
