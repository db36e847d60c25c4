"""
ChiPredict - Services package.
Special functions, quadrature, sampling, predictive densities, dominance
checks, risk estimation and experiments.
"""
