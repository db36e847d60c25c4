"""
ChiPredict - Test package.
"""
