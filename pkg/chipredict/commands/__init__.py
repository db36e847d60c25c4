"""
ChiPredict - Commands package.
"""

from chipredict.commands.check import register as register_check
from chipredict.commands.density import register as register_density
from chipredict.commands.figure1 import register as register_figure1
from chipredict.commands.risk import register as register_risk

__all__ = ["register_check", "register_density", "register_figure1", "register_risk"]
