"""
ChiPredict - python -m chipredict.
"""

import sys

from chipredict.main import main

sys.exit(main())
