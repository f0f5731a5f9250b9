import os
import sys

# experiment scripts double as the reference implementations for the
# acceptance protocols; make them importable from the tests
sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "scripts"))
