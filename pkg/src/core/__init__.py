# This file marks the core directory as a Python package.