#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
__main__ entry point for the sor_mql package.
This allows running the package as a module with 'python -m sor_mql'
"""

import sys
from sor_mql.main import main

if __name__ == "__main__":
    sys.exit(main())
