# run_experiment.py
# Entry point for running the CLI without installing the package
# (installed environments use the `ocl` console script instead)

import sys

from app.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
