"""Run every closed-form vs oracle suite and print a summary table."""

import sys

from dirtytape.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", *sys.argv[1:]]))
