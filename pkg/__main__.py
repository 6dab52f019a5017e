"""Main entry point for running elliptic-logconn as a module."""

from src.cli import main

if __name__ == "__main__":
    exit(main())
