"""Run the rate checks from the command line."""

from .cli import rates


if __name__ == "__main__":
    rates()
