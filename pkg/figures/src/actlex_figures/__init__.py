"""Figure rendering for actlex experiment artifacts.

Reads only the public CSV/JSON formats written by the actlex CLI; never
imports the pipeline package itself.
"""

__version__ = "0.1.0"
