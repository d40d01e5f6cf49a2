"""
The command-line front end
==========================

Every subcommand prints deterministic JSON; this script drives it in-process.
"""

from adelic_energy.cli import main

main(["norm", "z^2 - 2", "--depth", "2", "--samples", "20000", "--period-max", "6"])
main(["map-info", "(z^2+1)/(2z)"])
main(["height", "z^2 - z - 1", "--map", "z^2"])

# errors carry a code, a message and, for parse errors, a byte offset
code = main(["norm", "z^^2"])
print("exit code:", code)

main(["quad-selftest", "--format", "text"])
