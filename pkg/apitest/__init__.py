"""
The `apitest` package contains usage walk-throughs for the public API of `sgsvd` and `sgbench`. Each function prints
what it builds so the output can be read alongside the code.
"""
