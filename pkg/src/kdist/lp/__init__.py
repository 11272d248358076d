from kdist.lp.simplex import LPError, LPInstance, LPSolution, solve, verify_certificate

__all__ = ["LPError", "LPInstance", "LPSolution", "solve", "verify_certificate"]
