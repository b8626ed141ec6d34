"""Exact cohomology of the Morava stabilizer algebra S(3)"""
